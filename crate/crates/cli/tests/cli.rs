use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use catchmesh::io::{write_points, write_samples};
use catchmesh::zonal_equal_area_points;
use serde_json::Value;

fn catchmesh(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_catchmesh")).args(args).output().expect("binary runs")
}

fn json(path: impl AsRef<Path>) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn rows(path: impl AsRef<Path>) -> usize {
    fs::read_to_string(path).unwrap().lines().count() - 1
}

#[test]
fn gen_mesh_writes_points_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let res = catchmesh(&["gen-mesh", "--n", "5", "--grid-size", "20000", "--out", out]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    assert_eq!(rows(dir.path().join("mesh.csv")), 1187);
    let summary = json(dir.path().join("summary.json"));
    assert_eq!(summary["M_n"], 1187);
    assert_eq!(summary["C"], 2.0);
    assert!(summary["eta_estimate"].as_f64().unwrap() * 1187f64.sqrt() <= 3.5);

    let res = catchmesh(&["gen-mesh", "--n", "2", "--grid-size", "5000"]);
    assert!(res.status.success());
    assert_eq!(String::from_utf8_lossy(&res.stdout).lines().count(), 182);
    let summary: Value = serde_json::from_slice(&res.stderr).unwrap();
    assert_eq!(summary["C"], 2.0);
}

#[test]
fn degree_zero_is_a_usage_error() {
    assert_eq!(catchmesh(&["gen-mesh", "--n", "0"]).status.code(), Some(2));
    assert_eq!(catchmesh(&["gen-mesh", "--n", "3", "--theta", "1.5"]).status.code(), Some(2));
    assert_eq!(catchmesh(&["compress"]).status.code(), Some(2));
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let a = catchmesh(&["compress", "--n", "4"]);
    let b = catchmesh(&["compress", "--n", "4"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(String::from_utf8_lossy(&a.stdout).starts_with("x,y,z,w\n"));
}

#[test]
fn compress_reports_submesh() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let res = catchmesh(&["compress", "--n", "5", "--out", out]);
    assert!(res.status.success());
    assert_eq!(rows(dir.path().join("submesh.csv")), 121);
    assert_eq!(rows(dir.path().join("mesh.csv")), 1187);
    let report = json(dir.path().join("report.json"));
    assert_eq!(report["catch_cardinality"], 121);
    assert_eq!(report["parent_cardinality"], 1187);

    let res = catchmesh(&["compress", "--n", "2", "--out", out]);
    assert!(res.status.success());
    let ratio = json(dir.path().join("report.json"))["compression_ratio"].as_f64().unwrap();
    assert!((ratio - 7.2).abs() <= 0.1);
}

#[test]
fn compress_validates_loaded_meshes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "x,y,z\n1,0,0.01\n0,1,0\n").unwrap();
    let res = catchmesh(&["compress", "--n", "1", "--mesh", bad.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(2));

    let small = dir.path().join("small.csv");
    write_points(fs::File::create(&small).unwrap(), &zonal_equal_area_points(20).unwrap(), None).unwrap();
    let res = catchmesh(&["compress", "--n", "2", "--mesh", small.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(3), "{}", String::from_utf8_lossy(&res.stderr));

    let missing = dir.path().join("missing.csv");
    let res = catchmesh(&["compress", "--n", "2", "--mesh", missing.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(4));
}

#[test]
fn fit_test_function_with_both_methods() {
    let res = catchmesh(&["fit", "--n", "8", "--f", "2", "--method", "both"]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let reports: Value = serde_json::from_slice(&res.stdout).unwrap();
    let reports = reports.as_array().unwrap();
    assert_eq!(reports.len(), 2);
    let full = reports[0]["sup_error"].as_f64().unwrap();
    let catch = reports[1]["sup_error"].as_f64().unwrap();
    assert!(full < 1e-5 && catch < 1e-5);
    assert!(catch <= 20.0 * full);
    assert_eq!(reports[1]["catch_cardinality"], 289);

    assert_eq!(catchmesh(&["fit", "--n", "2", "--f", "0"]).status.code(), Some(2));
}

#[test]
fn fit_from_samples() {
    let dir = tempfile::tempdir().unwrap();
    let config = zonal_equal_area_points(1187).unwrap();
    // x z is a multiple of Y_{2,1}
    let values: Vec<f64> = config.points().iter().map(|p| p.x * p.z).collect();
    let samples = dir.path().join("s.csv");
    write_samples(fs::File::create(&samples).unwrap(), config.points(), &values, None).unwrap();
    let out = dir.path().join("fit");
    let res = catchmesh(&["fit", "--n", "5", "--samples", samples.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    for r in json(out.join("fit.json")).as_array().unwrap() {
        assert!(r["sup_error"].as_f64().unwrap() <= 1e-9);
    }
    assert_eq!(rows(out.join("coefficients_full_mesh_LS.csv")), 36);

    let shifted: Vec<_> = config.points().iter().rev().copied().collect();
    write_samples(fs::File::create(&samples).unwrap(), &shifted, &values, None).unwrap();
    let res = catchmesh(&["fit", "--n", "5", "--samples", samples.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn norms_report() {
    let res = catchmesh(&["norms", "--n", "2", "--grid-size", "20000"]);
    assert!(res.status.success());
    let r: Value = serde_json::from_slice(&res.stdout).unwrap();
    let lm = r["lambda_mesh"].as_f64().unwrap();
    let lc = r["lambda_catch"].as_f64().unwrap();
    assert!((1.0..r["bound"].as_f64().unwrap()).contains(&lc));
    assert!((lm - 2.2).abs() <= 0.33);
}

#[test]
fn padua_mesh() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let res = catchmesh(&["padua", "--n", "5", "--out", out]);
    assert!(res.status.success());
    assert_eq!(rows(dir.path().join("padua.csv")), 561);
    let summary = json(dir.path().join("summary.json"));
    assert_eq!(summary["nu"], 32);
    assert_eq!(summary["covered"], true);
}

#[test]
fn json_point_format() {
    let res = catchmesh(&["padua", "--n", "1", "--format", "json"]);
    assert!(res.status.success());
    let pts: Value = serde_json::from_slice(&res.stdout).unwrap();
    assert_eq!(pts.as_array().unwrap().len(), 36);
}

#[test]
fn reproduce_small_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let res = catchmesh(&["reproduce-tables", "--degrees", "2,5", "--grid-size", "20000", "--out", out]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let table1 = fs::read_to_string(dir.path().join("table1.csv")).unwrap();
    let lines: Vec<&str> = table1.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[2].starts_with("5,1187,1187,121,121,true,"));
    assert_eq!(rows(dir.path().join("table2.csv")), 12);
}

#[test]
fn thread_cap_from_environment() {
    let run = |v: &str| {
        Command::new(env!("CARGO_BIN_EXE_catchmesh"))
            .args(["padua", "--n", "1", "--grid-size", "100"])
            .env("CATCHMESH_THREADS", v)
            .output()
            .unwrap()
    };
    assert!(run("1").status.success());
    assert_eq!(run("zero").status.code(), Some(2));
}
