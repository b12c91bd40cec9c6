use std::path::Path;

use catchmesh::padua::{chebyshev_angle_grid, padua_mesh_degree, square_covering_radius};
use catchmesh::tables::{run_degree, ExperimentConfig, Table1Row, Table2Row};
use catchmesh::*;
use serde::Serialize;

use crate::output::Output;
use crate::{CliError, Common, CompressArgs, FitArgs, GenMeshArgs, Method, NormsArgs, PaduaArgs, TablesArgs};

type Result<T> = std::result::Result<T, CliError>;

/// Sample points may differ from mesh points by at most this chord length.
const ALIGNMENT_TOLERANCE: f64 = 1e-12;

/// Default probe size for the Padua covering estimate (≈ 317²).
const SQUARE_PROBE: usize = 100_000;

fn policy(common: &Common) -> Result<MeshCardinalityPolicy> {
    Ok(MeshCardinalityPolicy::new(common.alpha, common.theta, common.variant.into())?)
}

fn catch_options(common: &Common) -> CatchOptions {
    CatchOptions::with_tol(common.tol)
}

fn mesh_for(n: usize, path: Option<&Path>, common: &Common) -> Result<PolynomialMesh> {
    match path {
        Some(path) => {
            let config = io::read_points(io::open(path)?, path.display().to_string())?;
            Ok(PolynomialMesh::new(config, n, common.theta)?)
        }
        None => Ok(build_optimal_mesh(n, &policy(common)?)?),
    }
}

fn control(n: usize, common: &Common) -> Result<PointConfiguration> {
    let size = common.grid_size.map_or_else(|| default_control_size(n), |g| g as usize);
    Ok(control_grid(size)?)
}

#[derive(Serialize)]
struct MeshSummary {
    n: usize,
    #[serde(rename = "M_n")]
    m_n: usize,
    theta: f64,
    #[serde(rename = "C")]
    c: f64,
    alpha: f64,
    variant: CardinalityVariant,
    /// Euclidean covering radius estimated on the probe grid.
    eta_estimate: f64,
    eta_sqrt_m: f64,
    eta_geodesic: f64,
    /// Whether every probe point lies within θ/n of the mesh.
    dubiner_covered: bool,
    probe_size: usize,
}

pub fn gen_mesh(args: &GenMeshArgs) -> Result<()> {
    let common = &args.common;
    let policy = policy(common)?;
    let mesh = build_optimal_mesh(args.n, &policy)?;
    let probe_size = common.grid_size.map_or(100 * mesh.len(), |g| g as usize);
    let probe = zonal_equal_area_points(probe_size)?;
    let eta = covering_radius(&mesh.config, &probe);
    let summary = MeshSummary {
        n: args.n,
        m_n: mesh.len(),
        theta: mesh.theta,
        c: mesh.mesh_constant,
        alpha: policy.alpha,
        variant: policy.variant,
        eta_estimate: eta.euclidean,
        eta_sqrt_m: eta.euclidean * (mesh.len() as f64).sqrt(),
        eta_geodesic: eta.geodesic,
        dubiner_covered: eta.geodesic <= mesh.theta / args.n as f64,
        probe_size,
    };
    let mut out = Output::new(common)?;
    out.points("mesh", &mesh.config)?;
    out.report("summary", &summary)
}

pub fn compress(args: &CompressArgs) -> Result<()> {
    let common = &args.common;
    let mesh = mesh_for(args.n, args.mesh.as_deref(), common)?;
    let sub = extract_catch_submesh(&mesh, &catch_options(common))?;
    let bound = dimension(2 * args.n);
    if sub.cardinality() < bound {
        eprintln!("note: {} support points, strictly below dim P_2n = {bound}", sub.cardinality());
    }
    let mut out = Output::new(common)?;
    if common.out.is_some() {
        out.points("mesh", &mesh.config)?;
    }
    out.submesh("submesh", &sub)?;
    out.report("report", &sub.report())
}

#[derive(Serialize)]
struct FitOutput {
    #[serde(skip_serializing_if = "Option::is_none")]
    function: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    samples: Option<String>,
    #[serde(flatten)]
    report: FitReport,
}

fn methods(m: Method) -> Vec<FitMethod> {
    match m {
        Method::Full => vec![FitMethod::FullMeshLs],
        Method::Catch => vec![FitMethod::CatchWeightedLs],
        Method::Both => vec![FitMethod::FullMeshLs, FitMethod::CatchWeightedLs],
    }
}

/// Checks that samples were taken at the mesh points, in mesh order.
fn align(mesh: &PolynomialMesh, points: &[SpherePoint]) -> Result<()> {
    if points.len() != mesh.len() {
        return Err(Error::DimensionMismatch { expected: mesh.len(), got: points.len() }.into());
    }
    if let Some(i) = mesh.config.points().iter().zip(points).position(|(a, b)| a.chord(b) > ALIGNMENT_TOLERANCE) {
        return Err(Error::Format(format!("sample {i} is not taken at mesh point {i}")).into());
    }
    Ok(())
}

pub fn fit(args: &FitArgs) -> Result<()> {
    let common = &args.common;
    let n = args.n;
    let function = args.function.map(TestFunction::from_id).transpose()?;
    let mesh = mesh_for(n, args.mesh.as_deref(), common)?;
    let methods = methods(args.method);
    let sub = if methods.contains(&FitMethod::CatchWeightedLs) {
        Some(extract_catch_submesh(&mesh, &catch_options(common))?)
    } else {
        None
    };

    let values = match (&function, &args.samples) {
        (Some(f), _) => f.sample(&mesh.config),
        (None, Some(path)) => {
            let (points, values) = io::read_samples(io::open(path)?)?;
            align(&mesh, &points)?;
            values
        }
        (None, None) => return Err(CliError::Usage("either --f or --samples is required".into())),
    };
    let control = control(n, common)?;
    let unit = vec![1.0; mesh.len()];

    let mut out = Output::new(common)?;
    let mut reports = Vec::new();
    for method in methods {
        let (points, weights, samples) = match (method, &sub) {
            (FitMethod::CatchWeightedLs, Some(s)) => {
                (&s.points, s.weights.as_slice(), s.parent_indices.iter().map(|&i| values[i]).collect())
            }
            _ => (&mesh.config, unit.as_slice(), values.clone()),
        };
        let projector = LsProjector::new(points, weights, n)?;
        let c = projector.fit(&samples)?;
        let sup_error = match function {
            Some(f) => sup_error(&c, |p| f.eval(p), &control)?,
            // only the samples are known, so the error is measured at the sample points
            None => {
                evaluate_poly(&c, &mesh.config)?.iter().zip(&values).map(|(p, f)| (p - f).abs()).fold(0.0, f64::max)
            }
        };
        let catch = sub.as_ref().filter(|_| method == FitMethod::CatchWeightedLs);
        out.coefficients(&format!("coefficients_{method}"), &c)?;
        reports.push(FitOutput {
            function: function.map(|f| f.id()),
            samples: args.samples.as_ref().map(|p| p.display().to_string()),
            report: FitReport {
                n,
                method,
                sup_error,
                operator_norm: projector.operator_norm(&control)?,
                condition_estimate: projector.condition_estimate(),
                catch_cardinality: catch.map(CatchSubmesh::cardinality),
                compression_ratio: catch.map(CatchSubmesh::compression_ratio),
            },
        });
    }
    out.report("fit", &reports)
}

#[derive(Serialize)]
struct NormsReport {
    n: usize,
    #[serde(rename = "M_n")]
    m_n: usize,
    catch_cardinality: usize,
    lambda_mesh: f64,
    lambda_catch: f64,
    /// `C √M_n`, the a priori bound on both norms.
    bound: f64,
    control_size: usize,
}

pub fn norms(args: &NormsArgs) -> Result<()> {
    let common = &args.common;
    let mesh = mesh_for(args.n, args.mesh.as_deref(), common)?;
    let sub = extract_catch_submesh(&mesh, &catch_options(common))?;
    let control = control(args.n, common)?;
    let (full, weighted) = tables::projectors(&mesh, &sub)?;
    let report = NormsReport {
        n: args.n,
        m_n: mesh.len(),
        catch_cardinality: sub.cardinality(),
        lambda_mesh: full.operator_norm(&control)?,
        lambda_catch: weighted.operator_norm(&control)?,
        bound: mesh.mesh_constant * (mesh.len() as f64).sqrt(),
        control_size: control.len(),
    };
    Output::new(common)?.report("norms", &report)
}

#[derive(Serialize)]
struct PaduaSummary {
    n: usize,
    theta: f64,
    /// Padua degree `⌈πn/θ⌉`.
    nu: usize,
    cardinality: usize,
    #[serde(rename = "C")]
    c: f64,
    covering_radius: f64,
    radius_bound: f64,
    covered: bool,
    probe_size: usize,
}

pub fn padua(args: &PaduaArgs) -> Result<()> {
    let common = &args.common;
    let nu = padua_mesh_degree(args.n, common.theta)?;
    let set = padua_points(nu)?;
    let side = (common.grid_size.map_or(SQUARE_PROBE, |g| g as usize) as f64).sqrt().ceil().max(2.0) as usize;
    let probe = chebyshev_angle_grid(side);
    let radius = square_covering_radius(&set.points, &probe);
    let bound = common.theta / args.n as f64;
    let summary = PaduaSummary {
        n: args.n,
        theta: common.theta,
        nu,
        cardinality: set.len(),
        c: 1.0 / (1.0 - common.theta),
        covering_radius: radius,
        radius_bound: bound,
        covered: radius <= bound,
        probe_size: probe.len(),
    };
    let mut out = Output::new(common)?;
    out.square_points("padua", &set.points)?;
    out.report("summary", &summary)
}

pub fn reproduce_tables(args: &TablesArgs) -> Result<()> {
    let common = &args.common;
    let cfg = ExperimentConfig {
        policy: policy(common)?,
        catch: catch_options(common),
        control_size: common.grid_size.map(|g| g as usize),
        operator_norms: !args.no_norms,
        functions: TestFunction::ALL.to_vec(),
    };
    let mut table1 = Vec::new();
    let mut table2 = Vec::new();
    for &n in &args.degrees {
        eprintln!("degree {n}");
        let result = run_degree(n, &cfg)?;
        table1.push(Table1Row::from_result(&result));
        table2.extend(Table2Row::from_result(&result));
    }

    let mut out = Output::new(common)?;
    out.table("table1", &Table1Row::HEADER, &table1, |r, f| r.fields(f))?;
    out.table("table2", &Table2Row::HEADER, &table2, |r, f| r.fields(f))?;

    // Exact columns: mesh cardinality, and the compression ratio to the printed digit.
    let mut mismatches = Vec::new();
    for row in &table1 {
        if !row.card_mesh_matches() {
            mismatches.push(format!("n={}: mesh cardinality {} vs {:?}", row.n, row.card_mesh, row.ref_card_mesh));
        }
        if let Some(p) = row.ref_compression_ratio {
            if (row.compression_ratio - p).abs() > 0.05 {
                mismatches.push(format!("n={}: compression ratio {:.3} vs {p}", row.n, row.compression_ratio));
            }
        }
        if !row.catch_full {
            eprintln!("note: n={}: {} support points, strictly below dim P_2n", row.n, row.card_catch);
        }
    }
    if mismatches.is_empty() {
        Ok(())
    } else {
        Err(CliError::Check(format!("reference mismatch: {}", mismatches.join("; "))))
    }
}
