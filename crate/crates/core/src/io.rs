//! Flat-file formats: point sets and submeshes as CSV, reports as JSON.
//!
//! Reals are written with 17 significant digits, so a file read back yields
//! bit-identical values.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use serde::Serialize;

use crate::catch::CatchSubmesh;
use crate::error::{Error, Result};
use crate::padua::SquarePoint;
use crate::sphere::{PointConfiguration, SpherePoint};

/// Formats `x` with `digits` significant digits (17 when `None`).
pub fn format_real(x: f64, digits: Option<usize>) -> String {
    let digits = digits.unwrap_or(17).max(1);
    format!("{:.*e}", digits - 1, x)
}

fn check_header(reader: &mut csv::Reader<impl Read>, expected: &[&str]) -> Result<()> {
    let header = reader.headers()?;
    let got: Vec<&str> = header.iter().map(str::trim).collect();
    if got != expected {
        return Err(Error::Format(format!("expected header {}, found {}", expected.join(","), got.join(","))));
    }
    Ok(())
}

fn parse_rows(input: impl Read, expected: &[&str]) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    check_header(&mut reader, expected)?;
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() != expected.len() {
            return Err(Error::Format(format!("row {}: expected {} fields", line + 1, expected.len())));
        }
        let row = record
            .iter()
            .map(|field| field.parse::<f64>().map_err(|e| Error::Format(format!("row {}: {e}", line + 1))))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

fn sphere_point(row: &[f64]) -> SpherePoint {
    SpherePoint { x: row[0], y: row[1], z: row[2] }
}

pub fn write_points(out: impl Write, config: &PointConfiguration, digits: Option<usize>) -> Result<()> {
    let mut w = BufWriter::new(out);
    writeln!(w, "x,y,z")?;
    for p in config.points() {
        writeln!(w, "{},{},{}", format_real(p.x, digits), format_real(p.y, digits), format_real(p.z, digits))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads an `x,y,z` file; points must be unit vectors and pairwise distinct.
pub fn read_points(input: impl Read, label: impl Into<String>) -> Result<PointConfiguration> {
    let rows = parse_rows(input, &["x", "y", "z"])?;
    PointConfiguration::new(rows.iter().map(|r| sphere_point(r)).collect(), label)
}

/// Writes `x,y,z,w` rows in [`CatchSubmesh::output_order`].
pub fn write_submesh(out: impl Write, sub: &CatchSubmesh, digits: Option<usize>) -> Result<()> {
    let mut w = BufWriter::new(out);
    writeln!(w, "x,y,z,w")?;
    for i in sub.output_order() {
        let p = sub.points.points()[i];
        writeln!(
            w,
            "{},{},{},{}",
            format_real(p.x, digits),
            format_real(p.y, digits),
            format_real(p.z, digits),
            format_real(sub.weights[i], digits)
        )?;
    }
    w.flush()?;
    Ok(())
}

/// Reads an `x,y,z,w` file into points and weights.
pub fn read_weighted_points(input: impl Read, label: impl Into<String>) -> Result<(PointConfiguration, Vec<f64>)> {
    let rows = parse_rows(input, &["x", "y", "z", "w"])?;
    let config = PointConfiguration::new(rows.iter().map(|r| sphere_point(r)).collect(), label)?;
    Ok((config, rows.iter().map(|r| r[3]).collect()))
}

/// Reads an `x,y,z,f` samples file.
pub fn read_samples(input: impl Read) -> Result<(Vec<SpherePoint>, Vec<f64>)> {
    let rows = parse_rows(input, &["x", "y", "z", "f"])?;
    Ok((rows.iter().map(|r| sphere_point(r)).collect(), rows.iter().map(|r| r[3]).collect()))
}

pub fn write_samples(out: impl Write, points: &[SpherePoint], values: &[f64], digits: Option<usize>) -> Result<()> {
    if points.len() != values.len() {
        return Err(Error::DimensionMismatch { expected: points.len(), got: values.len() });
    }
    let mut w = BufWriter::new(out);
    writeln!(w, "x,y,z,f")?;
    for (p, f) in points.iter().zip(values) {
        writeln!(
            w,
            "{},{},{},{}",
            format_real(p.x, digits),
            format_real(p.y, digits),
            format_real(p.z, digits),
            format_real(*f, digits)
        )?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_square_points(out: impl Write, points: &[SquarePoint], digits: Option<usize>) -> Result<()> {
    let mut w = BufWriter::new(out);
    writeln!(w, "u,v")?;
    for p in points {
        writeln!(w, "{},{}", format_real(p.u, digits), format_real(p.v, digits))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_square_points(input: impl Read) -> Result<Vec<SquarePoint>> {
    parse_rows(input, &["u", "v"])?.iter().map(|r| SquarePoint::new(r[0], r[1])).collect()
}

pub fn write_json<T: Serialize>(out: impl Write, value: &T) -> Result<()> {
    let mut w = BufWriter::new(out);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

pub fn create(path: impl AsRef<Path>) -> Result<File> {
    Ok(File::create(path)?)
}

pub fn open(path: impl AsRef<Path>) -> Result<File> {
    Ok(File::open(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::zonal_equal_area_points;

    #[test]
    fn seventeen_digits() {
        assert_eq!(format_real(0.1, None), "1.0000000000000001e-1");
        assert_eq!(format_real(-2.5, Some(3)), "-2.50e0");
        assert_eq!(format_real(1.0 / 3.0, None).parse::<f64>().unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn points_roundtrip_bitwise() {
        let cfg = zonal_equal_area_points(500).unwrap();
        let mut buf = Vec::new();
        write_points(&mut buf, &cfg, None).unwrap();
        let back = read_points(buf.as_slice(), cfg.label()).unwrap();
        assert_eq!(back, cfg);
        let mut again = Vec::new();
        write_points(&mut again, &back, None).unwrap();
        assert_eq!(buf, again);
    }

    #[test]
    fn rejects_non_unit_and_bad_header() {
        let text = "x,y,z\n1,0,0\n0.5,0.5,0\n";
        assert!(matches!(read_points(text.as_bytes(), "t"), Err(Error::NotUnit { index: 1, .. })));
        let text = "a,b,c\n1,0,0\n";
        assert!(matches!(read_points(text.as_bytes(), "t"), Err(Error::Format(_))));
        let text = "x,y,z\n1,0,zero\n";
        assert!(matches!(read_points(text.as_bytes(), "t"), Err(Error::Format(_))));
    }

    #[test]
    fn square_points_roundtrip() {
        let pts = vec![SquarePoint::new(0.25, -1.0).unwrap(), SquarePoint::from_angles(0.3, 2.0)];
        let mut buf = Vec::new();
        write_square_points(&mut buf, &pts, None).unwrap();
        assert_eq!(read_square_points(buf.as_slice()).unwrap(), pts);
    }
}
