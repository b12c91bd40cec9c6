use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use catchmesh::io::{self as cio, format_real};
use catchmesh::{CatchSubmesh, PointConfiguration, SquarePoint};
use serde::Serialize;

use crate::{CliError, Common, Format};

/// Where and how a command writes its results.
///
/// With a directory every artifact becomes a file named after its stem.
/// Without one, point sets and tables go to stdout and reports go to stderr,
/// unless the command produces only a report, which then goes to stdout.
pub struct Output {
    dir: Option<PathBuf>,
    format: Format,
    digits: Option<usize>,
    data_on_stdout: bool,
}

#[derive(Serialize)]
struct WeightedPoint {
    x: f64,
    y: f64,
    z: f64,
    w: f64,
}

impl Output {
    pub fn new(common: &Common) -> Result<Self, CliError> {
        if let Some(dir) = &common.out {
            fs::create_dir_all(dir)?;
        }
        Ok(Self {
            dir: common.out.clone(),
            format: common.format,
            digits: common.digits.map(|d| d as usize),
            data_on_stdout: false,
        })
    }

    fn data_sink(&mut self, stem: &str) -> Result<Box<dyn Write>, CliError> {
        let ext = match self.format {
            Format::Csv => "csv",
            Format::Json => "json",
        };
        match &self.dir {
            Some(dir) => Ok(Box::new(cio::create(dir.join(format!("{stem}.{ext}")))?)),
            None => {
                self.data_on_stdout = true;
                Ok(Box::new(io::stdout().lock()))
            }
        }
    }

    pub fn points(&mut self, stem: &str, config: &PointConfiguration) -> Result<(), CliError> {
        let sink = self.data_sink(stem)?;
        match self.format {
            Format::Csv => cio::write_points(sink, config, self.digits)?,
            Format::Json => cio::write_json(sink, &config.points())?,
        }
        Ok(())
    }

    pub fn submesh(&mut self, stem: &str, sub: &CatchSubmesh) -> Result<(), CliError> {
        let sink = self.data_sink(stem)?;
        match self.format {
            Format::Csv => cio::write_submesh(sink, sub, self.digits)?,
            Format::Json => {
                let rows: Vec<WeightedPoint> = sub
                    .output_order()
                    .into_iter()
                    .map(|i| {
                        let p = sub.points.points()[i];
                        WeightedPoint { x: p.x, y: p.y, z: p.z, w: sub.weights[i] }
                    })
                    .collect();
                cio::write_json(sink, &rows)?
            }
        }
        Ok(())
    }

    pub fn square_points(&mut self, stem: &str, points: &[SquarePoint]) -> Result<(), CliError> {
        let sink = self.data_sink(stem)?;
        match self.format {
            Format::Csv => cio::write_square_points(sink, points, self.digits)?,
            Format::Json => cio::write_json(sink, &points)?,
        }
        Ok(())
    }

    /// A table given both as CSV fields and as serializable records.
    pub fn table<T: Serialize>(
        &mut self,
        stem: &str,
        header: &[&str],
        records: &[T],
        fields: impl Fn(&T, &dyn Fn(f64) -> String) -> Vec<String>,
    ) -> Result<(), CliError> {
        let mut sink = self.data_sink(stem)?;
        match self.format {
            Format::Csv => {
                let digits = self.digits;
                let fmt = move |x: f64| format_real(x, digits);
                writeln!(sink, "{}", header.join(","))?;
                for r in records {
                    writeln!(sink, "{}", fields(r, &fmt).join(","))?;
                }
                sink.flush()?;
            }
            Format::Json => cio::write_json(sink, &records)?,
        }
        Ok(())
    }

    /// Coefficient table `l,m,c`; only written when an output directory is set.
    pub fn coefficients(&mut self, stem: &str, c: &catchmesh::HarmonicCoefficients) -> Result<(), CliError> {
        let Some(dir) = &self.dir else { return Ok(()) };
        let mut w = io::BufWriter::new(cio::create(dir.join(format!("{stem}.csv")))?);
        writeln!(w, "l,m,c")?;
        for (k, v) in c.coeffs.iter().enumerate() {
            let idx = catchmesh::BasisIndex::from_linear(k);
            writeln!(w, "{},{},{}", idx.l, idx.m, format_real(*v, self.digits))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn report<T: Serialize>(&mut self, stem: &str, value: &T) -> Result<(), CliError> {
        match &self.dir {
            Some(dir) => cio::write_json(cio::create(dir.join(format!("{stem}.json")))?, value)?,
            None if self.data_on_stdout => cio::write_json(io::stderr().lock(), value)?,
            None => cio::write_json(io::stdout().lock(), value)?,
        }
        Ok(())
    }
}
