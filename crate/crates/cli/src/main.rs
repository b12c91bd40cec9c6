mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use catchmesh::CardinalityVariant;
use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

/// Polynomial meshes on the sphere, CATCH compression and least-squares fitting.
#[derive(Debug, Parser)]
#[command(name = "catchmesh", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate the zonal equal-area polynomial mesh of degree n.
    GenMesh(GenMeshArgs),
    /// Extract the CATCH submesh (exact for degree 2n) of a mesh.
    Compress(CompressArgs),
    /// Least-squares fit of a test function or sampled data.
    Fit(FitArgs),
    /// Least-squares operator norms of the mesh and its CATCH submesh.
    Norms(NormsArgs),
    /// Padua-point optimal mesh of the square.
    Padua(PaduaArgs),
    /// Recompute the mesh/submesh statistics and reconstruction-error tables.
    ReproduceTables(TablesArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Full,
    Catch,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Variant {
    Table1,
    Prop2,
}

impl From<Variant> for CardinalityVariant {
    fn from(v: Variant) -> Self {
        match v {
            Variant::Table1 => CardinalityVariant::Tabulated,
            Variant::Prop2 => CardinalityVariant::Sufficient,
        }
    }
}

/// Options shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Norming parameter θ in (0, 1); the mesh constant is 1/(1−θ).
    #[arg(long, default_value_t = 0.5, value_parser = unit_interval)]
    pub theta: f64,
    /// Covering constant α.
    #[arg(long, default_value_t = 3.5, value_parser = positive)]
    pub alpha: f64,
    /// Mesh cardinality rule.
    #[arg(long, value_enum, default_value_t = Variant::Table1)]
    pub variant: Variant,
    /// Relative NNLS stopping tolerance.
    #[arg(long, default_value_t = 1e-10, value_parser = positive)]
    pub tol: f64,
    /// Size of the control (or probe) grid; each command has its own default.
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
    pub grid_size: Option<u64>,
    /// Seed for randomized checks.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory; without it, data goes to stdout and reports to stderr.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Format of point sets and tables.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Significant digits for reals in CSV output (default: full precision).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..=17))]
    pub digits: Option<u64>,
}

#[derive(Debug, Args)]
pub struct GenMeshArgs {
    /// Polynomial degree (≥ 1).
    #[arg(long, value_parser = degree)]
    pub n: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct CompressArgs {
    /// Polynomial degree (≥ 1); the submesh is exact for degree 2n.
    #[arg(long, value_parser = degree)]
    pub n: usize,
    /// Load the mesh from an `x,y,z` CSV instead of generating it.
    #[arg(long)]
    pub mesh: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Polynomial degree (≥ 1).
    #[arg(long, value_parser = degree)]
    pub n: usize,
    /// Test function id: 1 polynomial, 2 exponential, 3 absolute sum.
    #[arg(long = "f", conflicts_with = "samples", required_unless_present = "samples")]
    pub function: Option<u32>,
    /// Samples `x,y,z,f` taken at the mesh points, in mesh order.
    #[arg(long)]
    pub samples: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Method::Both)]
    pub method: Method,
    /// Load the mesh from an `x,y,z` CSV instead of generating it.
    #[arg(long)]
    pub mesh: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct NormsArgs {
    /// Polynomial degree (≥ 1).
    #[arg(long, value_parser = degree)]
    pub n: usize,
    #[arg(long)]
    pub mesh: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct PaduaArgs {
    /// Polynomial degree (≥ 1).
    #[arg(long, value_parser = degree)]
    pub n: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct TablesArgs {
    /// Degrees to run.
    #[arg(long, value_delimiter = ',', value_parser = degree, default_values_t = catchmesh::tables::TABLE_DEGREES)]
    pub degrees: Vec<usize>,
    /// Skip the operator norms (the slowest columns).
    #[arg(long)]
    pub no_norms: bool,
    #[command(flatten)]
    pub common: Common,
}

fn degree(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if n >= 1 => Ok(n),
        Ok(_) => Err("degree must be at least 1".into()),
        Err(e) => Err(e.to_string()),
    }
}

fn unit_interval(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(t) if t > 0.0 && t < 1.0 => Ok(t),
        Ok(t) => Err(format!("{t} is not in (0, 1)")),
        Err(e) => Err(e.to_string()),
    }
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(t) if t > 0.0 && t.is_finite() => Ok(t),
        Ok(t) => Err(format!("{t} is not positive")),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] catchmesh::Error),
    #[error("{0}")]
    Check(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Check(_) => 3,
            CliError::Core(e) if e.is_numerical() => 3,
            CliError::Core(e) if e.is_io() || matches!(e, catchmesh::Error::Json(_)) => 4,
            CliError::Core(_) => 2,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Core(e.into())
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("CATCHMESH_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t >= 1)
        .ok_or_else(|| CliError::Usage(format!("CATCHMESH_THREADS must be a positive integer, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().map_err(|e| CliError::Usage(e.to_string()))
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    match cli.command {
        Command::GenMesh(args) => commands::gen_mesh(&args),
        Command::Compress(args) => commands::compress(&args),
        Command::Fit(args) => commands::fit(&args),
        Command::Norms(args) => commands::norms(&args),
        Command::Padua(args) => commands::padua(&args),
        Command::ReproduceTables(args) => commands::reproduce_tables(&args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
