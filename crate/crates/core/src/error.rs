use thiserror::Error;

use crate::nnls::NnlsSolution;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("point {index} is not on the unit sphere (|p| - 1 = {deviation:e})")]
    NotUnit { index: usize, deviation: f64 },

    #[error("points {first} and {second} coincide")]
    DuplicatePoint { first: usize, second: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite value in input")]
    NonFinite,

    #[error("rank deficient least-squares matrix (|r_kk| ratio {ratio:e}); the point set is not determining for degree {degree}")]
    RankDeficient { degree: usize, ratio: f64 },

    #[error("nothing to compress: {cardinality} points do not exceed dim P_2n = {dimension}")]
    NoCompression { cardinality: usize, dimension: usize },

    #[error("NNLS did not converge in {iterations} iterations")]
    NnlsNotConverged { iterations: usize, best: Box<NnlsSolution> },

    #[error("unknown test function id {0} (expected 1, 2 or 3)")]
    UnknownFunction(u32),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("malformed input: {0}")]
    Format(String),
}

impl Error {
    /// True for failures of a numerical algorithm, as opposed to bad input or I/O.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::RankDeficient { .. } | Error::NnlsNotConverged { .. } | Error::NoCompression { .. })
    }

    pub fn is_io(&self) -> bool {
        match self {
            Error::Io(_) => true,
            Error::Csv(e) => e.is_io_error(),
            _ => false,
        }
    }
}
