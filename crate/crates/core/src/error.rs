use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("tensor is not symmetric: orbit {orbit:?} deviates by {deviation:e} (tolerance {tolerance:e})")]
    NotSymmetric {
        orbit: Vec<usize>,
        deviation: f64,
        tolerance: f64,
    },

    #[error("matrix is not orthonormal: residual {residual:e}")]
    NotOrthonormal { residual: f64 },

    #[error("precondition violated: {what} (residual {residual:e})")]
    Precondition { what: &'static str, residual: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("numerical breakdown: {0}")]
    Breakdown(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
