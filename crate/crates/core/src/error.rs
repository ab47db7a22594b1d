//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("input schema error: missing column(s) {missing:?}")]
    Schema { missing: Vec<String> },

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("zero-variance sample: standardization is undefined")]
    ZeroVariance,

    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("insufficient tail: {n_tail} value(s) at or above the cutoff, need at least {min}")]
    InsufficientTail { n_tail: usize, min: usize },

    #[error("divergent estimate: all tail values equal the cutoff")]
    DivergentEstimate,

    #[error("rank range error: top_k = {top_k} but sample has {n} value(s)")]
    RankRange { top_k: usize, n: usize },

    #[error("cutoff mismatch: tail cutoff {cutoff} differs from distribution lower bound {x_min}")]
    CutoffMismatch { cutoff: f64, x_min: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("infeasible constraint: target mean {target} outside the open level range ({min}, {max})")]
    Infeasible { target: f64, min: f64, max: f64 },

    #[error("solver failure: {0}")]
    SolverFailure(String),

    #[error("invalid probability vector: {0}")]
    InvalidProbabilities(String),

    #[error("{series}: {source}")]
    Series {
        series: &'static str,
        source: Box<Error>,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Whether the error stems from unusable input rather than a failed computation.
    pub fn is_input_error(&self) -> bool {
        match self {
            Error::Schema { .. } | Error::EmptyInput(_) | Error::Csv(_) | Error::Io(_) => true,
            Error::Series { source, .. } => source.is_input_error(),
            _ => false,
        }
    }
}
