use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid interval: lower bound {lo} is not below upper bound {hi}")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("invalid parameter `{name}` = {value}")]
    InvalidParameter { name: &'static str, value: f64 },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("shrinkage found no point inside the slice after {proposals} proposals")]
    ShrinkStall { proposals: usize },

    #[error("every state in the window around {x} has zero mass")]
    EmptyWindow { x: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("series too short: need at least {needed} values, got {got}")]
    SeriesTooShort { needed: usize, got: usize },

    #[error("series is constant; autocorrelation is undefined")]
    DegenerateSeries,

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("data format: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, value: impl Into<f64>) -> Self {
        Error::InvalidParameter {
            name,
            value: value.into(),
        }
    }
}
