use thiserror::Error;

/// Failures shared by every numerical routine in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite value {value} at t = {at}")]
    Domain { at: f64, value: f64 },

    #[error("divergence: {0}")]
    Divergence(String),

    #[error("no sign change on [{lower}, {upper}]")]
    Bracket { lower: f64, upper: f64 },

    #[error("density has zero total mass")]
    DegenerateDensity,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("out of range: {0}")]
    Range(String),
}

pub type Result<T> = std::result::Result<T, Error>;
