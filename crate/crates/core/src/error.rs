use thiserror::Error;

/// Errors raised by the algebraic and numerical engines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("rank mismatch: expected {expected} components, found {found}")]
    RankMismatch { expected: usize, found: usize },

    #[error("coordinate {0} is zero; negative exponents are undefined there")]
    ZeroCoordinate(usize),

    #[error("direction vector must be nonzero")]
    ZeroDirection,

    #[error("polynomial must be nonzero")]
    ZeroPolynomial,

    #[error("Gröbner budget exceeded after {pairs} pairs: {reason}")]
    Budget { pairs: usize, reason: String },

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("sampling grid too coarse: phase step of {step:.3} turns at index {index}")]
    ResolutionTooCoarse { step: f64, index: usize },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
