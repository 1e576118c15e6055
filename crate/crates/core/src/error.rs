use thiserror::Error;

/// Errors produced by the simulation library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimension {0}: SU(n) requires n >= 2")]
    InvalidDimension(usize),

    #[error("unsupported dimension {0}: eigendecomposition is implemented for n <= 4")]
    UnsupportedDimension(usize),

    #[error("non-finite matrix entry")]
    NonFinite,

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("gauge matrix {index} is not in SL(n,C): |det - 1| = {deviation:e}")]
    NotUnitDeterminant { index: usize, deviation: f64 },

    #[error("drift evaluated at a singular point (x = {x}, y = {y})")]
    Singular { x: f64, y: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
