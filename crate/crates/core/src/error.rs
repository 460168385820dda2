use thiserror::Error;

/// Errors raised by the core algorithms.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoreError {
    #[error("invalid eigen range [{a}, {b}]: {reason}")]
    InvalidRange { a: f64, b: f64, reason: &'static str },

    #[error("non-finite value encountered in {0}")]
    NonFiniteValue(&'static str),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionError { expected: usize, got: usize },

    #[error("matrix is not symmetric (relative asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("point is not a fixed point (residual {0:e})")]
    NotAFixedPoint(f64),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("zero diagonal entry at index {0}")]
    SingularDiagonal(usize),

    #[error("degenerate operator: {0}")]
    DegenerateOperator(&'static str),

    #[error("point outside the map domain: {0}")]
    DomainError(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
