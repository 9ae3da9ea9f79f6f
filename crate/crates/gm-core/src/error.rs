use thiserror::Error;

/// Errors raised by model construction and evaluation.
#[derive(Debug, Clone, Error)]
pub enum GmError {
    #[error("dimension mismatch: {context} (expected {expected}, got {got})")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("{context}: matrix is not symmetric within {tol:e}")]
    NotSymmetric { context: &'static str, tol: f64 },

    #[error("{context}: matrix is not positive definite")]
    NotPositiveDefinite { context: &'static str },

    #[error("{context}: diagonal entry {index} is {value} but the floor is {floor}")]
    BelowFloor {
        context: &'static str,
        index: usize,
        value: f64,
        floor: f64,
    },

    #[error("{context}: value is not finite")]
    NonFinite { context: &'static str },

    #[error("{context}: expected a diagonal matrix")]
    NotDiagonal { context: &'static str },

    #[error("finite-difference oracle: {0}")]
    OracleFailure(&'static str),
}
