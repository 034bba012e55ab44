use thiserror::Error;

/// Errors raised by model construction, operator assembly and zeta evaluation.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("nearest-neighbour constraint violated: entry (row {row}, col {col}) = {value} must be zero")]
    ConstraintViolation { row: usize, col: usize, value: String },

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("dimension mismatch: expected length {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("N = {n_sites} exceeds the dense cap of {cap} sites")]
    SizeExceeded { n_sites: usize, cap: usize },

    #[error("eigensolver did not converge within {budget} QR iterations")]
    ConvergenceFailure { budget: usize },

    #[error("zeta factor is singular at u = {u}: |1 - u*lambda| = {distance:e}")]
    SingularAtU { u: String, distance: f64 },

    #[error("operator kind mismatch: {0}")]
    KindMismatch(String),

    #[error("state invariant drifted: {what} off by {error:e} (threshold {threshold:e})")]
    InvariantDrift { what: String, error: f64, threshold: f64 },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
