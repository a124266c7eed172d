use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("shape error: {0}")]
    Shape(String),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("matrix is not Hermitian (max asymmetry {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPositive(f64),

    #[error("trace is {0}, expected 1")]
    BadTrace(f64),

    #[error("invalid probability vector: {0}")]
    InvalidDistribution(String),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("letter {letter}: n*p = {value} is not an integer")]
    NonIntegralComposition { letter: usize, value: f64 },

    #[error("states do not commute (commutator norm {0:.3e})")]
    NonCommuting(f64),

    #[error("problem too large: {0}")]
    TooLarge(String),

    #[error("degenerate model: {0}")]
    Degenerate(String),

    #[error("solver did not converge: {0}")]
    NoConvergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;
