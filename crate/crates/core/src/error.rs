//! Error types shared by every solver stage.

use thiserror::Error;

/// Errors produced by the solver pipeline.
#[derive(Debug, Error)]
pub enum FbError {
    /// A caller passed a non-finite number, an empty grid, reversed bounds
    /// or a similarly malformed argument.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Problem data violates a structural requirement (compatibility of
    /// u0 with f and beta, positivity, monotonicity).
    #[error("invalid data: {0}")]
    InvalidData(String),

    /// A quantity that must stay positive for the construction to make
    /// sense (the logarithm argument of the upper free boundary, C(t),
    /// the Hopf-Cole denominator) crossed zero at grid index `index`.
    #[error("horizon exceeded at t-index {index}: {what}")]
    HorizonExceeded { what: String, index: usize },

    /// A trace function h failed its positivity requirement.
    #[error("invalid trace: {0}")]
    InvalidTrace(String),

    /// A field function failed a requirement (u must stay positive for
    /// the hodograph map).
    #[error("invalid field: {0}")]
    InvalidField(String),

    /// A field evaluation was requested outside [y0(t), y1(t)].
    #[error("point ({y}, {t}) outside the moving domain [{lo}, {hi}]")]
    OutOfDomain { y: f64, t: f64, lo: f64, hi: f64 },

    /// A kernel or integrand evaluated to a non-finite number.
    #[error("numerical failure: {what} at t-index {index}")]
    NumericalFailure { what: String, index: usize },

    /// An iteration ran out of its budget. The residual history is kept
    /// so callers can report it.
    #[error("{what} did not converge after {iterations} iterations (last residual {last:e})")]
    NonConvergence {
        what: String,
        iterations: usize,
        last: f64,
        history: Vec<f64>,
    },

    /// A manufactured solution handed to the verification harness does
    /// not satisfy the heat equation.
    #[error("invalid manufactured solution: {0}")]
    InvalidManufactured(String),
}

pub type Result<T> = std::result::Result<T, FbError>;
