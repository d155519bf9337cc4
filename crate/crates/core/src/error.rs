use thiserror::Error;

/// Errors raised by projections, solvers and the consensus application.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An iterative routine hit its cap. `last` is the final iterate as
    /// `[x..., height]` and `residual` the quantity that failed to settle.
    #[error("{routine} did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged { routine: &'static str, iterations: usize, residual: f64, last: Vec<f64> },

    #[error("projection left the function domain at {0:?}")]
    OutsideDomain(Vec<f64>),

    #[error("infeasible: {0}")]
    Infeasible(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
