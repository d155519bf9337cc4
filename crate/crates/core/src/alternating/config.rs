use crate::error::{Error, Result};
use crate::scalar::{tol_floor, Scalar};

/// Stopping thresholds and iteration caps for the centralized solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceConfig<T> {
    /// Cycle-to-cycle movement below which the inner Dykstra loop stops.
    pub err: T,
    /// Movement of the plane-side point below which the outer loop stops.
    pub outer_tol: T,
    pub max_inner_cycles: usize,
    pub max_outer_iters: usize,
}

impl<T: Scalar> Default for ToleranceConfig<T> {
    fn default() -> Self {
        Self { err: tol_floor(1e-7), outer_tol: tol_floor(1e-6), max_inner_cycles: 10_000, max_outer_iters: 500 }
    }
}

impl<T: Scalar> ToleranceConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.err > T::zero()) || !(self.outer_tol > T::zero()) {
            return Err(Error::InvalidParameter("tolerances must be positive".into()));
        }
        if self.max_inner_cycles == 0 || self.max_outer_iters == 0 {
            return Err(Error::InvalidParameter("iteration caps must be >= 1".into()));
        }
        Ok(())
    }
}
