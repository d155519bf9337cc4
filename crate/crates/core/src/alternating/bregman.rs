use crate::error::{Error, Result};
use crate::geometry::{PointTime, ProjectableSet};
use crate::scalar::Scalar;

use super::config::ToleranceConfig;

/// Limit pair of Bregman's alternating projection between two sets.
#[derive(Debug, Clone, PartialEq)]
pub struct BregmanOutcome<T> {
    pub a_star: PointTime<T>,
    pub b_star: PointTime<T>,
    /// `||a_star - b_star||`: zero when the sets meet, their distance otherwise.
    pub distance: T,
    pub iterations: usize,
    /// `||a_n - b_n||` for every iteration.
    pub gaps: Vec<T>,
}

/// Alternates `a_n = P_A(b_{n-1})`, `b_n = P_B(a_n)` starting from `a_1 = P_A(p0)`.
///
/// Stops once two successive `b_n` are closer than `cfg.outer_tol`.
pub fn bregman_alternate<T, A, B>(
    set_a: &A,
    set_b: &B,
    p0: &PointTime<T>,
    cfg: &ToleranceConfig<T>,
) -> Result<BregmanOutcome<T>>
where
    T: Scalar,
    A: ProjectableSet<T> + ?Sized,
    B: ProjectableSet<T> + ?Sized,
{
    cfg.validate()?;
    if set_a.dim() != set_b.dim() || p0.dim() != set_a.dim() {
        return Err(Error::DimensionMismatch { expected: set_a.dim(), found: p0.dim().max(set_b.dim()) });
    }

    let mut gaps = Vec::new();
    let mut b_prev = p0.clone();
    let mut last_move = T::infinity();
    for n in 1..=cfg.max_outer_iters {
        let a = set_a.project(&b_prev)?;
        let b = set_b.project(&a)?;
        gaps.push(a.dist(&b));
        if n >= 2 {
            last_move = b.dist(&b_prev);
            if last_move < cfg.outer_tol {
                let distance = a.dist(&b);
                return Ok(BregmanOutcome { a_star: a, b_star: b, distance, iterations: n, gaps });
            }
        }
        b_prev = b;
    }
    Err(Error::NotConverged {
        routine: "bregman",
        iterations: cfg.max_outer_iters,
        residual: last_move.as_f64(),
        last: b_prev.to_f64_vec(),
    })
}
