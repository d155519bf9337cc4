use crate::error::{Error, Result};
use crate::geometry::{HorizontalHyperplane, PointTime, ProjectableSet};
use crate::scalar::Scalar;
use crate::trace::{BregmanRecord, StepRecord};

use super::config::ToleranceConfig;
use super::dykstra::{check_sets, DykstraState, StopMetric};

/// Result of a min-max solve, from either the centralized or the ring solver.
#[derive(Debug, Clone, PartialEq)]
pub struct MinMaxSolution<T> {
    pub x_star: Vec<T>,
    /// Height of the final intersection-side point.
    pub t_star: T,
    /// Final distance between the intersection-side and plane-side points.
    pub distance: T,
    pub inner_cycles_total: usize,
    pub outer_iters: usize,
    /// Set when the final distance is within `outer_tol`, i.e. the plane was
    /// not strictly below the intersection.
    pub touches_plane: bool,
    pub trace: Vec<BregmanRecord<T>>,
}

/// The visiting order used by both solvers: sets `2, ..., N`, then set 1.
///
/// Set 1 belongs to the coordinator, which closes every cycle.
pub fn ring_order(n: usize) -> Vec<usize> {
    (1..n).chain(std::iter::once(0)).take(n).collect()
}

/// Centroid of the anchors, lifted to height `t_min + 1`.
pub fn centroid_start<T: Scalar>(anchors: &[Vec<T>], t_min: T) -> Result<PointTime<T>> {
    let first = anchors.first().ok_or_else(|| Error::InvalidParameter("no anchors".into()))?;
    let mut c = vec![T::zero(); first.len()];
    for a in anchors {
        if a.len() != c.len() {
            return Err(Error::DimensionMismatch { expected: c.len(), found: a.len() });
        }
        for (ci, ai) in c.iter_mut().zip(a) {
            *ci += *ai;
        }
    }
    let n = T::lit(anchors.len() as f64);
    PointTime::new(c.into_iter().map(|v| v / n).collect(), t_min + T::one())
}

/// Lowest point of the intersection of `epigraphs`, found by alternating
/// between the intersection (projected onto with Dykstra) and `plane`.
pub fn solve_minmax<T: Scalar, S: ProjectableSet<T>>(
    epigraphs: &[S],
    plane: &HorizontalHyperplane<T>,
    p0: &PointTime<T>,
    cfg: &ToleranceConfig<T>,
) -> Result<MinMaxSolution<T>> {
    solve(epigraphs, plane, p0, cfg, None)
}

/// Like [`solve_minmax`], also recording every projection step into `sink`.
///
/// Records are appended even when the solve fails.
pub fn solve_minmax_traced<T: Scalar, S: ProjectableSet<T>>(
    epigraphs: &[S],
    plane: &HorizontalHyperplane<T>,
    p0: &PointTime<T>,
    cfg: &ToleranceConfig<T>,
    sink: &mut Vec<StepRecord<T>>,
) -> Result<MinMaxSolution<T>> {
    solve(epigraphs, plane, p0, cfg, Some(sink))
}

fn solve<T: Scalar, S: ProjectableSet<T>>(
    epigraphs: &[S],
    plane: &HorizontalHyperplane<T>,
    p0: &PointTime<T>,
    cfg: &ToleranceConfig<T>,
    mut sink: Option<&mut Vec<StepRecord<T>>>,
) -> Result<MinMaxSolution<T>> {
    cfg.validate()?;
    check_sets(epigraphs, p0)?;
    if plane.dim() != p0.dim() {
        return Err(Error::DimensionMismatch { expected: plane.dim(), found: p0.dim() });
    }

    let order = ring_order(epigraphs.len());
    let mut start = p0.clone();
    let mut prev_b: Option<PointTime<T>> = None;
    let mut trace = Vec::new();
    let mut cycles_total = 0;
    let mut last_move = T::infinity();

    for outer in 1..=cfg.max_outer_iters {
        let mut state = DykstraState::new(start, epigraphs.len());
        let run = state.run(epigraphs, &order, cfg, StopMetric::Spatial, cycles_total, sink.as_deref_mut());
        cycles_total += state.cycle_count;
        run?;
        if let Some(last) = sink.as_deref_mut().and_then(|s| s.last_mut()) {
            last.bregman_event = true;
        }

        let a = state.iterate;
        let b = plane.project(&a)?;
        let gap = a.dist(&b);
        trace.push(BregmanRecord {
            outer_iter: outer,
            inner_cycles: state.cycle_count,
            a: a.clone(),
            b: b.clone(),
            gap,
        });

        if let Some(pb) = &prev_b {
            last_move = b.dist(pb);
            if last_move < cfg.outer_tol {
                return Ok(MinMaxSolution {
                    x_star: a.x.clone(),
                    t_star: a.t,
                    distance: gap,
                    inner_cycles_total: cycles_total,
                    outer_iters: outer,
                    touches_plane: gap <= cfg.outer_tol,
                    trace,
                });
            }
        }
        prev_b = Some(b.clone());
        start = b;
    }
    Err(Error::NotConverged {
        routine: "bregman",
        iterations: cfg.max_outer_iters,
        residual: last_move.as_f64(),
        last: start.to_f64_vec(),
    })
}
