use crate::error::{Error, Result};
use crate::geometry::{PointTime, ProjectableSet};
use crate::scalar::Scalar;
use crate::trace::{ResetFlag, StepRecord};

use super::config::ToleranceConfig;

/// One Dykstra update against a single set.
///
/// Projects `incoming - increment` and returns the projection together with
/// the new increment `projection - (incoming - increment)`.
pub fn dykstra_update<T: Scalar, S: ProjectableSet<T> + ?Sized>(
    set: &S,
    incoming: &PointTime<T>,
    increment: &PointTime<T>,
) -> Result<(PointTime<T>, PointTime<T>)> {
    let shifted = incoming - increment;
    let projected = set.project(&shifted)?;
    let next_increment = &projected - &shifted;
    Ok((projected, next_increment))
}

/// Which part of the iterate the cycle-to-cycle stopping test measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopMetric {
    /// The full `(x, t)` point.
    Full,
    /// The spatial coordinates only.
    Spatial,
}

impl StopMetric {
    pub(crate) fn dist<T: Scalar>(self, a: &PointTime<T>, b: &PointTime<T>) -> T {
        match self {
            StopMetric::Full => a.dist(b),
            StopMetric::Spatial => a.spatial_dist(b),
        }
    }
}

/// Iterate and per-set increments of Dykstra's cyclic projection.
#[derive(Debug, Clone, PartialEq)]
pub struct DykstraState<T> {
    pub iterate: PointTime<T>,
    /// One increment per set, all zero initially.
    pub increments: Vec<PointTime<T>>,
    pub cycle_count: usize,
}

impl<T: Scalar> DykstraState<T> {
    pub fn new(p0: PointTime<T>, num_sets: usize) -> Self {
        let zero = PointTime::zeros(p0.dim());
        Self { iterate: p0, increments: vec![zero; num_sets], cycle_count: 0 }
    }

    /// Runs one full cycle over `sets` in the given order and returns the
    /// largest change of any increment.
    pub fn cycle<S: ProjectableSet<T>>(&mut self, sets: &[S], order: &[usize]) -> Result<T> {
        self.cycle_recorded(sets, order, 0, None)
    }

    fn cycle_recorded<S: ProjectableSet<T>>(
        &mut self,
        sets: &[S],
        order: &[usize],
        cycle_offset: usize,
        mut sink: Option<&mut Vec<StepRecord<T>>>,
    ) -> Result<T> {
        let flag = if self.cycle_count == 0 { ResetFlag::Reset } else { ResetFlag::Preserve };
        let mut max_change = T::zero();
        for &i in order {
            let (projected, increment) = dykstra_update(&sets[i], &self.iterate, &self.increments[i])?;
            max_change = max_change.max(increment.dist(&self.increments[i]));
            if let Some(sink) = sink.as_deref_mut() {
                sink.push(StepRecord {
                    cycle: cycle_offset + self.cycle_count + 1,
                    agent_id: i + 1,
                    guess: projected.clone(),
                    increment_norm: increment.norm(),
                    flag,
                    bregman_event: false,
                });
            }
            self.increments[i] = increment;
            self.iterate = projected;
        }
        self.cycle_count += 1;
        Ok(max_change)
    }

    /// Cycles until two consecutive cycle-end iterates are closer than
    /// `cfg.err` under `metric` and no increment moved by `cfg.err` or more.
    ///
    /// The increment test matters: the iterate can repeat exactly for several
    /// cycles while the increments are still being built up.
    pub(crate) fn run<S: ProjectableSet<T>>(
        &mut self,
        sets: &[S],
        order: &[usize],
        cfg: &ToleranceConfig<T>,
        metric: StopMetric,
        cycle_offset: usize,
        mut sink: Option<&mut Vec<StepRecord<T>>>,
    ) -> Result<()> {
        let mut residual = T::infinity();
        while self.cycle_count < cfg.max_inner_cycles {
            let previous = self.iterate.clone();
            let change = self.cycle_recorded(sets, order, cycle_offset, sink.as_deref_mut())?;
            if self.cycle_count >= 2 {
                residual = metric.dist(&previous, &self.iterate).max(change);
                if residual < cfg.err {
                    return Ok(());
                }
            }
        }
        Err(Error::NotConverged {
            routine: "dykstra",
            iterations: self.cycle_count,
            residual: residual.as_f64(),
            last: self.iterate.to_f64_vec(),
        })
    }
}

pub(crate) fn check_sets<T: Scalar, S: ProjectableSet<T>>(sets: &[S], p0: &PointTime<T>) -> Result<()> {
    if sets.is_empty() {
        return Err(Error::InvalidParameter("need at least one set".into()));
    }
    if !p0.is_finite() {
        return Err(Error::NonFinite("starting point"));
    }
    for s in sets {
        if s.dim() != p0.dim() {
            return Err(Error::DimensionMismatch { expected: s.dim(), found: p0.dim() });
        }
    }
    Ok(())
}

/// Approximates the projection of `p0` onto the intersection of `sets` with
/// Dykstra's cyclic method, visiting the sets in list order.
///
/// Fails with [`Error::NotConverged`] when `cfg.max_inner_cycles` is reached,
/// which usually means the intersection is empty or badly conditioned.
pub fn dykstra_project<T: Scalar, S: ProjectableSet<T>>(
    sets: &[S],
    p0: &PointTime<T>,
    cfg: &ToleranceConfig<T>,
) -> Result<PointTime<T>> {
    cfg.validate()?;
    check_sets(sets, p0)?;
    let order: Vec<usize> = (0..sets.len()).collect();
    let mut state = DykstraState::new(p0.clone(), sets.len());
    state.run(sets, &order, cfg, StopMetric::Full, 0, None)?;
    Ok(state.iterate)
}

/// The intersection of several sets, projected onto with [`dykstra_project`].
#[derive(Debug, Clone)]
pub struct Intersection<'a, T, S> {
    pub sets: &'a [S],
    pub cfg: ToleranceConfig<T>,
}

impl<'a, T: Scalar, S: ProjectableSet<T>> Intersection<'a, T, S> {
    pub fn new(sets: &'a [S], cfg: ToleranceConfig<T>) -> Self {
        Self { sets, cfg }
    }
}

impl<T: Scalar, S: ProjectableSet<T>> ProjectableSet<T> for Intersection<'_, T, S> {
    fn dim(&self) -> usize {
        self.sets.first().map_or(0, |s| s.dim())
    }

    fn contains(&self, p: &PointTime<T>, tol: T) -> Result<bool> {
        for s in self.sets {
            if !s.contains(p, tol)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn project(&self, p: &PointTime<T>) -> Result<PointTime<T>> {
        dykstra_project(self.sets, p, &self.cfg)
    }
}
