use crate::alternating::{centroid_start, solve_minmax_traced, MinMaxSolution, ToleranceConfig};
use crate::error::{Error, Result};
use crate::geometry::HorizontalHyperplane;
use crate::ring::{run_ring_traced, AgentNode, ResetPolicy, RingConfig};
use crate::scalar::Scalar;
use crate::trace::StepRecord;

use super::control::{first_order_schedule, second_order_schedule};
use super::dynamics::{AgentDynamics, ControlSchedule, Model};
use super::reach::{first_order_reach_time, inverse_time_square, second_order_reach_time_general};
use super::sets::{first_order_attainable_set, second_order_zero_vel_set, AttainableSet, WarpedAttainableSet};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum SolveMode {
    #[default]
    Centralized,
    Ring,
}

/// What the solver's height coordinate measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeightScale {
    /// Seconds (first-order agents).
    Time,
    /// Seconds squared (second-order agents starting at rest).
    TimeSquared,
    /// Seconds, with each agent's set warped (second-order agents in motion).
    WarpedTime,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsensusConfig<T> {
    pub tolerances: ToleranceConfig<T>,
    /// Height of the plane; must not be positive.
    pub t_min: T,
    pub max_ring_cycles: usize,
    pub reset_policy: ResetPolicy,
}

impl<T: Scalar> Default for ConsensusConfig<T> {
    fn default() -> Self {
        Self {
            tolerances: ToleranceConfig::default(),
            t_min: T::zero(),
            max_ring_cycles: 100_000,
            reset_policy: ResetPolicy::Restart,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsensusResult<T> {
    pub x_consensus: Vec<T>,
    /// Consensus time in seconds.
    pub t_consensus: T,
    /// Per-agent schedules to `(x_consensus, 0)`.
    pub schedules: Vec<ControlSchedule<T>>,
    /// Raw solver output, heights in `height` units.
    pub solver: MinMaxSolution<T>,
    pub height: HeightScale,
    /// Set when the nonconvex warped sets were used.
    pub experimental: bool,
    /// Ring mode only: messages received per agent.
    pub message_counts: Option<Vec<usize>>,
}

/// Minimum time for `agent` to reach `x` and stop there.
pub fn reach_time<T: Scalar>(agent: &AgentDynamics<T>, x: &[T]) -> Result<T> {
    match agent.model {
        Model::FirstOrder => first_order_reach_time(&agent.x0, x, agent.u_max),
        Model::SecondOrder => {
            if x.len() != 1 {
                return Err(Error::DimensionMismatch { expected: 1, found: x.len() });
            }
            second_order_reach_time_general((agent.x0[0], agent.v0), x[0], T::zero(), agent.u_max)
        }
    }
}

fn build_sets<T: Scalar>(agents: &[AgentDynamics<T>]) -> Result<(Vec<AttainableSet<T>>, HeightScale)> {
    let first = agents.first().ok_or_else(|| Error::InvalidParameter("no agents".into()))?;
    for a in agents {
        a.validate()?;
        if a.model != first.model {
            return Err(Error::InvalidParameter("all agents must share one model".into()));
        }
        if a.x0.len() != first.x0.len() {
            return Err(Error::DimensionMismatch { expected: first.x0.len(), found: a.x0.len() });
        }
    }
    match first.model {
        Model::FirstOrder => {
            let sets = agents.iter().map(|a| first_order_attainable_set(a).map(AttainableSet::Cone));
            Ok((sets.collect::<Result<_>>()?, HeightScale::Time))
        }
        Model::SecondOrder if agents.iter().all(|a| a.v0 == T::zero()) => {
            let sets = agents.iter().map(|a| second_order_zero_vel_set(a).map(AttainableSet::Cone));
            Ok((sets.collect::<Result<_>>()?, HeightScale::TimeSquared))
        }
        Model::SecondOrder => {
            let sets = agents.iter().map(|a| WarpedAttainableSet::new(a).map(AttainableSet::Warped));
            Ok((sets.collect::<Result<_>>()?, HeightScale::WarpedTime))
        }
    }
}

/// Consensus point and time that minimize the latest arrival, plus the
/// bang-bang schedules that realize it.
///
/// Agents starting at rest (or first-order agents) give a convex problem.
/// Second-order agents with any nonzero initial velocity go through the
/// experimental warped sets and the result is tagged `experimental`.
pub fn solve_min_time_consensus<T: Scalar>(
    agents: &[AgentDynamics<T>],
    cfg: &ConsensusConfig<T>,
    mode: SolveMode,
) -> Result<ConsensusResult<T>> {
    solve_min_time_consensus_traced(agents, cfg, mode, &mut Vec::new())
}

/// Like [`solve_min_time_consensus`], appending every projection step to `sink`.
pub fn solve_min_time_consensus_traced<T: Scalar>(
    agents: &[AgentDynamics<T>],
    cfg: &ConsensusConfig<T>,
    mode: SolveMode,
    sink: &mut Vec<StepRecord<T>>,
) -> Result<ConsensusResult<T>> {
    cfg.tolerances.validate()?;
    if !(cfg.t_min <= T::zero()) {
        return Err(Error::InvalidParameter(format!("t_min must be <= 0, got {}", cfg.t_min)));
    }
    let (sets, height) = build_sets(agents)?;
    let anchors: Vec<Vec<T>> = agents.iter().map(|a| a.x0.clone()).collect();
    let p0 = centroid_start(&anchors, cfg.t_min)?;
    let dim = p0.dim();

    let (solver, message_counts) = match mode {
        SolveMode::Centralized => {
            let plane = HorizontalHyperplane::new(dim, cfg.t_min)?;
            (solve_minmax_traced(&sets, &plane, &p0, &cfg.tolerances, sink)?, None)
        }
        SolveMode::Ring => {
            let ring_cfg = RingConfig {
                err: cfg.tolerances.err,
                outer_tol: cfg.tolerances.outer_tol,
                t_min: cfg.t_min,
                max_cycles: cfg.max_ring_cycles,
                record_trace: false,
                reset_policy: cfg.reset_policy,
            };
            let nodes =
                sets.into_iter().enumerate().map(|(k, s)| AgentNode::new(k + 1, s)).collect::<Result<Vec<_>>>()?;
            let out = run_ring_traced(nodes, &p0, &ring_cfg, sink)?;
            (out.solution, Some(out.message_counts))
        }
    };

    let t_consensus = match height {
        HeightScale::Time | HeightScale::WarpedTime => solver.t_star.max(T::zero()),
        HeightScale::TimeSquared => inverse_time_square(solver.t_star.max(T::zero()))?,
    };
    let x = solver.x_star.clone();
    let schedules = agents
        .iter()
        .map(|a| match a.model {
            Model::FirstOrder => Ok(first_order_schedule(&a.x0, &x, a.u_max)),
            Model::SecondOrder => second_order_schedule((a.x0[0], a.v0), (x[0], T::zero()), a.u_max),
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(ConsensusResult {
        x_consensus: x,
        t_consensus,
        schedules,
        solver,
        height,
        experimental: height == HeightScale::WarpedTime,
        message_counts,
    })
}
