//! Simulation of the distributed solver on a cyclic ring of agents.
//!
//! Each agent owns one epigraph and one private Dykstra increment. A single
//! message circulates agents `1 -> 2 -> ... -> N -> 1`; agent 1 is also the
//! coordinator that detects the end of an inner Dykstra run, drops the guess
//! onto the plane and raises the reset flag for one full cycle.

use crate::alternating::{dykstra_update, MinMaxSolution};
use crate::error::{Error, Result};
use crate::geometry::{HorizontalHyperplane, PointTime, ProjectableSet};
use crate::scalar::{tol_floor, Scalar};
use crate::trace::{BregmanRecord, ResetFlag, StepRecord};

/// How an agent treats its increment when the incoming flag is [`ResetFlag::Reset`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum ResetPolicy {
    /// Discard the stored increment before projecting and keep the fresh one,
    /// so the cycle is the first cycle of a new Dykstra run from the plane point.
    #[default]
    Restart,
    /// Project with the stored increment, then zero it.
    AsPrinted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RingConfig<T> {
    /// Threshold for the coordinator's cycle-to-cycle comparison.
    pub err: T,
    /// Stop once two consecutive plane points are closer than this.
    pub outer_tol: T,
    pub t_min: T,
    /// Cap on full trips around the ring.
    pub max_cycles: usize,
    /// Keep every agent step in [`RingOutcome::steps`].
    pub record_trace: bool,
    pub reset_policy: ResetPolicy,
}

impl<T: Scalar> Default for RingConfig<T> {
    fn default() -> Self {
        Self {
            err: tol_floor(1e-7),
            outer_tol: tol_floor(1e-6),
            t_min: T::zero(),
            max_cycles: 100_000,
            record_trace: false,
            reset_policy: ResetPolicy::Restart,
        }
    }
}

impl<T: Scalar> RingConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.err > T::zero()) || !(self.outer_tol > T::zero()) {
            return Err(Error::InvalidParameter("tolerances must be positive".into()));
        }
        if !self.t_min.is_finite() {
            return Err(Error::NonFinite("t_min"));
        }
        if self.max_cycles == 0 {
            return Err(Error::InvalidParameter("max_cycles must be >= 1".into()));
        }
        Ok(())
    }
}

/// The token passed from agent to agent.
#[derive(Debug, Clone, PartialEq)]
pub struct RingMessage<T> {
    pub guess: PointTime<T>,
    pub flag: ResetFlag,
    /// Largest increment change seen since the coordinator last sent the token.
    pub increment_change: T,
}

impl<T: Scalar> RingMessage<T> {
    pub fn new(guess: PointTime<T>, flag: ResetFlag) -> Self {
        Self { guess, flag, increment_change: T::zero() }
    }
}

/// One agent: its set, its increment and (for agent 1) the previous guess.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentNode<T, S> {
    pub id: usize,
    pub own_set: S,
    pub increment: PointTime<T>,
    pub last_guess: Option<PointTime<T>>,
}

impl<T: Scalar, S: ProjectableSet<T>> AgentNode<T, S> {
    pub fn new(id: usize, own_set: S) -> Result<Self> {
        if id == 0 {
            return Err(Error::InvalidParameter("agent ids start at 1".into()));
        }
        let increment = PointTime::zeros(own_set.dim());
        Ok(Self { id, own_set, increment, last_guess: None })
    }

    /// Projects the incoming guess onto the own set, updates the increment and
    /// returns the message for the next agent (carrying the same flag).
    pub fn step(&mut self, msg: &RingMessage<T>, policy: ResetPolicy) -> Result<RingMessage<T>> {
        msg.guess.check_dim(self.own_set.dim())?;
        let reset = msg.flag == ResetFlag::Reset;
        if reset && policy == ResetPolicy::Restart {
            self.increment = PointTime::zeros(self.own_set.dim());
        }
        let (q, next) = dykstra_update(&self.own_set, &msg.guess, &self.increment)?;
        let change = next.dist(&self.increment);
        self.increment = if reset && policy == ResetPolicy::AsPrinted { PointTime::zeros(next.dim()) } else { next };
        Ok(RingMessage { guess: q, flag: msg.flag, increment_change: msg.increment_change.max(change) })
    }
}

/// What the coordinator did with the token.
#[derive(Debug, Clone, PartialEq)]
pub enum ProtocolEvent<T> {
    /// The guess was passed on unchanged.
    Forwarded,
    /// The inner run ended: `a` was dropped onto the plane at `b`.
    Bregman { a: PointTime<T>, b: PointTime<T> },
}

/// Functional form of [`AgentNode::step`].
pub fn agent_step<T: Scalar, S: ProjectableSet<T>>(
    mut node: AgentNode<T, S>,
    msg: &RingMessage<T>,
    policy: ResetPolicy,
) -> Result<(AgentNode<T, S>, RingMessage<T>)> {
    let out = node.step(msg, policy)?;
    Ok((node, out))
}

fn coordinate<T: Scalar, S: ProjectableSet<T>>(
    node: &mut AgentNode<T, S>,
    msg: &RingMessage<T>,
    cfg: &RingConfig<T>,
) -> Result<(RingMessage<T>, ProtocolEvent<T>)> {
    let stepped = node.step(msg, cfg.reset_policy)?;
    let g = stepped.guess;
    if msg.flag == ResetFlag::Preserve {
        if let Some(last) = &node.last_guess {
            if g.spatial_dist(last) < cfg.err && stepped.increment_change < cfg.err {
                let b = HorizontalHyperplane::new(g.dim(), cfg.t_min)?.project(&g)?;
                node.last_guess = None;
                let out = RingMessage::new(b.clone(), ResetFlag::Reset);
                return Ok((out, ProtocolEvent::Bregman { a: g, b }));
            }
        }
    }
    node.last_guess = Some(g.clone());
    Ok((RingMessage::new(g, ResetFlag::Preserve), ProtocolEvent::Forwarded))
}

/// Updated coordinator, its outgoing message, and what happened.
pub type CoordinatorStep<T, S> = (AgentNode<T, S>, RingMessage<T>, ProtocolEvent<T>);

/// Agent 1's turn: its own projection followed by the end-of-run test.
pub fn coordinator_step<T: Scalar, S: ProjectableSet<T>>(
    mut node: AgentNode<T, S>,
    msg: &RingMessage<T>,
    cfg: &RingConfig<T>,
) -> Result<CoordinatorStep<T, S>> {
    if node.id != 1 {
        return Err(Error::InvalidParameter(format!("coordinator must be agent 1, got {}", node.id)));
    }
    let (out, event) = coordinate(&mut node, msg, cfg)?;
    Ok((node, out, event))
}

/// Result of a ring run.
#[derive(Debug, Clone, PartialEq)]
pub struct RingOutcome<T, S> {
    pub solution: MinMaxSolution<T>,
    /// Messages received by each agent, indexed by `id - 1`.
    pub message_counts: Vec<usize>,
    /// Every agent step, when `record_trace` is set.
    pub steps: Vec<StepRecord<T>>,
    pub agents: Vec<AgentNode<T, S>>,
}

/// Runs the protocol until two consecutive plane points are closer than
/// `cfg.outer_tol`.
///
/// The run starts as if the coordinator had just emitted `(p0, Reset)`.
pub fn run_ring<T: Scalar, S: ProjectableSet<T>>(
    agents: Vec<AgentNode<T, S>>,
    p0: &PointTime<T>,
    cfg: &RingConfig<T>,
) -> Result<RingOutcome<T, S>> {
    let mut steps = Vec::new();
    let mut out = run_ring_traced(agents, p0, cfg, &mut steps)?;
    if cfg.record_trace {
        out.steps = steps;
    }
    Ok(out)
}

/// Like [`run_ring`], appending every agent step to `sink` even on failure.
pub fn run_ring_traced<T: Scalar, S: ProjectableSet<T>>(
    mut agents: Vec<AgentNode<T, S>>,
    p0: &PointTime<T>,
    cfg: &RingConfig<T>,
    sink: &mut Vec<StepRecord<T>>,
) -> Result<RingOutcome<T, S>> {
    cfg.validate()?;
    if agents.is_empty() {
        return Err(Error::InvalidParameter("ring needs at least one agent".into()));
    }
    for (k, a) in agents.iter().enumerate() {
        if a.id != k + 1 {
            return Err(Error::InvalidParameter(format!("agent at position {} has id {}", k + 1, a.id)));
        }
        p0.check_dim(a.own_set.dim())?;
    }
    if !p0.is_finite() {
        return Err(Error::NonFinite("starting point"));
    }

    let n = agents.len();
    let mut counts = vec![0usize; n];
    let mut msg = RingMessage::new(p0.clone(), ResetFlag::Reset);
    let mut trace: Vec<BregmanRecord<T>> = Vec::new();
    let mut prev_b: Option<PointTime<T>> = None;
    let mut cycles_since_event = 0;
    let mut last_move = T::infinity();

    for cycle in 1..=cfg.max_cycles {
        cycles_since_event += 1;
        for k in (1..n).chain(std::iter::once(0)) {
            counts[k] += 1;
            let incoming_flag = msg.flag;
            let node = &mut agents[k];
            let (next, guess, event) = if k == 0 {
                let (next, event) = coordinate(node, &msg, cfg)?;
                let guess = match &event {
                    ProtocolEvent::Bregman { a, .. } => a.clone(),
                    ProtocolEvent::Forwarded => next.guess.clone(),
                };
                (next, guess, event)
            } else {
                let next = node.step(&msg, cfg.reset_policy)?;
                let guess = next.guess.clone();
                (next, guess, ProtocolEvent::Forwarded)
            };
            sink.push(StepRecord {
                cycle,
                agent_id: k + 1,
                guess,
                increment_norm: node.increment.norm(),
                flag: incoming_flag,
                bregman_event: matches!(event, ProtocolEvent::Bregman { .. }),
            });
            msg = next;

            if let ProtocolEvent::Bregman { a, b } = event {
                let gap = a.dist(&b);
                trace.push(BregmanRecord {
                    outer_iter: trace.len() + 1,
                    inner_cycles: cycles_since_event,
                    a: a.clone(),
                    b: b.clone(),
                    gap,
                });
                cycles_since_event = 0;
                if let Some(pb) = &prev_b {
                    last_move = b.dist(pb);
                    if last_move < cfg.outer_tol {
                        let solution = MinMaxSolution {
                            x_star: a.x.clone(),
                            t_star: a.t,
                            distance: gap,
                            inner_cycles_total: cycle,
                            outer_iters: trace.len(),
                            touches_plane: gap <= cfg.outer_tol,
                            trace,
                        };
                        return Ok(RingOutcome { solution, message_counts: counts, steps: Vec::new(), agents });
                    }
                }
                prev_b = Some(b);
            }
        }
    }
    Err(Error::NotConverged {
        routine: "ring",
        iterations: cfg.max_cycles,
        residual: last_move.as_f64(),
        last: msg.guess.to_f64_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alternating::{solve_minmax_traced, ToleranceConfig};
    use crate::geometry::{HorizontalHyperplane, SecondOrderCone};

    fn pt(x: f64, t: f64) -> PointTime<f64> {
        PointTime::scalar(x, t)
    }

    fn cone(x: f64, slope: f64) -> SecondOrderCone<f64> {
        SecondOrderCone::new(pt(x, 0.0), slope).unwrap()
    }

    fn ring_of(cones: &[SecondOrderCone<f64>]) -> Vec<AgentNode<f64, SecondOrderCone<f64>>> {
        cones.iter().enumerate().map(|(k, c)| AgentNode::new(k + 1, c.clone()).unwrap()).collect()
    }

    #[test]
    fn plane_agent_examples() {
        let plane = HorizontalHyperplane::new(1, 0.0).unwrap();
        let node = AgentNode::new(2, plane.clone()).unwrap();
        let msg = RingMessage::new(pt(2.0, 5.0), ResetFlag::Preserve);
        let (node, out) = agent_step(node, &msg, ResetPolicy::AsPrinted).unwrap();
        assert_eq!(out.guess, pt(2.0, 0.0));
        assert_eq!(out.flag, ResetFlag::Preserve);
        assert_eq!(node.increment, pt(0.0, -5.0));

        let node = AgentNode::new(2, plane).unwrap();
        let msg = RingMessage::new(pt(2.0, 5.0), ResetFlag::Reset);
        let (node, out) = agent_step(node, &msg, ResetPolicy::AsPrinted).unwrap();
        assert_eq!(out.guess, pt(2.0, 0.0));
        assert_eq!(out.flag, ResetFlag::Reset);
        assert_eq!(node.increment, pt(0.0, 0.0));
    }

    #[test]
    fn cone_agent_example() {
        let node = AgentNode::new(3, cone(0.0, 1.0)).unwrap();
        let msg = RingMessage::new(pt(2.0, 0.0), ResetFlag::Preserve);
        for policy in [ResetPolicy::Restart, ResetPolicy::AsPrinted] {
            let (node, out) = agent_step(node.clone(), &msg, policy).unwrap();
            assert!(out.guess.dist(&pt(1.0, 1.0)) < 1e-12);
            assert!(node.increment.dist(&pt(-1.0, 1.0)) < 1e-12);
        }
    }

    #[test]
    fn restart_discards_stale_increment() {
        let mut node = AgentNode::new(2, HorizontalHyperplane::new(1, 0.0).unwrap()).unwrap();
        node.increment = pt(3.0, 3.0);
        let out = node.step(&RingMessage::new(pt(2.0, 5.0), ResetFlag::Reset), ResetPolicy::Restart).unwrap();
        assert_eq!(out.guess, pt(2.0, 0.0));
        assert_eq!(node.increment, pt(0.0, -5.0));
    }

    #[test]
    fn coordinator_examples() {
        let cfg = RingConfig { t_min: 0.0, ..RingConfig::default() };
        // Stationary inner loop: same guess as last time.
        let mut node = AgentNode::new(1, cone(4.0, 1.0)).unwrap();
        node.last_guess = Some(pt(4.0, 2.0));
        let msg = RingMessage::new(pt(4.0, 2.0), ResetFlag::Preserve);
        let (node, out, event) = coordinator_step(node, &msg, &cfg).unwrap();
        assert_eq!(out.guess, pt(4.0, 0.0));
        assert_eq!(out.flag, ResetFlag::Reset);
        assert_eq!(event, ProtocolEvent::Bregman { a: pt(4.0, 2.0), b: pt(4.0, 0.0) });
        assert_eq!(node.last_guess, None);

        let mut node = AgentNode::new(1, cone(4.0, 1.0)).unwrap();
        node.last_guess = Some(pt(3.0, 2.0));
        let (node, out, event) = coordinator_step(node, &msg, &cfg).unwrap();
        assert_eq!(out, RingMessage::new(pt(4.0, 2.0), ResetFlag::Preserve));
        assert_eq!(event, ProtocolEvent::Forwarded);
        assert_eq!(node.last_guess, Some(pt(4.0, 2.0)));

        let other = AgentNode::new(2, cone(4.0, 1.0)).unwrap();
        assert!(coordinator_step(other, &msg, &cfg).is_err());
    }

    #[test]
    fn single_agent() {
        let cfg = RingConfig { t_min: -1.0, ..RingConfig::default() };
        let out = run_ring(ring_of(&[cone(3.0, 1.0)]), &pt(3.0, 0.0), &cfg).unwrap();
        assert!((out.solution.x_star[0] - 3.0).abs() < 1e-6);
        assert!(out.solution.t_star.abs() < 1e-6);
    }

    #[test]
    fn two_symmetric_cones() {
        let out = run_ring(ring_of(&[cone(-1.0, 1.0), cone(1.0, 1.0)]), &pt(0.3, 1.0), &RingConfig::default()).unwrap();
        assert!(out.solution.x_star[0].abs() < 1e-5, "{:?}", out.solution);
        assert!((out.solution.t_star - 1.0).abs() < 1e-5);
    }

    #[test]
    fn one_message_per_agent_per_cycle() {
        let cfg = RingConfig { record_trace: true, ..RingConfig::default() };
        let out = run_ring(ring_of(&[cone(-2.0, 1.0), cone(0.5, 2.0), cone(3.0, 0.5)]), &pt(0.0, 1.0), &cfg).unwrap();
        let cycles = out.solution.inner_cycles_total;
        assert_eq!(out.message_counts, vec![cycles; 3]);
        assert_eq!(out.steps.len(), 3 * cycles);
        for (k, s) in out.steps.iter().enumerate() {
            assert_eq!(s.cycle, k / 3 + 1);
            assert_eq!(s.agent_id, [2, 3, 1][k % 3]);
        }
    }

    #[test]
    fn matches_centralized_step_for_step() {
        let cones = [cone(-2.0, 1.0), cone(0.5, 2.0), cone(3.0, 0.5), cone(1.0, 1.5)];
        let p0 = pt(0.7, 0.0);
        let tol = ToleranceConfig::default();
        let mut central_steps = Vec::new();
        let plane = HorizontalHyperplane::new(1, -1.0).unwrap();
        let central = solve_minmax_traced(&cones, &plane, &p0, &tol, &mut central_steps).unwrap();
        let cfg = RingConfig { t_min: -1.0, record_trace: true, ..RingConfig::default() };
        let ring = run_ring(ring_of(&cones), &p0, &cfg).unwrap();
        assert_eq!(ring.steps, central_steps);
        assert_eq!(ring.solution, central);
    }

    #[test]
    fn as_printed_zeroes_increments_after_reset_cycle() {
        let cones = [cone(-2.0, 1.0), cone(0.5, 2.0), cone(3.0, 0.5)];
        let cfg = RingConfig { reset_policy: ResetPolicy::AsPrinted, ..RingConfig::default() };
        let mut agents = ring_of(&cones);
        let mut msg = RingMessage::new(pt(0.0, 2.0), ResetFlag::Reset);
        let mut reset_cycles = 0;
        for _ in 0..200 {
            let carried = msg.flag;
            for k in [1, 2] {
                msg = agents[k].step(&msg, cfg.reset_policy).unwrap();
            }
            let (next, _) = coordinate(&mut agents[0], &msg, &cfg).unwrap();
            msg = next;
            if carried == ResetFlag::Reset {
                reset_cycles += 1;
                for a in &agents {
                    assert_eq!(a.increment, pt(0.0, 0.0), "agent {}", a.id);
                }
            }
        }
        assert!(reset_cycles >= 2);
    }

    #[test]
    fn cap_reports_failure() {
        let cfg = RingConfig { max_cycles: 3, ..RingConfig::default() };
        let mut sink = Vec::new();
        let err = run_ring_traced(ring_of(&[cone(-1.0, 1.0), cone(1.0, 1.0)]), &pt(0.3, 1.0), &cfg, &mut sink);
        assert!(matches!(err, Err(Error::NotConverged { routine: "ring", .. })));
        assert_eq!(sink.len(), 6);
    }

    #[test]
    fn rejects_bad_ids() {
        let mut agents = ring_of(&[cone(-1.0, 1.0), cone(1.0, 1.0)]);
        agents[1].id = 5;
        assert!(run_ring(agents, &pt(0.0, 1.0), &RingConfig::default()).is_err());
    }
}
