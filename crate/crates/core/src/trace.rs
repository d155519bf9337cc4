use crate::geometry::PointTime;

/// The increment reset symbol carried with every guess.
///
/// `Reset` tells the receiving agent that the guess is a fresh starting point
/// and its stored Dykstra increment no longer applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ResetFlag {
    Preserve,
    Reset,
}

impl ResetFlag {
    pub fn as_u8(self) -> u8 {
        match self {
            ResetFlag::Preserve => 0,
            ResetFlag::Reset => 1,
        }
    }
}

/// One projection step of the inner loop, as seen by the agent performing it.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord<T> {
    /// 1-based index of the Dykstra cycle this step belongs to.
    pub cycle: usize,
    /// 1-based agent (set) index.
    pub agent_id: usize,
    /// The agent's projection output.
    pub guess: PointTime<T>,
    /// Norm of the agent's increment after the step.
    pub increment_norm: T,
    /// Flag carried by the incoming message.
    pub flag: ResetFlag,
    /// Whether this step closed the inner loop and triggered a plane projection.
    pub bregman_event: bool,
}

/// State at one outer (plane projection) step.
#[derive(Debug, Clone, PartialEq)]
pub struct BregmanRecord<T> {
    /// 1-based outer iteration.
    pub outer_iter: usize,
    /// Dykstra cycles spent computing `a`.
    pub inner_cycles: usize,
    /// Point on the intersection side.
    pub a: PointTime<T>,
    /// Its projection onto the plane.
    pub b: PointTime<T>,
    pub gap: T,
}
