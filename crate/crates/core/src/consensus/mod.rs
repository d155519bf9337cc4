//! Minimum-time consensus of integrator agents.

mod control;
mod dynamics;
mod reach;
mod sets;
mod solve;

pub use control::{
    bang_bang_control, first_order_schedule, second_order_schedule, simulate_trajectory, Sample, Trajectory,
};
pub use dynamics::{AgentDynamics, ControlSchedule, Model, Segment};
pub use reach::{
    first_order_reach_time, inverse_time_square, second_order_reach_time_general, second_order_reach_time_zero_vel,
    switching_function, time_square_transform,
};
pub use sets::{
    first_order_attainable_set, nonzero_velocity_transform, second_order_zero_vel_set, AttainableSet,
    WarpedAttainableSet,
};
pub use solve::{
    reach_time, solve_min_time_consensus, solve_min_time_consensus_traced, ConsensusConfig, ConsensusResult,
    HeightScale, SolveMode,
};
