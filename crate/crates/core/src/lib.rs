//! Min-max convex optimization by alternating projections.
//!
//! The problem `min_x max_i f_i(x)` is solved as the distance between the
//! intersection of the epigraphs of the `f_i` and a horizontal plane lying
//! below it. Bregman's two-set alternating projection walks between the plane
//! and the intersection; the projection onto the intersection is computed by
//! Dykstra's cyclic method, either centrally ([`alternating`]) or as a token
//! passed around a ring of agents that each own one epigraph ([`ring`]).
//!
//! [`consensus`] applies the solver to minimum-time consensus of first- and
//! second-order integrator agents and synthesizes bang-bang controls.
//! [`oracle`] holds slow brute-force verifiers used by tests and the CLI.
//!
//! All numerics are generic over [`Scalar`] (`f32` or `f64`); the type aliases
//! at the crate root fix the scalar to `f64`.

// `!(x > 0)` rejects NaN along with nonpositive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod alternating;
pub mod consensus;
pub mod error;
pub mod geometry;
pub mod oracle;
pub mod ring;
pub mod scalar;
pub mod trace;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Point = geometry::PointTime<f64>;
pub type Cone = geometry::SecondOrderCone<f64>;
pub type Plane = geometry::HorizontalHyperplane<f64>;
pub type Tolerances = alternating::ToleranceConfig<f64>;
pub type Solution = alternating::MinMaxSolution<f64>;
pub type Agent = consensus::AgentDynamics<f64>;
pub type Consensus = consensus::ConsensusResult<f64>;
pub type Schedule = consensus::ControlSchedule<f64>;
pub type Step = trace::StepRecord<f64>;
