//! Centralized alternating-projection solvers.

mod bregman;
mod config;
mod dykstra;
mod minmax;

pub use bregman::{bregman_alternate, BregmanOutcome};
pub use config::ToleranceConfig;
pub use dykstra::{dykstra_project, dykstra_update, DykstraState, Intersection, StopMetric};
pub use minmax::{centroid_start, ring_order, solve_minmax, solve_minmax_traced, MinMaxSolution};
