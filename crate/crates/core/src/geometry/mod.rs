//! Points of state-time space and exact projections onto convex sets.

mod epigraph;
mod point;
mod sets;

pub use epigraph::{
    project_epigraph, Affine, ConvexEpigraph, ConvexFunction, DomainBox, FnConvex, ScaledNorm, SquaredDistance,
};
pub use point::PointTime;
pub use sets::{
    contains, project_cone, project_hyperplane, Ball, ConvexSet, Halfspace, HorizontalHyperplane, ProjectableSet,
    SecondOrderCone,
};
