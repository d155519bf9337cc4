use crate::error::{Error, Result};
use crate::geometry::{PointTime, ProjectableSet, SecondOrderCone};
use crate::scalar::Scalar;

use super::dynamics::{AgentDynamics, Model};
use super::reach::second_order_reach_time_general;

/// `{(x, t) : ||x - x0|| / u_max <= t}`.
pub fn first_order_attainable_set<T: Scalar>(agent: &AgentDynamics<T>) -> Result<SecondOrderCone<T>> {
    agent.validate()?;
    if agent.model != Model::FirstOrder {
        return Err(Error::InvalidParameter("expected a first-order agent".into()));
    }
    SecondOrderCone::new(PointTime::new(agent.x0.clone(), T::zero())?, T::one() / agent.u_max)
}

/// Rest-to-rest attainable set in `(x, s = t^2)` coordinates:
/// `{(x, s) : 4 |x - x0| / u_max <= s}`.
pub fn second_order_zero_vel_set<T: Scalar>(agent: &AgentDynamics<T>) -> Result<SecondOrderCone<T>> {
    agent.validate()?;
    if agent.model != Model::SecondOrder {
        return Err(Error::InvalidParameter("expected a second-order agent".into()));
    }
    if agent.v0 != T::zero() {
        return Err(Error::InvalidParameter("nonzero initial velocity needs the warped set".into()));
    }
    SecondOrderCone::new(PointTime::new(agent.x0.clone(), T::zero())?, T::lit(4.0) / agent.u_max)
}

/// Attainable set of a second-order agent with nonzero initial velocity,
/// stopping at rest, handled through a per-agent change of the height axis.
///
/// EXPERIMENTAL. The set is not convex in `(x, t)`. Each side of the agent's
/// stopping point `x_s` gets its own quadratic warp `h(t)` that turns the
/// boundary into a straight line of slope `1 / u_max`, so the warped set is a
/// cone with apex `(x_s, k)`. Projection maps a point into warped coordinates
/// with the warp of its own side, projects onto the cone, and maps back with
/// the warp of the result's side. Nothing guarantees a nearest point.
#[derive(Debug, Clone, PartialEq)]
pub struct WarpedAttainableSet<T> {
    pub x0: T,
    pub v0: T,
    pub u_max: T,
    cone: SecondOrderCone<T>,
    // Velocity in units of u_max * seconds.
    vs: T,
    c_right: T,
    c_left: T,
}

impl<T: Scalar> WarpedAttainableSet<T> {
    pub fn new(agent: &AgentDynamics<T>) -> Result<Self> {
        agent.validate()?;
        if agent.model != Model::SecondOrder {
            return Err(Error::InvalidParameter("expected a second-order agent".into()));
        }
        let (x0, v0, u) = (agent.x0[0], agent.v0, agent.u_max);
        let half = T::lit(0.5);
        let vs = v0 / u;
        let c_right = vs.abs() - half * (vs * vs - vs * vs.abs());
        let c_left = c_right + vs * vs.abs();
        let apex_h = half * vs * vs.abs() + half * vs * vs + c_right;
        let cone = SecondOrderCone::new(PointTime::scalar(stopping_point(x0, v0, u), apex_h), T::one() / u)?;
        Ok(Self { x0, v0, u_max: u, cone, vs, c_right, c_left })
    }

    /// Where the agent comes to rest under full braking.
    pub fn stopping_point(&self) -> T {
        self.cone.apex.x[0]
    }

    /// The cone the set becomes in warped coordinates.
    pub fn warped_cone(&self) -> &SecondOrderCone<T> {
        &self.cone
    }

    fn side(&self, x: T) -> (T, T) {
        if x > self.stopping_point() {
            (self.vs, self.c_right)
        } else {
            (-self.vs, self.c_left)
        }
    }

    /// Normal `(x, t)` to warped `(x, h)`.
    pub fn forward(&self, x: T, t: T) -> T {
        let (offset, c) = self.side(x);
        let w = t + offset;
        T::lit(0.25) * w * w.abs() + c
    }

    /// Warped `(x, h)` back to normal `(x, t)`.
    pub fn inverse(&self, x: T, h: T) -> T {
        let (offset, c) = self.side(x);
        let d = (h - c) * T::lit(4.0);
        d.signum() * d.abs().sqrt() - offset
    }
}

fn stopping_point<T: Scalar>(x0: T, v0: T, u: T) -> T {
    x0 + T::lit(0.5) * v0 * v0.abs() / u
}

/// Height warp of [`WarpedAttainableSet`] applied to one point.
///
/// With zero initial velocity this is `t |t| / 4`, i.e. a quarter of `t^2` for `t >= 0`.
pub fn nonzero_velocity_transform<T: Scalar>(x_normal: (T, T), agent: &AgentDynamics<T>) -> Result<(T, T)> {
    let set = WarpedAttainableSet::new(agent)?;
    Ok((x_normal.0, set.forward(x_normal.0, x_normal.1)))
}

impl<T: Scalar> ProjectableSet<T> for WarpedAttainableSet<T> {
    fn dim(&self) -> usize {
        1
    }

    fn contains(&self, p: &PointTime<T>, tol: T) -> Result<bool> {
        p.check_dim(1)?;
        let t = second_order_reach_time_general((self.x0, self.v0), p.x[0], T::zero(), self.u_max)?;
        Ok(p.t >= t - tol)
    }

    fn project(&self, p: &PointTime<T>) -> Result<PointTime<T>> {
        p.check_dim(1)?;
        let x = p.x[0];
        let warped = PointTime::scalar(x, self.forward(x, p.t));
        let q = self.cone.project(&warped)?;
        let xq = q.x[0];
        Ok(PointTime::scalar(xq, self.inverse(xq, q.t)))
    }
}

/// The per-agent sets the consensus solver works with.
#[derive(Debug, Clone, PartialEq)]
pub enum AttainableSet<T> {
    Cone(SecondOrderCone<T>),
    Warped(WarpedAttainableSet<T>),
}

impl<T: Scalar> ProjectableSet<T> for AttainableSet<T> {
    fn dim(&self) -> usize {
        match self {
            AttainableSet::Cone(c) => c.dim(),
            AttainableSet::Warped(w) => w.dim(),
        }
    }

    fn contains(&self, p: &PointTime<T>, tol: T) -> Result<bool> {
        match self {
            AttainableSet::Cone(c) => c.contains(p, tol),
            AttainableSet::Warped(w) => w.contains(p, tol),
        }
    }

    fn project(&self, p: &PointTime<T>) -> Result<PointTime<T>> {
        match self {
            AttainableSet::Cone(c) => c.project(p),
            AttainableSet::Warped(w) => w.project(p),
        }
    }
}
