use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Model {
    /// `x' = u`, `|u| <= u_max`, any spatial dimension.
    FirstOrder,
    /// `x'' = u`, `|u| <= u_max`, one spatial dimension.
    SecondOrder,
}

/// Integrator model, initial state and input bound of one agent.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentDynamics<T> {
    pub model: Model,
    pub x0: Vec<T>,
    /// Initial velocity; always zero for first-order agents.
    pub v0: T,
    pub u_max: T,
}

impl<T: Scalar> AgentDynamics<T> {
    pub fn first_order(x0: Vec<T>, u_max: T) -> Result<Self> {
        let a = Self { model: Model::FirstOrder, x0, v0: T::zero(), u_max };
        a.validate()?;
        Ok(a)
    }

    pub fn second_order(x0: T, v0: T, u_max: T) -> Result<Self> {
        let a = Self { model: Model::SecondOrder, x0: vec![x0], v0, u_max };
        a.validate()?;
        Ok(a)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.u_max > T::zero()) || !self.u_max.is_finite() {
            return Err(Error::InvalidParameter(format!("u_max must be positive, got {}", self.u_max)));
        }
        if self.x0.is_empty() {
            return Err(Error::InvalidParameter("x0 must not be empty".into()));
        }
        if !self.x0.iter().all(|v| v.is_finite()) || !self.v0.is_finite() {
            return Err(Error::NonFinite("agent initial state"));
        }
        match self.model {
            Model::FirstOrder if self.v0 != T::zero() => {
                Err(Error::InvalidParameter("first-order agents have no velocity state".into()))
            }
            Model::SecondOrder if self.x0.len() != 1 => {
                Err(Error::InvalidParameter("second-order agents are one-dimensional".into()))
            }
            _ => Ok(()),
        }
    }
}

/// A constant-input stretch of a schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment<T> {
    pub duration: T,
    pub u: T,
}

/// Piecewise-constant input `u(t) * direction`.
///
/// Second-order agents use `direction = [1]`; first-order agents move along
/// the unit vector toward their target.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlSchedule<T> {
    pub direction: Vec<T>,
    pub segments: Vec<Segment<T>>,
}

impl<T: Scalar> ControlSchedule<T> {
    pub fn total_duration(&self) -> T {
        self.segments.iter().map(|s| s.duration).sum()
    }

    /// Times at which the input changes, excluding the final stop.
    pub fn switch_times(&self) -> Vec<T> {
        let mut t = T::zero();
        let mut out = Vec::new();
        for s in self.segments.iter().take(self.segments.len().saturating_sub(1)) {
            t += s.duration;
            out.push(t);
        }
        out
    }

    /// Scalar input in effect at time `t`; zero before 0 and after the end.
    pub fn input_at(&self, t: T) -> T {
        if t < T::zero() {
            return T::zero();
        }
        let mut start = T::zero();
        for s in &self.segments {
            if t < start + s.duration {
                return s.u;
            }
            start += s.duration;
        }
        T::zero()
    }
}
