use crate::error::{Error, Result};
use crate::scalar::{self, Scalar};

use super::dynamics::{AgentDynamics, ControlSchedule, Model, Segment};
use super::reach::switching_function;

/// Time-optimal feedback input for the double integrator.
///
/// `+u_max` or `-u_max` by the sign of the switching function. On the
/// switching curve the input that drives the velocity toward the target
/// velocity is used; at the target itself the input is zero.
pub fn bang_bang_control<T: Scalar>(state: (T, T), target: (T, T), u_max: T) -> T {
    if state == target {
        return T::zero();
    }
    let sigma = switching_function(state, target, u_max);
    if sigma > T::zero() {
        u_max
    } else if sigma < T::zero() {
        -u_max
    } else {
        (target.1 - state.1).signum() * u_max
    }
}

/// Open-loop bang-bang schedule from `(x, v)` to `(x_target, v_target)` with at most one switch.
pub fn second_order_schedule<T: Scalar>(from: (T, T), to: (T, T), u_max: T) -> Result<ControlSchedule<T>> {
    if !(u_max > T::zero()) {
        return Err(Error::InvalidParameter(format!("u_max must be positive, got {u_max}")));
    }
    let (x, v) = from;
    let (xt, vt) = to;
    let mut segments = Vec::new();
    let half = T::lit(0.5);
    let sigma = switching_function(from, to, u_max);
    if from == to {
        return Ok(ControlSchedule { direction: vec![T::one()], segments });
    }
    if sigma == T::zero() {
        segments.push(Segment { duration: (vt - v).abs() / u_max, u: (vt - v).signum() * u_max });
    } else {
        let energy = half * (v * v + vt * vt);
        let (peak_sq, sign) = if sigma > T::zero() {
            (energy + u_max * (xt - x), T::one())
        } else {
            (energy - u_max * (xt - x), -T::one())
        };
        let slack = T::epsilon() * T::lit(64.0) * (energy + (u_max * (xt - x)).abs() + T::one());
        if peak_sq < -slack {
            return Err(Error::Infeasible(format!("no bang-bang schedule (peak speed^2 {peak_sq})")));
        }
        let peak = sign * peak_sq.max(T::zero()).sqrt();
        let d1 = (sign * (peak - v) / u_max).max(T::zero());
        let d2 = (sign * (peak - vt) / u_max).max(T::zero());
        segments.push(Segment { duration: d1, u: sign * u_max });
        segments.push(Segment { duration: d2, u: -sign * u_max });
    }
    Ok(ControlSchedule { direction: vec![T::one()], segments })
}

/// One output sample. Vectors have the agent's spatial dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample<T> {
    pub t: T,
    pub x: Vec<T>,
    pub v: Vec<T>,
    /// Input applied from this instant on.
    pub u: Vec<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub samples: Vec<Sample<T>>,
    pub schedule: ControlSchedule<T>,
    /// Time the target state is reached.
    pub arrival: T,
    /// Exact state at `arrival`.
    pub final_x: Vec<T>,
    pub final_v: Vec<T>,
}

impl<T: Scalar> Trajectory<T> {
    /// Appends samples holding the final state, on the same `dt` grid, up to `t_end`.
    pub fn hold_until(&mut self, t_end: T, dt: T) {
        let zero = vec![T::zero(); self.final_x.len()];
        let mut k = (self.arrival / dt).floor() + T::one();
        while k * dt < t_end {
            self.samples.push(Sample { t: k * dt, x: self.final_x.clone(), v: self.final_v.clone(), u: zero.clone() });
            k += T::one();
        }
        if t_end > self.arrival {
            self.samples.push(Sample { t: t_end, x: self.final_x.clone(), v: self.final_v.clone(), u: zero });
        }
    }
}

// State after running `schedule` for `t` seconds, integrated segment by segment.
fn state_at<T: Scalar>(model: Model, x0: &[T], v0: T, schedule: &ControlSchedule<T>, t: T) -> (Vec<T>, T) {
    let half = T::lit(0.5);
    let mut s = T::zero();
    let mut v = v0;
    let mut elapsed = T::zero();
    for seg in &schedule.segments {
        let h = (t - elapsed).min(seg.duration);
        if h <= T::zero() {
            break;
        }
        match model {
            Model::FirstOrder => s += seg.u * h,
            Model::SecondOrder => {
                s += v * h + half * seg.u * h * h;
                v += seg.u * h;
            }
        }
        elapsed += seg.duration;
    }
    let x = x0.iter().zip(&schedule.direction).map(|(&xi, &di)| xi + di * s).collect();
    (x, v)
}

/// Steers `agent` to `target_x` (with velocity `target_v` for second-order
/// agents) along the time-optimal schedule, sampling every `dt` seconds and
/// at the arrival time.
pub fn simulate_trajectory<T: Scalar>(
    agent: &AgentDynamics<T>,
    target_x: &[T],
    target_v: T,
    dt: T,
) -> Result<Trajectory<T>> {
    agent.validate()?;
    if !(dt > T::zero()) || !dt.is_finite() {
        return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
    }
    if target_x.len() != agent.x0.len() {
        return Err(Error::DimensionMismatch { expected: agent.x0.len(), found: target_x.len() });
    }
    let schedule = match agent.model {
        Model::FirstOrder => {
            if target_v != T::zero() {
                return Err(Error::Infeasible("first-order agents stop with zero velocity".into()));
            }
            first_order_schedule(&agent.x0, target_x, agent.u_max)
        }
        Model::SecondOrder => second_order_schedule((agent.x0[0], agent.v0), (target_x[0], target_v), agent.u_max)?,
    };
    let arrival = schedule.total_duration();

    let mut samples = Vec::new();
    let mut k = T::zero();
    while k * dt < arrival {
        let t = k * dt;
        let (x, v) = state_at(agent.model, &agent.x0, agent.v0, &schedule, t);
        let u: Vec<T> = schedule.direction.iter().map(|&d| d * schedule.input_at(t)).collect();
        let v = match agent.model {
            Model::FirstOrder => u.clone(),
            Model::SecondOrder => vec![v],
        };
        samples.push(Sample { t, x, v, u });
        k += T::one();
    }
    let (final_x, v_end) = state_at(agent.model, &agent.x0, agent.v0, &schedule, arrival);
    let final_v = match agent.model {
        Model::FirstOrder => vec![T::zero(); final_x.len()],
        Model::SecondOrder => vec![v_end],
    };
    samples.push(Sample { t: arrival, x: final_x.clone(), v: final_v.clone(), u: vec![T::zero(); final_x.len()] });
    Ok(Trajectory { samples, schedule, arrival, final_x, final_v })
}

/// Full-speed straight-line schedule.
pub fn first_order_schedule<T: Scalar>(x0: &[T], target: &[T], u_max: T) -> ControlSchedule<T> {
    let d = scalar::dist(x0, target);
    if d == T::zero() {
        return ControlSchedule { direction: vec![T::zero(); x0.len()], segments: Vec::new() };
    }
    let direction = x0.iter().zip(target).map(|(&a, &b)| (b - a) / d).collect();
    ControlSchedule { direction, segments: vec![Segment { duration: d / u_max, u: u_max }] }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn feedback_examples() {
        assert_eq!(bang_bang_control((0.0, 0.0), (1.0, 0.0), 1.0), 1.0);
        assert_eq!(bang_bang_control((1.0, 0.0), (0.0, 0.0), 1.0), -1.0);
        assert_eq!(bang_bang_control((0.5, 1.0), (1.0, 0.0), 1.0), -1.0);
        assert_eq!(bang_bang_control((1.0, 0.0), (1.0, 0.0), 1.0), 0.0);
        assert_eq!(bang_bang_control((0.0, 0.0), (1.0, 0.0), 3.0), 3.0);
    }

    #[test]
    fn on_switching_curve_braking_reaches_target() {
        let agent = AgentDynamics::<f64>::second_order(0.5, 1.0, 1.0).unwrap();
        let tr = simulate_trajectory(&agent, &[1.0], 0.0, 0.1).unwrap();
        assert_eq!(tr.schedule.segments, vec![Segment { duration: 1.0, u: -1.0 }]);
        assert!((tr.final_x[0] - 1.0).abs() < 1e-12 && tr.final_v[0].abs() < 1e-12);
    }

    #[test]
    fn rest_to_rest_schedule() {
        let agent = AgentDynamics::<f64>::second_order(0.0, 0.0, 1.0).unwrap();
        let tr = simulate_trajectory(&agent, &[1.0], 0.0, 0.25).unwrap();
        assert_eq!(tr.schedule.segments, vec![Segment { duration: 1.0, u: 1.0 }, Segment { duration: 1.0, u: -1.0 }]);
        assert_eq!(tr.arrival, 2.0);
        assert_eq!(tr.samples.len(), 9);
        assert_eq!(tr.samples[4].x, vec![0.5]);
        assert_eq!(tr.samples[4].v, vec![1.0]);
        assert_eq!(tr.samples[4].u, vec![-1.0]);
        assert_eq!(tr.samples.last().unwrap().x, vec![1.0]);
    }

    #[test]
    fn already_there() {
        let agent = AgentDynamics::<f64>::second_order(0.0, 0.0, 1.0).unwrap();
        let tr = simulate_trajectory(&agent, &[0.0], 0.0, 0.1).unwrap();
        assert!(tr.schedule.segments.is_empty());
        assert_eq!(tr.arrival, 0.0);
        assert_eq!(tr.samples.len(), 1);
    }

    #[test]
    fn coarse_dt_keeps_endpoints() {
        let agent = AgentDynamics::<f64>::second_order(-2.0, 0.0, 1.0).unwrap();
        let tr = simulate_trajectory(&agent, &[2.0], 0.0, 100.0).unwrap();
        assert_eq!(tr.samples.len(), 2);
        assert_eq!(tr.samples[0].t, 0.0);
        assert_eq!(tr.samples[1].t, 4.0);
    }

    #[test]
    fn first_order_straight_line() {
        let agent = AgentDynamics::<f64>::first_order(vec![0.0, 0.0], 2.0).unwrap();
        let tr = simulate_trajectory(&agent, &[3.0, 4.0], 0.0, 1.0).unwrap();
        assert_eq!(tr.arrival, 2.5);
        assert_eq!(tr.schedule.direction, vec![0.6, 0.8]);
        assert!((tr.final_x[0] - 3.0).abs() < 1e-12 && (tr.final_x[1] - 4.0).abs() < 1e-12);
        assert_eq!(tr.samples[1].v, vec![2.0 * 0.6, 2.0 * 0.8]);
        assert!(simulate_trajectory(&agent, &[3.0, 4.0], 1.0, 1.0).is_err());
    }

    #[test]
    fn hold_extends_to_horizon() {
        let agent = AgentDynamics::<f64>::second_order(0.0, 0.0, 1.0).unwrap();
        let mut tr = simulate_trajectory(&agent, &[1.0], 0.0, 0.5).unwrap();
        tr.hold_until(3.2, 0.5);
        let ts: Vec<f64> = tr.samples.iter().map(|s| s.t).collect();
        assert_eq!(ts, vec![0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.2]);
        assert!(tr.samples[5..].iter().all(|s| s.x == vec![1.0] && s.u == vec![0.0]));
    }

    #[test]
    fn moving_start_overshoot() {
        // Heading left at speed 2, target to the right: brake, reverse, brake.
        let agent = AgentDynamics::<f64>::second_order(0.0, -2.0, 1.0).unwrap();
        let tr = simulate_trajectory(&agent, &[1.0], 0.0, 0.01).unwrap();
        assert_eq!(tr.schedule.segments.len(), 2);
        assert_eq!(tr.schedule.segments[0].u, 1.0);
        assert!((tr.final_x[0] - 1.0).abs() < 1e-12 && tr.final_v[0].abs() < 1e-12);
        let t = super::super::reach::second_order_reach_time_general::<f64>((0.0, -2.0), 1.0, 0.0, 1.0).unwrap();
        assert!((tr.arrival - t).abs() < 1e-12);
    }
}
