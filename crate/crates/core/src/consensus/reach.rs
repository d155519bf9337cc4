use crate::error::{Error, Result};
use crate::scalar::{self, Scalar};

fn check_u<T: Scalar>(u_max: T) -> Result<()> {
    if !(u_max > T::zero()) || !u_max.is_finite() {
        return Err(Error::InvalidParameter(format!("u_max must be positive, got {u_max}")));
    }
    Ok(())
}

/// Straight-line travel time `||x - x0|| / u_max`.
pub fn first_order_reach_time<T: Scalar>(x0: &[T], x: &[T], u_max: T) -> Result<T> {
    check_u(u_max)?;
    if x0.len() != x.len() {
        return Err(Error::DimensionMismatch { expected: x0.len(), found: x.len() });
    }
    Ok(scalar::dist(x0, x) / u_max)
}

/// Rest-to-rest time of the accelerate/decelerate maneuver, `2 sqrt(|x - x0| / u_max)`.
pub fn second_order_reach_time_zero_vel<T: Scalar>(x0: T, x: T, u_max: T) -> Result<T> {
    check_u(u_max)?;
    Ok(T::lit(2.0) * ((x - x0).abs() / u_max).sqrt())
}

/// `s = t^2`.
pub fn time_square_transform<T: Scalar>(t: T) -> Result<T> {
    if !(t >= T::zero()) {
        return Err(Error::InvalidParameter(format!("time must be nonnegative, got {t}")));
    }
    Ok(t * t)
}

/// `t = sqrt(s)`.
pub fn inverse_time_square<T: Scalar>(s: T) -> Result<T> {
    if !(s >= T::zero()) {
        return Err(Error::InvalidParameter(format!("squared time must be nonnegative, got {s}")));
    }
    Ok(s.sqrt())
}

/// Sign-deciding quantity of the bang-bang law,
/// `x2 - x1 - (v1 + v2) |v1 - v2| / (2 u_max)`.
///
/// Positive: the first phase uses `+u_max`. Negative: `-u_max`.
pub fn switching_function<T: Scalar>(from: (T, T), to: (T, T), u_max: T) -> T {
    let (x1, v1) = from;
    let (x2, v2) = to;
    x2 - x1 - (v1 + v2) * (v1 - v2).abs() / (T::lit(2.0) * u_max)
}

/// Minimum time to steer a double integrator from `(x1, v1)` to `(x2, v2)`.
///
/// With positions and velocities scaled by `1 / u_max` (time is unchanged),
/// the time `t` solves
///
/// * `(t + v1 + v2)^2 = 4 (x2 - x1) + 2 (v1^2 + v2^2)` when the switching function is positive,
/// * `(t - v1 - v2)^2 = -4 (x2 - x1) + 2 (v1^2 + v2^2)` when it is negative,
///
/// and `t = |v2 - v1|` on the switching curve itself.
pub fn second_order_reach_time_general<T: Scalar>(from: (T, T), to_position: T, v2: T, u_max: T) -> Result<T> {
    check_u(u_max)?;
    let (x1, v1) = from;
    if ![x1, v1, to_position, v2].iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("reach-time endpoint"));
    }
    let sigma = switching_function(from, (to_position, v2), u_max);
    let (d, a, b) = ((to_position - x1) / u_max, v1 / u_max, v2 / u_max);
    let two = T::lit(2.0);
    let four = T::lit(4.0);
    let vv = two * (a * a + b * b);
    let (rad, shift) = if sigma > T::zero() {
        (four * d + vv, -(a + b))
    } else if sigma < T::zero() {
        (-four * d + vv, a + b)
    } else {
        return Ok((b - a).abs());
    };
    // Rounding near the switching curve can push the radicand a hair below zero.
    let slack = T::epsilon() * T::lit(64.0) * (four * d.abs() + vv + T::one());
    if rad < -slack {
        return Err(Error::Infeasible(format!("no real reach time (radicand {rad})")));
    }
    let t = shift + rad.max(T::zero()).sqrt();
    if t < -slack {
        return Err(Error::Infeasible(format!("reach time root is negative ({t})")));
    }
    Ok(t.max(T::zero()))
}
