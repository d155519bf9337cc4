use std::ops::{Add, Sub};

use crate::error::{Error, Result};
use crate::scalar::{self, Scalar};

/// A point `(x, t)` of state-time space: `n` spatial coordinates plus a height.
///
/// The height is a time in seconds, or a transformed time (e.g. seconds
/// squared) depending on which attainable-set coordinates are in use.
#[derive(Debug, Clone, PartialEq)]
pub struct PointTime<T> {
    pub x: Vec<T>,
    pub t: T,
}

impl<T: Scalar> PointTime<T> {
    /// Builds a point, rejecting empty or non-finite input.
    pub fn new(x: Vec<T>, t: T) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::InvalidParameter("point needs n >= 1 spatial coordinates".into()));
        }
        let p = Self { x, t };
        if !p.is_finite() {
            return Err(Error::NonFinite("point"));
        }
        Ok(p)
    }

    /// Convenience constructor for the one-dimensional case.
    pub fn scalar(x: T, t: T) -> Self {
        Self { x: vec![x], t }
    }

    pub fn zeros(n: usize) -> Self {
        Self { x: vec![T::zero(); n], t: T::zero() }
    }

    /// Number of spatial coordinates.
    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.x.iter().all(|v| v.is_finite())
    }

    pub fn norm(&self) -> T {
        (scalar::dot(&self.x, &self.x) + self.t * self.t).sqrt()
    }

    pub fn dist(&self, other: &Self) -> T {
        let dt = self.t - other.t;
        let sx: T = self.x.iter().zip(&other.x).map(|(&a, &b)| (a - b) * (a - b)).sum();
        (sx + dt * dt).sqrt()
    }

    /// Distance between the spatial parts only.
    pub fn spatial_dist(&self, other: &Self) -> T {
        scalar::dist(&self.x, &other.x)
    }

    pub fn dot(&self, other: &Self) -> T {
        scalar::dot(&self.x, &other.x) + self.t * other.t
    }

    pub fn scale(&self, k: T) -> Self {
        Self { x: self.x.iter().map(|&v| v * k).collect(), t: self.t * k }
    }

    /// Flattens to `[x..., t]` as `f64`, for traces and error payloads.
    pub fn to_f64_vec(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.x.iter().map(|v| v.as_f64()).collect();
        out.push(self.t.as_f64());
        out
    }

    pub(crate) fn check_dim(&self, expected: usize) -> Result<()> {
        if self.x.len() != expected {
            return Err(Error::DimensionMismatch { expected, found: self.x.len() });
        }
        Ok(())
    }
}

impl<T: Scalar> Sub for &PointTime<T> {
    type Output = PointTime<T>;

    fn sub(self, rhs: Self) -> PointTime<T> {
        debug_assert_eq!(self.x.len(), rhs.x.len());
        PointTime { x: self.x.iter().zip(&rhs.x).map(|(&a, &b)| a - b).collect(), t: self.t - rhs.t }
    }
}

impl<T: Scalar> Add for &PointTime<T> {
    type Output = PointTime<T>;

    fn add(self, rhs: Self) -> PointTime<T> {
        debug_assert_eq!(self.x.len(), rhs.x.len());
        PointTime { x: self.x.iter().zip(&rhs.x).map(|(&a, &b)| a + b).collect(), t: self.t + rhs.t }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_and_nan() {
        assert!(PointTime::<f64>::new(vec![], 0.0).is_err());
        assert_eq!(PointTime::new(vec![f64::NAN], 0.0), Err(Error::NonFinite("point")));
        assert!(PointTime::new(vec![1.0, 2.0], f64::INFINITY).is_err());
    }

    #[test]
    fn arithmetic() {
        let a = PointTime::new(vec![1.0, 2.0], 3.0).unwrap();
        let b = PointTime::new(vec![0.5, -1.0], 1.0).unwrap();
        assert_eq!(&a - &b, PointTime { x: vec![0.5, 3.0], t: 2.0 });
        assert_eq!(&a + &b, PointTime { x: vec![1.5, 1.0], t: 4.0 });
        assert_eq!(a.dist(&a), 0.0);
        assert_eq!(a.spatial_dist(&b), (0.25f64 + 9.0).sqrt());
        assert_eq!(a.to_f64_vec(), vec![1.0, 2.0, 3.0]);
    }
}
