//! Projection onto the epigraph of a generic convex function.
//!
//! The nearest point `q` of `{(x, t) : f(x) <= t}` to an outside point `p`
//! satisfies `q.x = prox_{lambda f}(p.x)` and `q.t = p.t + lambda` for the
//! multiplier `lambda >= 0` at which `f(q.x) = q.t`. The residual
//! `phi(lambda) = f(prox_{lambda f}(p.x)) - p.t - lambda` is decreasing, so the
//! multiplier is found by bisection. The proximal step itself is solved by
//! bisection on the subgradient sign in one dimension and by the ellipsoid
//! method (with a certified stopping radius) in higher dimensions, unless the
//! function supplies a closed form.

use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::scalar::{self, tol_floor, Scalar};

use super::point::PointTime;
use super::sets::ProjectableSet;

/// A convex function over `R^n` given by value and subgradient oracles.
pub trait ConvexFunction<T: Scalar>: Send + Sync {
    fn dim(&self) -> usize;

    fn value(&self, x: &[T]) -> T;

    /// Any element of the subdifferential at `x`.
    fn subgradient(&self, x: &[T]) -> Vec<T>;

    /// `argmin_y step * f(y) + |y - v|^2 / 2`, when known in closed form.
    fn prox(&self, _v: &[T], _step: T) -> Option<Vec<T>> {
        None
    }
}

/// `slope * ||x - center|| + offset`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledNorm<T> {
    pub center: Vec<T>,
    pub slope: T,
    pub offset: T,
}

impl<T: Scalar> ConvexFunction<T> for ScaledNorm<T> {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn value(&self, x: &[T]) -> T {
        self.slope * scalar::dist(x, &self.center) + self.offset
    }

    fn subgradient(&self, x: &[T]) -> Vec<T> {
        let d = scalar::dist(x, &self.center);
        if d == T::zero() {
            return vec![T::zero(); x.len()];
        }
        x.iter().zip(&self.center).map(|(&a, &c)| self.slope * (a - c) / d).collect()
    }
}

/// `<a, x> + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct Affine<T> {
    pub a: Vec<T>,
    pub b: T,
}

impl<T: Scalar> ConvexFunction<T> for Affine<T> {
    fn dim(&self) -> usize {
        self.a.len()
    }
    fn value(&self, x: &[T]) -> T {
        scalar::dot(&self.a, x) + self.b
    }
    fn subgradient(&self, _x: &[T]) -> Vec<T> {
        self.a.clone()
    }
}

/// `weight * ||x - center||^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SquaredDistance<T> {
    pub center: Vec<T>,
    pub weight: T,
}

impl<T: Scalar> ConvexFunction<T> for SquaredDistance<T> {
    fn dim(&self) -> usize {
        self.center.len()
    }
    fn value(&self, x: &[T]) -> T {
        let d = scalar::dist(x, &self.center);
        self.weight * d * d
    }
    fn subgradient(&self, x: &[T]) -> Vec<T> {
        let two = T::lit(2.0);
        x.iter().zip(&self.center).map(|(&a, &c)| two * self.weight * (a - c)).collect()
    }
}

/// Wraps a pair of closures as a [`ConvexFunction`].
pub struct FnConvex<V, G> {
    dim: usize,
    value: V,
    subgradient: G,
}

impl<V, G> FnConvex<V, G> {
    pub fn new(dim: usize, value: V, subgradient: G) -> Self {
        Self { dim, value, subgradient }
    }
}

impl<T, V, G> ConvexFunction<T> for FnConvex<V, G>
where
    T: Scalar,
    V: Fn(&[T]) -> T + Send + Sync,
    G: Fn(&[T]) -> Vec<T> + Send + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, x: &[T]) -> T {
        (self.value)(x)
    }
    fn subgradient(&self, x: &[T]) -> Vec<T> {
        (self.subgradient)(x)
    }
}

/// Axis-aligned bounds on the function domain.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainBox<T> {
    pub lower: Vec<T>,
    pub upper: Vec<T>,
}

impl<T: Scalar> DomainBox<T> {
    fn contains(&self, x: &[T], tol: T) -> bool {
        x.iter().zip(self.lower.iter().zip(&self.upper)).all(|(&v, (&lo, &hi))| v >= lo - tol && v <= hi + tol)
    }
}

/// The epigraph `{(x, t) : f(x) <= t}` of a convex function.
#[derive(Clone)]
pub struct ConvexEpigraph<T: Scalar> {
    pub f: Arc<dyn ConvexFunction<T>>,
    pub domain_box: Option<DomainBox<T>>,
    /// Accuracy target of the numeric projection.
    pub tol: T,
    pub max_iters: usize,
}

impl<T: Scalar> fmt::Debug for ConvexEpigraph<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConvexEpigraph")
            .field("dim", &self.f.dim())
            .field("domain_box", &self.domain_box)
            .field("tol", &self.tol)
            .finish_non_exhaustive()
    }
}

impl<T: Scalar> ConvexEpigraph<T> {
    pub fn new(f: impl ConvexFunction<T> + 'static) -> Self {
        Self::from_arc(Arc::new(f))
    }

    pub fn from_arc(f: Arc<dyn ConvexFunction<T>>) -> Self {
        Self { f, domain_box: None, tol: tol_floor(1e-8), max_iters: 20_000 }
    }

    pub fn with_domain(mut self, domain: DomainBox<T>) -> Result<Self> {
        let n = self.f.dim();
        if domain.lower.len() != n || domain.upper.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: domain.lower.len() });
        }
        if domain.lower.iter().zip(&domain.upper).any(|(lo, hi)| !(lo < hi)) {
            return Err(Error::InvalidParameter("domain box needs lower < upper".into()));
        }
        self.domain_box = Some(domain);
        Ok(self)
    }

    pub fn with_tol(mut self, tol: T) -> Self {
        self.tol = tol;
        self
    }

    /// Midpoint convexity spot check `f((a+b)/2) <= (f(a)+f(b))/2` on random
    /// pairs drawn from `[-radius, radius]^n`. Returns the number of failures.
    pub fn spot_check_convexity<R: Rng>(&self, rng: &mut R, samples: usize, radius: f64) -> usize {
        let n = self.f.dim();
        let mut failures = 0;
        for _ in 0..samples {
            let a: Vec<T> = (0..n).map(|_| T::lit(rng.gen_range(-radius..=radius))).collect();
            let b: Vec<T> = (0..n).map(|_| T::lit(rng.gen_range(-radius..=radius))).collect();
            let mid: Vec<T> = a.iter().zip(&b).map(|(&u, &v)| (u + v) * T::lit(0.5)).collect();
            let fa = self.f.value(&a);
            let fb = self.f.value(&b);
            let slack = T::lit(1e-9) * (T::one() + fa.abs() + fb.abs());
            if self.f.value(&mid) > (fa + fb) * T::lit(0.5) + slack {
                failures += 1;
            }
        }
        failures
    }

    fn prox(&self, v: &[T], step: T) -> Result<Vec<T>> {
        if step == T::zero() {
            return Ok(v.to_vec());
        }
        if let Some(y) = self.f.prox(v, step) {
            return Ok(y);
        }
        let inner_tol = self.tol * T::lit(1e-3);
        if v.len() == 1 {
            Ok(vec![prox_bisect(&*self.f, v[0], step, inner_tol)])
        } else {
            prox_ellipsoid(&*self.f, v, step, inner_tol, self.max_iters)
        }
    }
}

fn prox_bisect<T: Scalar>(f: &dyn ConvexFunction<T>, v: T, step: T, tol: T) -> T {
    // |y* - v| <= 2 * step * |g(v)| for the minimiser y*.
    let g0 = f.subgradient(&[v])[0];
    let radius = T::lit(2.0) * step * g0.abs() + tol;
    let (mut lo, mut hi) = (v - radius, v + radius);
    for _ in 0..200 {
        let mid = (lo + hi) * T::lit(0.5);
        if hi - lo <= tol || mid <= lo || mid >= hi {
            break;
        }
        let slope = step * f.subgradient(&[mid])[0] + (mid - v);
        if slope > T::zero() {
            hi = mid;
        } else if slope < T::zero() {
            lo = mid;
        } else {
            return mid;
        }
    }
    (lo + hi) * T::lit(0.5)
}

fn prox_ellipsoid<T: Scalar>(f: &dyn ConvexFunction<T>, v: &[T], step: T, tol: T, max_iters: usize) -> Result<Vec<T>> {
    let n = v.len();
    let nt = T::from_usize(n).expect("dimension fits scalar");
    let g0 = f.subgradient(v);
    let radius = T::lit(2.0) * step * scalar::norm(&g0);
    if radius == T::zero() {
        return Ok(v.to_vec());
    }
    let radius = radius * T::lit(1.01) + tol;

    let mut c = v.to_vec();
    // Shape matrix P, row-major; the ellipsoid {z : (z-c)' P^-1 (z-c) <= 1}
    // always contains the minimiser.
    let mut p = vec![T::zero(); n * n];
    for i in 0..n {
        p[i * n + i] = radius * radius;
    }
    let expand = nt * nt / (nt * nt - T::one());
    let shrink = T::lit(2.0) / (nt + T::one());

    for _ in 0..max_iters {
        let trace: T = (0..n).map(|i| p[i * n + i]).sum();
        if trace.sqrt() <= tol {
            return Ok(c);
        }
        let gf = f.subgradient(&c);
        let g: Vec<T> = gf.iter().zip(c.iter().zip(v)).map(|(&gi, (&ci, &vi))| step * gi + (ci - vi)).collect();
        if g.iter().all(|&gi| gi == T::zero()) {
            return Ok(c);
        }
        let pg: Vec<T> = (0..n).map(|i| (0..n).map(|j| p[i * n + j] * g[j]).sum()).collect();
        let gpg = scalar::dot(&g, &pg);
        if !(gpg > T::zero()) {
            // The ellipsoid has collapsed below floating point resolution.
            return Ok(c);
        }
        let b: Vec<T> = pg.iter().map(|&x| x / gpg.sqrt()).collect();
        for i in 0..n {
            c[i] -= b[i] / (nt + T::one());
        }
        for i in 0..n {
            for j in 0..n {
                p[i * n + j] = expand * (p[i * n + j] - shrink * b[i] * b[j]);
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let s = (p[i * n + j] + p[j * n + i]) * T::lit(0.5);
                p[i * n + j] = s;
                p[j * n + i] = s;
            }
        }
    }
    let trace: T = (0..n).map(|i| p[i * n + i]).sum();
    Err(Error::NotConverged {
        routine: "ellipsoid prox",
        iterations: max_iters,
        residual: trace.sqrt().as_f64(),
        last: c.iter().map(|x| x.as_f64()).collect(),
    })
}

/// Projects `p` onto `epi f` to within `tol`.
///
/// Points already in the epigraph are returned unchanged. Otherwise the
/// result satisfies `f(q.x) <= q.t + tol`.
pub fn project_epigraph<T: Scalar>(p: &PointTime<T>, epi: &ConvexEpigraph<T>, tol: T) -> Result<PointTime<T>> {
    if !(tol > T::zero()) {
        return Err(Error::InvalidParameter("epigraph tolerance must be positive".into()));
    }
    let n = epi.f.dim();
    p.check_dim(n)?;
    let fv = epi.f.value(&p.x);
    let excess = fv - p.t;
    if excess <= T::zero() {
        return Ok(p.clone());
    }

    let residual = |lambda: T| -> Result<(T, Vec<T>)> {
        let y = epi.prox(&p.x, lambda)?;
        Ok((epi.f.value(&y) - p.t - lambda, y))
    };

    let mut lo = T::zero();
    let mut hi = excess;
    let (mut r_hi, mut y_hi) = residual(hi)?;
    let mut grow = 0;
    while r_hi > T::zero() {
        // Only reachable through inexact inner solves.
        lo = hi;
        hi *= T::lit(2.0);
        (r_hi, y_hi) = residual(hi)?;
        grow += 1;
        if grow > 60 {
            return Err(Error::NotConverged {
                routine: "epigraph multiplier bracket",
                iterations: grow,
                residual: r_hi.as_f64(),
                last: y_hi.iter().map(|x| x.as_f64()).collect(),
            });
        }
    }

    let lambda_tol = tol * T::lit(1e-2);
    let mut iters = 0;
    while hi - lo > lambda_tol {
        let mid = (lo + hi) * T::lit(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        let (r, y) = residual(mid)?;
        if r > T::zero() {
            lo = mid;
        } else {
            hi = mid;
            y_hi = y;
        }
        iters += 1;
        if iters > epi.max_iters {
            break;
        }
    }

    let q = PointTime { x: y_hi, t: p.t + hi };
    let violation = epi.f.value(&q.x) - q.t;
    if violation > tol {
        return Err(Error::NotConverged {
            routine: "epigraph projection",
            iterations: iters,
            residual: violation.as_f64(),
            last: q.to_f64_vec(),
        });
    }
    if let Some(domain) = &epi.domain_box {
        if !domain.contains(&q.x, tol) {
            return Err(Error::OutsideDomain(q.to_f64_vec()));
        }
    }
    Ok(q)
}

impl<T: Scalar> ProjectableSet<T> for ConvexEpigraph<T> {
    fn dim(&self) -> usize {
        self.f.dim()
    }

    fn contains(&self, p: &PointTime<T>, tol: T) -> Result<bool> {
        p.check_dim(self.dim())?;
        if let Some(domain) = &self.domain_box {
            if !domain.contains(&p.x, tol) {
                return Ok(false);
            }
        }
        Ok(self.f.value(&p.x) - p.t <= tol)
    }

    fn project(&self, p: &PointTime<T>) -> Result<PointTime<T>> {
        project_epigraph(p, self, self.tol)
    }
}
