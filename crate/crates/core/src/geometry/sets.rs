use crate::error::{Error, Result};
use crate::scalar::{self, Scalar};

use super::epigraph::ConvexEpigraph;
use super::point::PointTime;

/// A closed convex subset of state-time space with an orthogonal projection.
pub trait ProjectableSet<T: Scalar> {
    /// Spatial dimension `n` of the points this set accepts.
    fn dim(&self) -> usize;

    /// True iff `p` violates the defining inequality by at most `tol`.
    fn contains(&self, p: &PointTime<T>, tol: T) -> Result<bool>;

    /// The nearest point of the set to `p`.
    fn project(&self, p: &PointTime<T>) -> Result<PointTime<T>>;
}

impl<T: Scalar, S: ProjectableSet<T> + ?Sized> ProjectableSet<T> for &S {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn contains(&self, p: &PointTime<T>, tol: T) -> Result<bool> {
        (**self).contains(p, tol)
    }
    fn project(&self, p: &PointTime<T>) -> Result<PointTime<T>> {
        (**self).project(p)
    }
}

impl<T: Scalar, S: ProjectableSet<T> + ?Sized> ProjectableSet<T> for Box<S> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn contains(&self, p: &PointTime<T>, tol: T) -> Result<bool> {
        (**self).contains(p, tol)
    }
    fn project(&self, p: &PointTime<T>) -> Result<PointTime<T>> {
        (**self).project(p)
    }
}

// Rounding slack for "already inside" tests, so that re-projecting the output
// of a closed-form projection returns it bit-for-bit.
fn boundary_slack<T: Scalar>(scale: T) -> T {
    T::epsilon() * T::lit(16.0) * (scale + T::one())
}

/// The horizontal plane `{(x, t) | t = t_min}`.
#[derive(Debug, Clone, PartialEq)]
pub struct HorizontalHyperplane<T> {
    pub dim: usize,
    pub t_min: T,
}

impl<T: Scalar> HorizontalHyperplane<T> {
    pub fn new(dim: usize, t_min: T) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("plane dimension must be >= 1".into()));
        }
        if !t_min.is_finite() {
            return Err(Error::NonFinite("plane height"));
        }
        Ok(Self { dim, t_min })
    }
}

/// Drops `p` vertically onto the plane.
pub fn project_hyperplane<T: Scalar>(p: &PointTime<T>, plane: &HorizontalHyperplane<T>) -> Result<PointTime<T>> {
    p.check_dim(plane.dim)?;
    Ok(PointTime { x: p.x.clone(), t: plane.t_min })
}

impl<T: Scalar> ProjectableSet<T> for HorizontalHyperplane<T> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn contains(&self, p: &PointTime<T>, tol: T) -> Result<bool> {
        p.check_dim(self.dim)?;
        Ok((p.t - self.t_min).abs() <= tol)
    }

    fn project(&self, p: &PointTime<T>) -> Result<PointTime<T>> {
        project_hyperplane(p, self)
    }
}

/// The second-order cone `{(x, t) : slope * ||x - apex.x|| <= t - apex.t}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondOrderCone<T> {
    pub apex: PointTime<T>,
    pub slope: T,
}

impl<T: Scalar> SecondOrderCone<T> {
    pub fn new(apex: PointTime<T>, slope: T) -> Result<Self> {
        if !apex.is_finite() {
            return Err(Error::NonFinite("cone apex"));
        }
        if apex.x.is_empty() {
            return Err(Error::InvalidParameter("cone apex needs n >= 1".into()));
        }
        if !(slope > T::zero()) || !slope.is_finite() {
            return Err(Error::InvalidParameter(format!("cone slope must be positive, got {slope}")));
        }
        Ok(Self { apex, slope })
    }

    /// `slope * ||x - apex.x|| + apex.t`, the height of the cone's surface over `x`.
    pub fn height_at(&self, x: &[T]) -> T {
        self.slope * scalar::dist(x, &self.apex.x) + self.apex.t
    }
}

/// Closed-form projection onto a second-order cone.
///
/// With the apex shifted to the origin, `y = p.x`, `r = ||y||` and `a = slope`:
/// points with `a r <= t` are kept, points with `r <= -a t` (the polar cone)
/// go to the apex, and everything else lands on the ray through `y / r` at
/// radius `(r + a t) / (1 + a^2)`.
pub fn project_cone<T: Scalar>(p: &PointTime<T>, cone: &SecondOrderCone<T>) -> Result<PointTime<T>> {
    p.check_dim(cone.apex.dim())?;
    let a = cone.slope;
    let y: Vec<T> = p.x.iter().zip(&cone.apex.x).map(|(&pi, &ci)| pi - ci).collect();
    let t = p.t - cone.apex.t;
    let r = scalar::norm(&y);

    let scale = a * (scalar::norm(&p.x) + scalar::norm(&cone.apex.x)) + p.t.abs() + cone.apex.t.abs();
    if a * r <= t + boundary_slack(scale) {
        return Ok(p.clone());
    }
    if r <= -a * t {
        return Ok(cone.apex.clone());
    }
    let radius = (r + a * t) / (a * a + T::one());
    let x = y.iter().zip(&cone.apex.x).map(|(&yi, &ci)| ci + radius * (yi / r)).collect();
    Ok(PointTime { x, t: cone.apex.t + a * radius })
}

impl<T: Scalar> ProjectableSet<T> for SecondOrderCone<T> {
    fn dim(&self) -> usize {
        self.apex.dim()
    }

    fn contains(&self, p: &PointTime<T>, tol: T) -> Result<bool> {
        p.check_dim(self.dim())?;
        Ok(self.height_at(&p.x) - p.t <= tol)
    }

    fn project(&self, p: &PointTime<T>) -> Result<PointTime<T>> {
        project_cone(p, self)
    }
}

/// The halfspace `{p : <normal, p> <= offset}` of state-time space.
#[derive(Debug, Clone, PartialEq)]
pub struct Halfspace<T> {
    pub normal: PointTime<T>,
    pub offset: T,
}

impl<T: Scalar> Halfspace<T> {
    pub fn new(normal: PointTime<T>, offset: T) -> Result<Self> {
        if !normal.is_finite() || !offset.is_finite() {
            return Err(Error::NonFinite("halfspace"));
        }
        if normal.norm() == T::zero() {
            return Err(Error::InvalidParameter("halfspace normal must be nonzero".into()));
        }
        Ok(Self { normal, offset })
    }
}

impl<T: Scalar> ProjectableSet<T> for Halfspace<T> {
    fn dim(&self) -> usize {
        self.normal.dim()
    }

    fn contains(&self, p: &PointTime<T>, tol: T) -> Result<bool> {
        p.check_dim(self.dim())?;
        Ok(self.normal.dot(p) - self.offset <= tol)
    }

    fn project(&self, p: &PointTime<T>) -> Result<PointTime<T>> {
        p.check_dim(self.dim())?;
        let excess = self.normal.dot(p) - self.offset;
        let scale = self.normal.norm() * p.norm() + self.offset.abs();
        if excess <= boundary_slack(scale) {
            return Ok(p.clone());
        }
        let k = excess / self.normal.dot(&self.normal);
        Ok(p - &self.normal.scale(k))
    }
}

/// The closed Euclidean ball of state-time space.
#[derive(Debug, Clone, PartialEq)]
pub struct Ball<T> {
    pub center: PointTime<T>,
    pub radius: T,
}

impl<T: Scalar> Ball<T> {
    pub fn new(center: PointTime<T>, radius: T) -> Result<Self> {
        if !center.is_finite() {
            return Err(Error::NonFinite("ball center"));
        }
        if !(radius >= T::zero()) || !radius.is_finite() {
            return Err(Error::InvalidParameter(format!("ball radius must be >= 0, got {radius}")));
        }
        Ok(Self { center, radius })
    }
}

impl<T: Scalar> ProjectableSet<T> for Ball<T> {
    fn dim(&self) -> usize {
        self.center.dim()
    }

    fn contains(&self, p: &PointTime<T>, tol: T) -> Result<bool> {
        p.check_dim(self.dim())?;
        Ok(p.dist(&self.center) - self.radius <= tol)
    }

    fn project(&self, p: &PointTime<T>) -> Result<PointTime<T>> {
        p.check_dim(self.dim())?;
        let d = p.dist(&self.center);
        let scale = p.norm() + self.center.norm() + self.radius;
        if d <= self.radius + boundary_slack(scale) {
            return Ok(p.clone());
        }
        let offset = &(p - &self.center).scale(self.radius / d);
        Ok(&self.center + offset)
    }
}

/// Any of the supported convex set kinds, for heterogeneous set lists.
#[derive(Debug, Clone)]
pub enum ConvexSet<T: Scalar> {
    Plane(HorizontalHyperplane<T>),
    Cone(SecondOrderCone<T>),
    Halfspace(Halfspace<T>),
    Ball(Ball<T>),
    Epigraph(ConvexEpigraph<T>),
}

impl<T: Scalar> ConvexSet<T> {
    fn inner(&self) -> &dyn ProjectableSet<T> {
        match self {
            ConvexSet::Plane(s) => s,
            ConvexSet::Cone(s) => s,
            ConvexSet::Halfspace(s) => s,
            ConvexSet::Ball(s) => s,
            ConvexSet::Epigraph(s) => s,
        }
    }
}

impl<T: Scalar> ProjectableSet<T> for ConvexSet<T> {
    fn dim(&self) -> usize {
        self.inner().dim()
    }
    fn contains(&self, p: &PointTime<T>, tol: T) -> Result<bool> {
        self.inner().contains(p, tol)
    }
    fn project(&self, p: &PointTime<T>) -> Result<PointTime<T>> {
        self.inner().project(p)
    }
}

impl<T: Scalar> From<HorizontalHyperplane<T>> for ConvexSet<T> {
    fn from(s: HorizontalHyperplane<T>) -> Self {
        ConvexSet::Plane(s)
    }
}
impl<T: Scalar> From<SecondOrderCone<T>> for ConvexSet<T> {
    fn from(s: SecondOrderCone<T>) -> Self {
        ConvexSet::Cone(s)
    }
}
impl<T: Scalar> From<Halfspace<T>> for ConvexSet<T> {
    fn from(s: Halfspace<T>) -> Self {
        ConvexSet::Halfspace(s)
    }
}
impl<T: Scalar> From<Ball<T>> for ConvexSet<T> {
    fn from(s: Ball<T>) -> Self {
        ConvexSet::Ball(s)
    }
}
impl<T: Scalar> From<ConvexEpigraph<T>> for ConvexSet<T> {
    fn from(s: ConvexEpigraph<T>) -> Self {
        ConvexSet::Epigraph(s)
    }
}

/// Membership test through any set; see [`ProjectableSet::contains`].
pub fn contains<T: Scalar, S: ProjectableSet<T> + ?Sized>(set: &S, p: &PointTime<T>, tol: T) -> Result<bool> {
    if !(tol >= T::zero()) {
        return Err(Error::InvalidParameter("tolerance must be >= 0".into()));
    }
    set.contains(p, tol)
}
