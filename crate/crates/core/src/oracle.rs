//! Slow brute-force verifiers.
//!
//! Nothing here calls into the solvers; the oracles only evaluate the
//! functions or membership tests they are handed. They work in `f64`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::PointTime;

/// Tensor grid over an axis-aligned box, `resolution` nodes per axis.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub resolution: usize,
}

impl GridSpec {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>, resolution: usize) -> Result<Self> {
        let g = Self { lower, upper, resolution };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.lower.len() != self.upper.len() {
            return Err(Error::DimensionMismatch { expected: self.lower.len(), found: self.upper.len() });
        }
        if self.lower.is_empty() || self.lower.len() > 3 {
            return Err(Error::InvalidParameter("grid search supports 1 to 3 dimensions".into()));
        }
        if self.resolution < 3 {
            return Err(Error::InvalidParameter("grid resolution must be >= 3".into()));
        }
        if !self.lower.iter().zip(&self.upper).all(|(l, u)| l.is_finite() && u.is_finite() && l < u) {
            return Err(Error::InvalidParameter("grid box needs finite lower < upper".into()));
        }
        Ok(())
    }

    /// Largest node spacing over the axes.
    pub fn spacing(&self) -> f64 {
        let m = (self.resolution - 1) as f64;
        self.lower.iter().zip(&self.upper).map(|(l, u)| (u - l) / m).fold(0.0, f64::max)
    }

    fn coord(&self, axis: usize, k: usize) -> f64 {
        // k / m rather than k * step, so a grid with 2m + 1 nodes reproduces
        // every node of the m + 1 grid bit for bit.
        let frac = k as f64 / (self.resolution - 1) as f64;
        self.lower[axis] + (self.upper[axis] - self.lower[axis]) * frac
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridResult {
    pub x_best: Vec<f64>,
    /// `max_i f_i(x_best)`.
    pub value: f64,
    /// Largest node spacing.
    pub spacing: f64,
    /// Largest slope of the max-function between neighbouring nodes.
    pub lipschitz: f64,
    /// `lipschitz * spacing * sqrt(dim) / 2`: how far `value` may sit above
    /// the true minimum over the box.
    pub error_bound: f64,
}

/// Minimizes `max_i f_i` over the nodes of `grid`. Ties go to the lowest node index.
pub fn grid_minmax<F: Fn(&[f64]) -> f64>(functions: &[F], grid: &GridSpec) -> Result<GridResult> {
    if functions.is_empty() {
        return Err(Error::InvalidParameter("need at least one function".into()));
    }
    grid.validate()?;
    let d = grid.lower.len();
    let r = grid.resolution;
    let total = r.pow(d as u32);
    let eval = |x: &[f64]| functions.iter().map(|f| f(x)).fold(f64::NEG_INFINITY, f64::max);

    let mut values = Vec::with_capacity(total);
    let mut x = vec![0.0; d];
    for idx in 0..total {
        let mut rem = idx;
        for (axis, xi) in x.iter_mut().enumerate() {
            *xi = grid.coord(axis, rem % r);
            rem /= r;
        }
        values.push(eval(&x));
    }

    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v < values[best] || values[best].is_nan() {
            best = i;
        }
    }
    let mut lipschitz = 0.0_f64;
    let mut stride = 1;
    for axis in 0..d {
        let h = (grid.upper[axis] - grid.lower[axis]) / (r - 1) as f64;
        for i in 0..total {
            if (i / stride) % r + 1 < r {
                lipschitz = lipschitz.max((values[i + stride] - values[i]).abs() / h);
            }
        }
        stride *= r;
    }

    let mut rem = best;
    let x_best: Vec<f64> = (0..d)
        .map(|axis| {
            let k = rem % r;
            rem /= r;
            grid.coord(axis, k)
        })
        .collect();
    let spacing = grid.spacing();
    Ok(GridResult {
        x_best,
        value: values[best],
        spacing,
        lipschitz,
        error_bound: lipschitz * spacing * (d as f64).sqrt() / 2.0,
    })
}

/// Limits for [`numeric_projection`].
#[derive(Debug, Clone, PartialEq)]
pub struct OracleBudget {
    /// Cap on membership queries.
    pub max_evals: usize,
    pub seed: u64,
    /// Known feasible point, for sets too thin to hit by sampling.
    pub start: Option<PointTime<f64>>,
    /// Search stops once the trial step falls below this.
    pub min_step: f64,
}

impl Default for OracleBudget {
    fn default() -> Self {
        Self { max_evals: 2_000_000, seed: 0, start: None, min_step: 1e-11 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleProjection {
    pub point: PointTime<f64>,
    pub distance: f64,
    /// Largest `cos` of the angle between `p - q` and `z - q` over the
    /// sampled feasible points `z`; nonpositive up to noise at a true projection.
    pub max_cosine: f64,
    pub feasible_samples: usize,
    pub evals: usize,
}

struct Counted<'a, M> {
    member: &'a M,
    evals: usize,
    cap: usize,
}

impl<M: Fn(&PointTime<f64>) -> bool> Counted<'_, M> {
    fn test(&mut self, p: &PointTime<f64>) -> Result<bool> {
        if self.evals >= self.cap {
            return Err(Error::NotConverged {
                routine: "numeric_projection",
                iterations: self.evals,
                residual: f64::NAN,
                last: p.to_f64_vec(),
            });
        }
        self.evals += 1;
        Ok((self.member)(p))
    }
}

fn random_unit<R: Rng>(rng: &mut R, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if n > 1e-3 && n <= 1.0 {
            return v.into_iter().map(|a| a / n).collect();
        }
    }
}

fn offset(p: &PointTime<f64>, dir: &[f64], r: f64) -> PointTime<f64> {
    let n = p.x.len();
    PointTime { x: p.x.iter().zip(dir).map(|(a, d)| a + r * d).collect(), t: p.t + r * dir[n] }
}

fn lerp(a: &PointTime<f64>, b: &PointTime<f64>, s: f64) -> PointTime<f64> {
    PointTime { x: a.x.iter().zip(&b.x).map(|(u, v)| u + s * (v - u)).collect(), t: a.t + s * (b.t - a.t) }
}

/// Nearest point of a convex set to `p`, using nothing but a membership test.
///
/// A feasible point is found by sampling balls of growing radius around `p`
/// (or taken from `budget.start`). From then on the current point always
/// sits on the boundary, on the segment towards `p`: random feasible
/// neighbours are pulled back towards `p` by bisection and kept when they
/// end up closer. A direction that worked is tried again first with a
/// doubled radius; a run of failures halves the radius.
pub fn numeric_projection<M: Fn(&PointTime<f64>) -> bool>(
    membership: M,
    p: &PointTime<f64>,
    budget: &OracleBudget,
) -> Result<OracleProjection> {
    if !p.is_finite() {
        return Err(Error::NonFinite("oracle query point"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    let mut m = Counted { member: &membership, evals: 0, cap: budget.max_evals };
    let dim = p.dim() + 1;

    if m.test(p)? {
        return Ok(OracleProjection {
            point: p.clone(),
            distance: 0.0,
            max_cosine: 0.0,
            feasible_samples: 0,
            evals: m.evals,
        });
    }

    let start = match &budget.start {
        Some(s) if m.test(s)? => s.clone(),
        Some(_) => return Err(Error::Infeasible("oracle start point is not feasible".into())),
        None => {
            let mut found = None;
            let mut radius = 0.5;
            'search: while radius < 1e7 {
                for _ in 0..2000 {
                    let dir = random_unit(&mut rng, dim);
                    let z = offset(p, &dir, radius * rng.gen_range(0.0_f64..1.0).sqrt());
                    if m.test(&z)? {
                        found = Some(z);
                        break 'search;
                    }
                }
                radius *= 2.0;
            }
            found.ok_or_else(|| Error::Infeasible("no feasible point found around the query".into()))?
        }
    };

    let scale = p.dist(&start).max(1.0);
    // Boundary point on the segment from p to a feasible z.
    let pull = |m: &mut Counted<M>, z: &PointTime<f64>| -> Result<PointTime<f64>> {
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        while (hi - lo) * p.dist(z) > 1e-15 * scale && hi - lo > 1e-17 {
            let mid = 0.5 * (lo + hi);
            if m.test(&lerp(p, z, mid))? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(lerp(p, z, hi))
    };

    let mut feasible = vec![start.clone()];
    let mut q = pull(&mut m, &start)?;
    let mut best = q.dist(p);
    let mut step = 0.5 * best.max(1e-3);
    let mut last_dir: Option<Vec<f64>> = None;
    while step > budget.min_step * scale {
        let mut improved = false;
        for k in 0..25 {
            let dir = match (&last_dir, k) {
                (Some(d), 0) => d.clone(),
                _ => random_unit(&mut rng, dim),
            };
            let cand = offset(&q, &dir, step);
            if !m.test(&cand)? {
                continue;
            }
            if feasible.len() < 4096 {
                feasible.push(cand.clone());
            }
            let b = pull(&mut m, &cand)?;
            let d = b.dist(p);
            // Demand a real gain: bisection noise must not count as progress.
            if d < best - 1e-14 * scale {
                q = b;
                best = d;
                improved = true;
                last_dir = Some(dir);
                break;
            }
        }
        if improved {
            step = (2.0 * step).min(4.0 * scale);
        } else {
            step *= 0.5;
            last_dir = None;
        }
    }

    // Extra feasible samples spread around q for the certificate.
    let spread = 2.0 * best + 1.0;
    for _ in 0..2000 {
        let dir = random_unit(&mut rng, dim);
        let z = offset(&q, &dir, spread * rng.gen_range(0.0_f64..1.0));
        if m.test(&z)? {
            feasible.push(z);
        }
    }
    let r = p - &q;
    let rn = r.norm();
    let mut max_cosine = f64::NEG_INFINITY;
    let mut used = 0;
    for z in &feasible {
        let w = z - &q;
        let wn = w.norm();
        if wn > 1e-3 * spread {
            max_cosine = max_cosine.max(r.dot(&w) / (rn * wn));
            used += 1;
        }
    }
    Ok(OracleProjection { point: q, distance: best, max_cosine, feasible_samples: used, evals: m.evals })
}
