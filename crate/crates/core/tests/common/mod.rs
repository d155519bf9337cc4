#![allow(dead_code)]

use altproj::consensus::AgentDynamics;
use altproj::geometry::{Ball, ConvexSet, Halfspace, PointTime, SecondOrderCone};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

pub type P = PointTime<f64>;

pub fn pt(x: f64, t: f64) -> P {
    PointTime::scalar(x, t)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn unit(theta: f64) -> P {
    pt(theta.cos(), theta.sin())
}

/// 2 to 4 halfspaces, discs and cones in the plane, all containing `c` with
/// some margin, plus a start point `p0` at distance 0.5 to 5 from `c`.
pub struct Instance {
    pub sets: Vec<ConvexSet<f64>>,
    pub interior: P,
    pub p0: P,
}

pub fn random_intersection(seed: u64) -> Instance {
    let mut r = rng(seed);
    let c = pt(r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0));
    let k = r.gen_range(2..=4);
    let mut sets = Vec::with_capacity(k);
    for _ in 0..k {
        let margin = r.gen_range(0.05..1.0);
        let set: ConvexSet<f64> = match r.gen_range(0..3) {
            0 => {
                let n = unit(r.gen_range(0.0..TAU));
                let b = n.dot(&c) + margin;
                Halfspace::new(n, b).unwrap().into()
            }
            1 => {
                let u = unit(r.gen_range(0.0..TAU));
                let rad: f64 = r.gen_range(0.0..1.5);
                Ball::new(&c + &u.scale(rad), rad + margin).unwrap().into()
            }
            _ => {
                let slope = r.gen_range(0.5..2.0);
                let dx: f64 = r.gen_range(-1.0..1.0);
                let apex = pt(c.x[0] + dx, c.t - (slope * dx.abs() + margin));
                SecondOrderCone::new(apex, slope).unwrap().into()
            }
        };
        sets.push(set);
    }
    let p0 = &c + &unit(r.gen_range(0.0..TAU)).scale(r.gen_range(0.5..5.0));
    Instance { sets, interior: c, p0 }
}

/// `n` cones over `dim`-dimensional space with apex heights in [0, 2].
pub fn random_cones(r: &mut ChaCha8Rng, n: usize, dim: usize) -> Vec<SecondOrderCone<f64>> {
    (0..n)
        .map(|_| {
            let x: Vec<f64> = (0..dim).map(|_| r.gen_range(-10.0..10.0)).collect();
            let apex = PointTime::new(x, r.gen_range(0.0..2.0)).unwrap();
            SecondOrderCone::new(apex, r.gen_range(0.3..3.0)).unwrap()
        })
        .collect()
}

/// The cone as a function: `slope * ||x - apex.x|| + apex.t`.
pub fn cone_value(c: &SecondOrderCone<f64>, x: &[f64]) -> f64 {
    let d = x.iter().zip(&c.apex.x).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    c.slope * d + c.apex.t
}

pub fn max_value(cones: &[SecondOrderCone<f64>], x: &[f64]) -> f64 {
    cones.iter().map(|c| cone_value(c, x)).fold(f64::NEG_INFINITY, f64::max)
}

pub fn at_rest(xs: &[f64], u: f64) -> Vec<AgentDynamics<f64>> {
    xs.iter().map(|&x| AgentDynamics::second_order(x, 0.0, u).unwrap()).collect()
}

pub const EXP1: [f64; 4] = [-3.542884, 3.001152, 6.924106, -18.0296];
pub const EXP2: [(f64, f64); 4] =
    [(-3.542884, 5.140490), (3.001152, 3.794066), (6.924106, -3.281824), (-18.0296, 1.9023)];

/// Rejection-samples `count` points of `member` from the box `[lo, hi]^2`.
pub fn sample_feasible(
    r: &mut ChaCha8Rng,
    member: impl Fn(&P) -> bool,
    lo: (f64, f64),
    hi: (f64, f64),
    count: usize,
) -> Vec<P> {
    let mut out = Vec::with_capacity(count);
    let mut tries = 0;
    while out.len() < count && tries < 1_000_000 {
        tries += 1;
        let z = pt(r.gen_range(lo.0..hi.0), r.gen_range(lo.1..hi.1));
        if member(&z) {
            out.push(z);
        }
    }
    out
}

/// Position and velocity after running piecewise-constant inputs
/// `(duration, u)` from `(x, v)`, one exact kinematic update per piece.
pub fn integrate(mut x: f64, mut v: f64, pieces: &[(f64, f64)]) -> (f64, f64) {
    for &(h, u) in pieces {
        x += v * h + 0.5 * u * h * h;
        v += u * h;
    }
    (x, v)
}
