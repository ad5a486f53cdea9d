//! Convex bodies and hit-and-run sampling of their uniform distribution.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::isoperim::EmpiricalDist;
use crate::par;
use crate::poly::MultiPoly;
use crate::samples::{unit_direction, SampleBlock};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BodyError {
    #[error("dimension mismatch: body has {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("body has empty interior: {0}")]
    EmptyInterior(String),
    #[error("body is unbounded along some direction")]
    Unbounded,
    #[error("point is not inside the body")]
    NotInterior,
    #[error("invalid chain configuration: {0}")]
    InvalidConfig(String),
}

/// The four supported body descriptions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    Ball { center: Vec<f64>, radius: f64 },
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Simplex { vertices: Vec<Vec<f64>> },
    /// `{x : a_i · x ≤ b_i}`
    Polytope { a: Vec<Vec<f64>>, b: Vec<f64> },
}

/// A validated convex body with a known interior point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Shape", into = "Shape")]
pub struct ConvexBody {
    shape: Shape,
    dim: usize,
    // halfspace form for simplices and polytopes
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    interior: Vec<f64>,
}

impl TryFrom<Shape> for ConvexBody {
    type Error = BodyError;
    fn try_from(s: Shape) -> Result<Self, BodyError> {
        Self::new(s)
    }
}

impl From<ConvexBody> for Shape {
    fn from(b: ConvexBody) -> Self {
        b.shape
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

impl ConvexBody {
    pub fn new(shape: Shape) -> Result<Self, BodyError> {
        let empty = |why: &str| Err(BodyError::EmptyInterior(why.to_string()));
        let (dim, rows, rhs, interior) = match &shape {
            Shape::Ball { center, radius } => {
                if center.is_empty() || !(*radius > 0.0) || !radius.is_finite() {
                    return empty("ball needs a positive radius");
                }
                (center.len(), Vec::new(), Vec::new(), center.clone())
            }
            Shape::Box { lo, hi } => {
                if lo.is_empty() || lo.len() != hi.len() {
                    return Err(BodyError::DimensionMismatch { expected: lo.len(), got: hi.len() });
                }
                if lo.iter().zip(hi).any(|(a, b)| !(a < b) || !a.is_finite() || !b.is_finite()) {
                    return empty("box needs lo < hi in every coordinate");
                }
                let mid = lo.iter().zip(hi).map(|(a, b)| 0.5 * (a + b)).collect();
                (lo.len(), Vec::new(), Vec::new(), mid)
            }
            Shape::Simplex { vertices } => {
                let n = vertices.len().saturating_sub(1);
                if n == 0 || vertices.iter().any(|v| v.len() != n) {
                    return empty("simplex needs n + 1 vertices in dimension n");
                }
                let (rows, rhs) = simplex_halfspaces(vertices).ok_or(BodyError::EmptyInterior(
                    "simplex vertices are affinely dependent".into(),
                ))?;
                let centroid = (0..n)
                    .map(|j| vertices.iter().map(|v| v[j]).sum::<f64>() / (n + 1) as f64)
                    .collect();
                (n, rows, rhs, centroid)
            }
            Shape::Polytope { a, b } => {
                let n = a.first().map_or(0, Vec::len);
                if n == 0 || a.len() != b.len() || a.iter().any(|r| r.len() != n) {
                    return empty("polytope rows must share one dimension");
                }
                if a.iter().any(|r| norm(r) == 0.0) {
                    return empty("polytope has a zero constraint row");
                }
                let x = strictly_feasible(a, b).ok_or(BodyError::EmptyInterior(
                    "no strictly feasible point found".into(),
                ))?;
                (n, a.clone(), b.clone(), x)
            }
        };
        let body = Self { shape, dim, rows, rhs, interior };
        for i in 0..dim {
            let mut e = vec![0.0; dim];
            e[i] = 1.0;
            body.chord(&body.interior, &e)?;
        }
        Ok(body)
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self, BodyError> {
        Self::new(Shape::Ball { center, radius })
    }

    pub fn unit_ball(dim: usize) -> Result<Self, BodyError> {
        Self::ball(vec![0.0; dim], 1.0)
    }

    pub fn cube(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self, BodyError> {
        Self::new(Shape::Box { lo, hi })
    }

    pub fn simplex(vertices: Vec<Vec<f64>>) -> Result<Self, BodyError> {
        Self::new(Shape::Simplex { vertices })
    }

    pub fn polytope(a: Vec<Vec<f64>>, b: Vec<f64>) -> Result<Self, BodyError> {
        Self::new(Shape::Polytope { a, b })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn interior_point(&self) -> &[f64] {
        &self.interior
    }

    fn check_dim(&self, got: usize) -> Result<(), BodyError> {
        if got != self.dim {
            return Err(BodyError::DimensionMismatch { expected: self.dim, got });
        }
        Ok(())
    }

    pub fn contains(&self, x: &[f64]) -> Result<bool, BodyError> {
        self.check_dim(x.len())?;
        Ok(match &self.shape {
            Shape::Ball { center, radius } => {
                x.iter().zip(center).map(|(a, c)| (a - c) * (a - c)).sum::<f64>() <= radius * radius
            }
            Shape::Box { lo, hi } => x.iter().zip(lo.iter().zip(hi)).all(|(v, (l, h))| l <= v && v <= h),
            _ => self.rows.iter().zip(&self.rhs).all(|(a, b)| dot(a, x) <= *b),
        })
    }

    /// Largest `[t_lo, t_hi]` with `x + t·u` in the body, for unit `u`.
    ///
    /// Points within rounding distance of the boundary are accepted, so a
    /// chain that lands on the boundary can keep moving.
    pub fn chord(&self, x: &[f64], u: &[f64]) -> Result<(f64, f64), BodyError> {
        self.check_dim(x.len())?;
        self.check_dim(u.len())?;
        let scale = norm(x).max(1.0);
        let slack_tol = 1e-9 * scale;
        match &self.shape {
            Shape::Ball { center, radius } => {
                let w: Vec<f64> = x.iter().zip(center).map(|(a, c)| a - c).collect();
                let p = dot(u, &w);
                let q = dot(&w, &w) - radius * radius;
                if q > slack_tol * radius {
                    return Err(BodyError::NotInterior);
                }
                let disc = (p * p - q).max(0.0).sqrt();
                // the root that avoids cancellation, then Vieta for the other
                let (t_lo, t_hi) = if p > 0.0 {
                    let t_lo = -p - disc;
                    (t_lo, if t_lo != 0.0 { q / t_lo } else { 0.0 })
                } else {
                    let t_hi = -p + disc;
                    (if t_hi != 0.0 { q / t_hi } else { 0.0 }, t_hi)
                };
                Ok((t_lo.min(0.0), t_hi.max(0.0)))
            }
            Shape::Box { lo, hi } => {
                let mut t_lo = f64::NEG_INFINITY;
                let mut t_hi = f64::INFINITY;
                for i in 0..self.dim {
                    if x[i] < lo[i] - slack_tol || x[i] > hi[i] + slack_tol {
                        return Err(BodyError::NotInterior);
                    }
                    if u[i] != 0.0 {
                        let a = (lo[i] - x[i]) / u[i];
                        let b = (hi[i] - x[i]) / u[i];
                        t_lo = t_lo.max(a.min(b).min(0.0));
                        t_hi = t_hi.min(a.max(b).max(0.0));
                    }
                }
                Ok((t_lo, t_hi))
            }
            _ => {
                let mut t_lo = f64::NEG_INFINITY;
                let mut t_hi = f64::INFINITY;
                for (a, b) in self.rows.iter().zip(&self.rhs) {
                    let slack = b - dot(a, x);
                    if slack < -slack_tol * norm(a) {
                        return Err(BodyError::NotInterior);
                    }
                    let slack = slack.max(0.0);
                    let rate = dot(a, u);
                    if rate > 0.0 {
                        t_hi = t_hi.min(slack / rate);
                    } else if rate < 0.0 {
                        t_lo = t_lo.max(slack / rate);
                    }
                }
                if !t_lo.is_finite() || !t_hi.is_finite() {
                    return Err(BodyError::Unbounded);
                }
                Ok((t_lo, t_hi))
            }
        }
    }
}

// barycentric form: x = v0 + M λ, λ ≥ 0, Σλ ≤ 1
fn simplex_halfspaces(vertices: &[Vec<f64>]) -> Option<(Vec<Vec<f64>>, Vec<f64>)> {
    let n = vertices.len() - 1;
    let v0 = DVector::from_column_slice(&vertices[0]);
    let m = DMatrix::from_fn(n, n, |i, j| vertices[j + 1][i] - vertices[0][i]);
    let scale = m.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let det = m.determinant();
    if !(det.abs() > 1e-12 * scale.powi(n as i32)) {
        return None;
    }
    let inv = m.try_inverse()?;
    let mut rows = Vec::with_capacity(n + 1);
    let mut rhs = Vec::with_capacity(n + 1);
    let shift = &inv * &v0;
    for i in 0..n {
        // −(M⁻¹x)_i ≤ −(M⁻¹v0)_i
        rows.push(inv.row(i).iter().map(|x| -x).collect());
        rhs.push(-shift[i]);
    }
    let sum: Vec<f64> = (0..n).map(|j| inv.column(j).sum()).collect();
    rhs.push(1.0 + shift.sum());
    rows.push(sum);
    Some((rows, rhs))
}

/// Point with `a_i · x < b_i` for all rows, by relaxation (Agmon–Motzkin)
/// on shrunk systems `a_i · x ≤ b_i − δ|a_i|` with decreasing `δ`.
fn strictly_feasible(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = a[0].len();
    let norms: Vec<f64> = a.iter().map(|r| norm(r)).collect();
    let scale = b.iter().zip(&norms).map(|(bi, ni)| (bi / ni).abs()).fold(1.0, f64::max);
    let mut delta = scale;
    for _ in 0..60 {
        let mut x = vec![0.0; n];
        for _ in 0..20_000 * a.len() {
            // most violated shrunk constraint
            let worst = (0..a.len())
                .map(|i| (i, (dot(&a[i], &x) - b[i]) / norms[i] + delta))
                .max_by(|p, q| p.1.total_cmp(&q.1))
                .unwrap();
            if worst.1 <= 0.0 {
                break;
            }
            // project onto a_i · x ≤ b_i − 2δ|a_i| to land strictly inside
            let (i, viol) = worst;
            let step = (viol + delta) / norms[i];
            for (xj, aj) in x.iter_mut().zip(&a[i]) {
                *xj -= step * aj;
            }
        }
        if a.iter().zip(b).all(|(r, bi)| dot(r, &x) < *bi) {
            return Some(x);
        }
        delta *= 0.5;
    }
    None
}

/// Markov chain settings for [`hit_and_run`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainConfig {
    pub burn_in: usize,
    pub thinning: usize,
    pub seed: u64,
    /// Starting point; the body's stored interior point when absent.
    #[serde(default)]
    pub start: Option<Vec<f64>>,
    /// Independent chains, keyed by `(seed, chain index)`.
    pub chains: usize,
}

impl ChainConfig {
    pub const DEFAULT_CHAINS: usize = 8;

    /// `burn_in = 100·n²`, `thinning = n`.
    pub fn for_dim(dim: usize, seed: u64) -> Self {
        Self {
            burn_in: 100 * dim * dim,
            thinning: dim.max(1),
            seed,
            start: None,
            chains: Self::DEFAULT_CHAINS,
        }
    }

    fn validate(&self) -> Result<(), BodyError> {
        if self.thinning == 0 {
            return Err(BodyError::InvalidConfig("thinning must be at least 1".into()));
        }
        if self.chains == 0 {
            return Err(BodyError::InvalidConfig("at least one chain is required".into()));
        }
        Ok(())
    }
}

/// `n` points from hit-and-run chains targeting the uniform distribution on
/// `body`. Chain `c` contributes a contiguous run of rows, in chain order.
pub fn hit_and_run(body: &ConvexBody, n: usize, cfg: &ChainConfig) -> Result<SampleBlock, BodyError> {
    cfg.validate()?;
    let start = cfg.start.clone().unwrap_or_else(|| body.interior.clone());
    if !body.contains(&start)? {
        return Err(BodyError::NotInterior);
    }
    let dim = body.dim;
    let chains = cfg.chains.min(n.max(1));
    let per = n / chains;
    let extra = n % chains;
    let parts: Vec<Result<Vec<f64>, BodyError>> = par::map_indices(chains, |c| {
        let rows = per + usize::from(c < extra);
        let mut rng = par::rng_for(cfg.seed, c as u64);
        let mut x = start.clone();
        let mut out = Vec::with_capacity(rows * dim);
        for _ in 0..cfg.burn_in {
            step(body, &mut x, &mut rng)?;
        }
        for _ in 0..rows {
            for _ in 0..cfg.thinning {
                step(body, &mut x, &mut rng)?;
            }
            out.extend_from_slice(&x);
        }
        Ok(out)
    });
    let mut data = Vec::with_capacity(n * dim);
    for p in parts {
        data.extend(p?);
    }
    Ok(SampleBlock::new(dim, data))
}

fn step<R: Rng>(body: &ConvexBody, x: &mut [f64], rng: &mut R) -> Result<(), BodyError> {
    let u = unit_direction(rng, x.len());
    let (t_lo, t_hi) = body.chord(x, &u)?;
    let t = t_lo + (t_hi - t_lo) * rng.random::<f64>();
    for (xi, ui) in x.iter_mut().zip(&u) {
        *xi += t * ui;
    }
    Ok(())
}

/// Sorted values of `f` over the rows of `block`.
pub fn pushforward_samples(f: &MultiPoly, block: &SampleBlock) -> Result<EmpiricalDist, BodyError> {
    if f.dim() != block.dim {
        return Err(BodyError::DimensionMismatch { expected: f.dim(), got: block.dim });
    }
    Ok(EmpiricalDist::new(block.rows().map(|x| f.eval(x)).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples::batch_means_stderr;

    fn square() -> ConvexBody {
        ConvexBody::cube(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap()
    }

    #[test]
    fn membership() {
        assert!(ConvexBody::unit_ball(3).unwrap().contains(&[0.0; 3]).unwrap());
        assert!(!square().contains(&[2.0, 0.0]).unwrap());
        let slab = ConvexBody::polytope(vec![vec![1.0], vec![-1.0]], vec![1.0, 0.0]).unwrap();
        assert!(slab.contains(&[0.5]).unwrap());
        assert!(square().contains(&[0.5]).is_err());
    }

    #[test]
    fn invalid_bodies() {
        assert!(ConvexBody::ball(vec![0.0], 0.0).is_err());
        assert!(ConvexBody::cube(vec![0.0, 1.0], vec![1.0, 1.0]).is_err());
        assert!(ConvexBody::simplex(vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]]).is_err());
        // x ≤ 0 and −x ≤ −1 is empty
        assert!(ConvexBody::polytope(vec![vec![1.0], vec![-1.0]], vec![0.0, -1.0]).is_err());
        // a half-plane is unbounded
        assert!(matches!(ConvexBody::polytope(vec![vec![1.0, 0.0]], vec![1.0]), Err(BodyError::Unbounded)));
    }

    #[test]
    fn chords() {
        let ball = ConvexBody::unit_ball(2).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let (a, b) = ball.chord(&[0.0, 0.0], &[s, s]).unwrap();
        assert!((a + 1.0).abs() < 1e-15 && (b - 1.0).abs() < 1e-15);
        assert_eq!(square().chord(&[0.5, 0.5], &[1.0, 0.0]).unwrap(), (-0.5, 0.5));
        assert!(ball.chord(&[2.0, 0.0], &[1.0, 0.0]).is_err());
    }

    #[test]
    fn simplex_membership_matches_barycentric() {
        let tri = ConvexBody::simplex(vec![vec![0.0, 0.0], vec![2.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!(tri.contains(&[0.5, 0.25]).unwrap());
        assert!(tri.contains(&[2.0, 0.0]).unwrap());
        assert!(!tri.contains(&[1.5, 0.5]).unwrap());
        assert!(!tri.contains(&[-0.01, 0.5]).unwrap());
        let (a, b) = tri.chord(&[0.5, 0.25], &[1.0, 0.0]).unwrap();
        assert!((a + 0.5).abs() < 1e-14 && (b - 1.0).abs() < 1e-14);
    }

    #[test]
    fn polytope_interior_point_is_strict() {
        // triangle x ≥ 1, y ≥ 1, x + y ≤ 2.1
        let p = ConvexBody::polytope(
            vec![vec![-1.0, 0.0], vec![0.0, -1.0], vec![1.0, 1.0]],
            vec![-1.0, -1.0, 2.1],
        )
        .unwrap();
        let x = p.interior_point();
        assert!(x[0] > 1.0 && x[1] > 1.0 && x[0] + x[1] < 2.1);
    }

    #[test]
    fn square_marginals_are_uniform() {
        let cfg = ChainConfig { burn_in: 1000, thinning: 5, ..ChainConfig::for_dim(2, 3) };
        let big = ConvexBody::cube(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap();
        let s = hit_and_run(&big, 100_000, &cfg).unwrap();
        assert_eq!(s.len(), 100_000);
        for j in 0..2 {
            let xs: Vec<f64> = s.rows().map(|r| r[j]).collect();
            let mean = xs.iter().sum::<f64>() / xs.len() as f64;
            assert!(mean.abs() < 4.0 * batch_means_stderr(&xs, 50), "{mean}");
        }
        assert!(s.rows().all(|r| big.contains(r).unwrap()));
    }

    #[test]
    fn chain_determinism() {
        let cfg = ChainConfig::for_dim(2, 11);
        let a = hit_and_run(&square(), 1000, &cfg).unwrap();
        let b = hit_and_run(&square(), 1000, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn pushforward_of_constant_and_shift() {
        let s = hit_and_run(&square(), 500, &ChainConfig::for_dim(2, 0)).unwrap();
        let three = MultiPoly::parse("3", Some(2)).unwrap();
        assert!(pushforward_samples(&three, &s).unwrap().values().iter().all(|&v| v == 3.0));
        let f = MultiPoly::parse("x1*x2 - x2^2", Some(2)).unwrap();
        let g = MultiPoly::parse("x1*x2 - x2^2 + 0.5", Some(2)).unwrap();
        let (pf, pg) = (pushforward_samples(&f, &s).unwrap(), pushforward_samples(&g, &s).unwrap());
        for (a, b) in pf.values().iter().zip(pg.values()) {
            assert!((b - a - 0.5).abs() <= 4.0 * f64::EPSILON * (1.0 + a.abs()));
        }
    }

    #[test]
    fn serde_round_trip() {
        let b = ConvexBody::simplex(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let js = serde_json::to_string(&b).unwrap();
        assert!(js.contains("\"kind\":\"simplex\""));
        let back: ConvexBody = serde_json::from_str(&js).unwrap();
        assert_eq!(back, b);
    }
}
