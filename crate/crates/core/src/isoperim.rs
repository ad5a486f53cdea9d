//! Isoperimetry of one-dimensional pushforward measures: CDF grids, the
//! ν-perimeter, three-set checks, Cheeger profiles and the Poincaré gap.

use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::body::{hit_and_run, BodyError, ChainConfig, ConvexBody};
use crate::checkers::{poly_stats, CheckError};
use crate::poly::{preimage, real_roots, Interval, IntervalUnion, MultiPoly, PolyError, UniPoly, ROOT_TOL};
use crate::quad::finite_range;
use crate::report::{IneqReport, IneqTag};
use crate::weights::{Weight, WeightError};

/// Points with `min(F, 1 − F)` below this are left out of Cheeger scans.
pub const CHEEGER_MIN_MASS: f64 = 1e-8;
/// Smallest grid accepted by the Cheeger and Poincaré routines.
pub const MIN_GRID_CELLS: usize = 100;
/// Coarse grid size per axis for the two-interval Cheeger scan.
pub const TWO_INTERVAL_POINTS: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IsoError {
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Body(#[from] BodyError),
    #[error(transparent)]
    Check(#[from] CheckError),
    #[error("distribution is a single atom")]
    Degenerate,
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("set does not meet the grid span")]
    OutsideSpan,
    #[error("grid cell {0} carries no mass")]
    ZeroMassCell(usize),
    #[error("invalid sets: {0}")]
    InvalidSets(String),
}

/// Sorted sample values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalDist {
    values: Vec<f64>,
}

impl EmpiricalDist {
    /// Sorts `values` (stable, so ties keep their input order).
    pub fn new(mut values: Vec<f64>) -> Self {
        values.sort_by(f64::total_cmp);
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Fraction of samples `≤ y`.
    pub fn cdf(&self, y: f64) -> f64 {
        self.values.partition_point(|&v| v <= y) as f64 / self.values.len() as f64
    }

    /// `⌈N^{1/3}⌉` quantile bins.
    pub fn default_bins(&self) -> usize {
        (self.values.len() as f64).cbrt().ceil() as usize
    }
}

/// A CDF sampled on a strictly increasing grid, linear in between.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridDist {
    grid: Vec<f64>,
    cdf: Vec<f64>,
}

impl GridDist {
    pub fn new(grid: Vec<f64>, cdf: Vec<f64>) -> Result<Self, IsoError> {
        let bad = |why: &str| Err(IsoError::InvalidGrid(why.to_string()));
        if grid.len() < 2 || grid.len() != cdf.len() {
            return bad("need at least two points and one CDF value per point");
        }
        if grid.iter().any(|y| !y.is_finite()) || grid.windows(2).any(|w| !(w[0] < w[1])) {
            return bad("grid must be finite and strictly increasing");
        }
        if cdf[0] != 0.0 || *cdf.last().unwrap() != 1.0 {
            return bad("CDF must run from 0 to 1");
        }
        if cdf.windows(2).any(|w| !(w[0] <= w[1])) {
            return bad("CDF must be nondecreasing");
        }
        Ok(Self { grid, cdf })
    }

    /// `cdf` sampled at `m + 1` equally spaced points of `[lo, hi]`; the end
    /// values are pinned to 0 and 1 and rounding dips are removed.
    pub fn from_cdf<F: Fn(f64) -> f64>(lo: f64, hi: f64, m: usize, cdf: F) -> Result<Self, IsoError> {
        if m < 2 {
            return Err(IsoError::InvalidArgument(format!("need M ≥ 2, got {m}")));
        }
        if !(lo < hi) {
            return Err(IsoError::Degenerate);
        }
        let grid = equispaced(lo, hi, m);
        let vals = grid.iter().map(|&y| cdf(y)).collect();
        Self::pinned(grid, vals)
    }

    fn pinned(grid: Vec<f64>, mut vals: Vec<f64>) -> Result<Self, IsoError> {
        let m = vals.len() - 1;
        vals[0] = 0.0;
        vals[m] = 1.0;
        for i in 1..m {
            vals[i] = vals[i].clamp(vals[i - 1], 1.0);
        }
        Self::new(grid, vals)
    }

    /// Empirical CDF at `m + 1` quantile-spaced sample points.
    pub fn from_empirical(dist: &EmpiricalDist, m: usize) -> Result<Self, IsoError> {
        if m < 2 {
            return Err(IsoError::InvalidArgument(format!("need M ≥ 2, got {m}")));
        }
        let v = dist.values();
        if v.is_empty() || v[0] == v[v.len() - 1] {
            return Err(IsoError::Degenerate);
        }
        let n = v.len();
        let mut grid: Vec<f64> = (0..=m)
            .map(|i| v[((i as f64 * (n - 1) as f64 / m as f64).round() as usize).min(n - 1)])
            .collect();
        grid.dedup();
        let last = grid.len() - 1;
        let cdf = grid
            .iter()
            .enumerate()
            .map(|(i, &y)| if i == 0 { 0.0 } else if i == last { 1.0 } else { dist.cdf(y) })
            .collect();
        Self::new(grid, cdf)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn cdf_values(&self) -> &[f64] {
        &self.cdf
    }

    pub fn cells(&self) -> usize {
        self.grid.len() - 1
    }

    pub fn lo(&self) -> f64 {
        self.grid[0]
    }

    pub fn hi(&self) -> f64 {
        self.grid[self.cells()]
    }

    pub fn mean_spacing(&self) -> f64 {
        (self.hi() - self.lo()) / self.cells() as f64
    }

    pub fn cdf(&self, y: f64) -> f64 {
        if y <= self.lo() {
            return 0.0;
        }
        if y >= self.hi() {
            return 1.0;
        }
        let i = self.grid.partition_point(|&g| g <= y) - 1;
        let t = (y - self.grid[i]) / (self.grid[i + 1] - self.grid[i]);
        self.cdf[i] + t * (self.cdf[i + 1] - self.cdf[i])
    }

    /// `ν(A)`; endpoint closure is immaterial for a continuous CDF.
    pub fn measure(&self, set: &IntervalUnion) -> f64 {
        set.intervals().iter().map(|iv| self.cdf(iv.hi) - self.cdf(iv.lo)).sum()
    }

    /// Mean and mean absolute deviation of the piecewise-uniform density.
    pub fn mean_and_alpha(&self) -> (f64, f64) {
        let cells = self.cells();
        let mean: f64 = (0..cells)
            .map(|i| (self.cdf[i + 1] - self.cdf[i]) * 0.5 * (self.grid[i] + self.grid[i + 1]))
            .sum();
        let alpha = (0..cells)
            .map(|i| {
                let (a, b) = (self.grid[i], self.grid[i + 1]);
                let p = self.cdf[i + 1] - self.cdf[i];
                if mean <= a || mean >= b {
                    p * (0.5 * (a + b) - mean).abs()
                } else {
                    p / (b - a) * 0.5 * ((mean - a).powi(2) + (b - mean).powi(2))
                }
            })
            .sum();
        (mean, alpha)
    }

    // one-sided slopes at node i over 2 and 4 cells, Richardson-combined
    fn one_sided_density(&self, i: usize, right: bool) -> Option<f64> {
        let m = self.cells();
        let j = |k: usize| if right { i.checked_add(k).filter(|&x| x <= m) } else { i.checked_sub(k) };
        let (j2, j4) = (j(2)?, j(4)?);
        let slope = |jj: usize| (self.cdf[jj] - self.cdf[i]) / (self.grid[jj] - self.grid[i]);
        let (h2, h4) = ((self.grid[j2] - self.grid[i]).abs(), (self.grid[j4] - self.grid[i]).abs());
        let (d2, d4) = (slope(j2), slope(j4));
        Some(((h4 * d2 - h2 * d4) / (h4 - h2)).max(0.0))
    }
}

/// Exact pushforward CDF `w({f ≤ y}) / w(domain)`.
pub fn exact_pushforward_cdf(f: &UniPoly, w: &Weight, y: f64) -> Result<f64, IsoError> {
    let below = IntervalUnion::single(Interval {
        lo: f64::NEG_INFINITY,
        hi: y,
        lo_closed: false,
        hi_closed: true,
    });
    let set = preimage(f, w.lo(), w.hi(), &below)?;
    Ok((w.integrate_indicator(&set)? / w.mass()).clamp(0.0, 1.0))
}

/// Range of `f` over the finite integration range of `w`.
pub fn pushforward_support(f: &UniPoly, w: &Weight) -> Result<(f64, f64), IsoError> {
    let (lo, hi) = finite_range(w, f.degree());
    let mut pts = vec![lo, hi];
    if f.degree() > 1 {
        pts.extend(real_roots(&f.derivative(), lo, hi, ROOT_TOL)?.iter().map(|p| p.0));
    }
    let vals = pts.iter().map(|&t| f.eval(t));
    let (a, b) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    Ok((a, b))
}

/// Exact pushforward of `w` under `f` on `m + 1` equally spaced points.
pub fn pushforward_grid(f: &UniPoly, w: &Weight, m: usize) -> Result<GridDist, IsoError> {
    let (lo, hi) = pushforward_support(f, w)?;
    if !(lo < hi) {
        return Err(IsoError::Degenerate);
    }
    if m < 2 {
        return Err(IsoError::InvalidArgument(format!("need M ≥ 2, got {m}")));
    }
    let grid = equispaced(lo, hi, m);
    let vals = grid.iter().map(|&y| exact_pushforward_cdf(f, w, y)).collect::<Result<Vec<_>, _>>()?;
    GridDist::pinned(grid, vals)
}

fn equispaced(lo: f64, hi: f64, m: usize) -> Vec<f64> {
    (0..=m).map(|i| lo + (hi - lo) * i as f64 / m as f64).collect()
}

/// `(ν(A + (−h, h)) − ν(A)) / h` on the grid CDF.
pub fn nu_perimeter(g: &GridDist, set: &IntervalUnion, h: f64) -> Result<f64, IsoError> {
    if !(h >= 2.0 * g.mean_spacing() * (1.0 - 1e-12)) {
        return Err(IsoError::InvalidArgument(format!(
            "h = {h} is below two grid spacings ({})",
            2.0 * g.mean_spacing()
        )));
    }
    if set.clip(g.lo(), g.hi()).is_empty() {
        return Err(IsoError::OutsideSpan);
    }
    Ok((g.measure(&set.enlarge(h)) - g.measure(set)) / h)
}

/// Difference quotients at `h ∈ {16, 8, 4, 2}` grid spacings and one
/// Richardson step on the two finest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerimeterEstimate {
    pub steps: Vec<(f64, f64)>,
    pub extrapolated: f64,
}

pub fn nu_perimeter_richardson(g: &GridDist, set: &IntervalUnion) -> Result<PerimeterEstimate, IsoError> {
    let base = 2.0 * g.mean_spacing();
    let steps = [8.0, 4.0, 2.0, 1.0]
        .iter()
        .map(|k| Ok((k * base, nu_perimeter(g, set, k * base)?)))
        .collect::<Result<Vec<_>, IsoError>>()?;
    let extrapolated = (2.0 * steps[3].1 - steps[2].1).max(0.0);
    Ok(PerimeterEstimate { steps, extrapolated })
}

/// Two closed sets at positive distance; the middle set is the rest of ℝ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ThreeSetsRepr")]
pub struct ThreeSets {
    pub j1: IntervalUnion,
    pub j3: IntervalUnion,
    pub eps: f64,
}

#[derive(Deserialize)]
struct ThreeSetsRepr {
    j1: IntervalUnion,
    j3: IntervalUnion,
    #[serde(default)]
    eps: Option<f64>,
}

impl TryFrom<ThreeSetsRepr> for ThreeSets {
    type Error = IsoError;
    fn try_from(r: ThreeSetsRepr) -> Result<Self, IsoError> {
        let s = Self::new(r.j1, r.j3)?;
        if let Some(e) = r.eps {
            if (e - s.eps).abs() > 1e-12 * s.eps.max(1.0) {
                return Err(IsoError::InvalidSets(format!("eps {e} differs from the set distance {}", s.eps)));
            }
        }
        Ok(s)
    }
}

impl ThreeSets {
    pub fn new(j1: IntervalUnion, j3: IntervalUnion) -> Result<Self, IsoError> {
        if j1.is_empty() || j3.is_empty() {
            return Err(IsoError::InvalidSets("J1 and J3 must be nonempty".into()));
        }
        let eps = j1.distance(&j3);
        if !(eps > 0.0) {
            return Err(IsoError::InvalidSets("J1 and J3 must be at positive distance".into()));
        }
        Ok(Self { j1, j3, eps })
    }

    /// `J1 = (−∞, a]`, `J3 = [b, ∞)`.
    pub fn half_lines(a: f64, b: f64) -> Result<Self, IsoError> {
        let j1 = IntervalUnion::single(Interval { lo: f64::NEG_INFINITY, hi: a, lo_closed: false, hi_closed: true });
        let j3 = IntervalUnion::single(Interval { lo: b, hi: f64::INFINITY, lo_closed: true, hi_closed: false });
        Self::new(j1, j3)
    }

    pub fn swapped(&self) -> Self {
        Self { j1: self.j3.clone(), j3: self.j1.clone(), eps: self.eps }
    }

    /// `ℝ ∖ (J1 ∪ J3)`.
    pub fn j2(&self) -> IntervalUnion {
        let mut all: Vec<Interval> = self.j1.intervals().iter().chain(self.j3.intervals()).copied().collect();
        all.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        IntervalUnion::new(all)
            .expect("J1 and J3 are disjoint")
            .complement_in(f64::NEG_INFINITY, f64::INFINITY)
    }
}

fn sets_json(sets: &ThreeSets) -> serde_json::Value {
    json!({ "j1": sets.j1, "j3": sets.j3, "eps": sets.eps })
}

/// Three-set inequality on the exact one-dimensional pushforward.
pub fn three_set_exact(f: &UniPoly, w: &Weight, sets: &ThreeSets) -> Result<IneqReport, IsoError> {
    let mass = w.mass();
    let prob = |s: &IntervalUnion| -> Result<f64, IsoError> { Ok(w.integrate_indicator(&preimage(f, w.lo(), w.hi(), s)?)? / mass) };
    let (p1, p3) = (prob(&sets.j1)?, prob(&sets.j3)?);
    let p2 = prob(&sets.j2())?;
    let stats = poly_stats(f, w)?;
    let lhs = sets.eps * p1 * p3;
    let rhs = p2 * stats.alpha;
    Ok(IneqReport::new(
        IneqTag::ThreeSet,
        lhs,
        rhs,
        json!({ "f": f, "weight": w, "sets": sets_json(sets), "path": "exact" }),
    )
    .with_extra("p1", p1)
    .with_extra("p2", p2)
    .with_extra("p3", p3)
    .with_extra("mean", stats.mean)
    .with_extra("alpha", stats.alpha))
}

/// Three-set inequality from one hit-and-run block; every probability and
/// the mean deviation come from the same samples, and the standard errors
/// use the delta method.
pub fn three_set_check(
    body: &ConvexBody,
    f: &MultiPoly,
    sets: &ThreeSets,
    n: usize,
    cfg: &ChainConfig,
) -> Result<IneqReport, IsoError> {
    if f.dim() != body.dim() {
        return Err(IsoError::Poly(PolyError::DimensionMismatch { expected: body.dim(), got: f.dim() }));
    }
    if n < 2 {
        return Err(IsoError::InvalidArgument("need at least two samples".into()));
    }
    let block = hit_and_run(body, n, cfg)?;
    let vals: Vec<f64> = block.rows().map(|x| f.eval(x)).collect();
    let nf = n as f64;
    let mean = vals.iter().sum::<f64>() / nf;
    let dev: Vec<f64> = vals.iter().map(|v| (v - mean).abs()).collect();
    let alpha = dev.iter().sum::<f64>() / nf;
    let in1: Vec<f64> = vals.iter().map(|&v| f64::from(u8::from(sets.j1.contains(v)))).collect();
    let in3: Vec<f64> = vals.iter().map(|&v| f64::from(u8::from(sets.j3.contains(v)))).collect();
    let p1 = in1.iter().sum::<f64>() / nf;
    let p3 = in3.iter().sum::<f64>() / nf;
    let p2 = 1.0 - p1 - p3;
    let tilt = vals.iter().map(|&v| (v < mean) as i32 - (v > mean) as i32).sum::<i32>() as f64 / nf;

    let lhs = sets.eps * p1 * p3;
    let rhs = p2 * alpha;
    let rep = IneqReport::new(
        IneqTag::ThreeSet,
        lhs,
        rhs,
        json!({ "body": body, "f": f, "sets": sets_json(sets), "n": n, "chain": cfg, "path": "monte-carlo" }),
    );
    let ratio = rep.witness_ratio();
    let mut lhs_if = Vec::with_capacity(n);
    let mut rhs_if = Vec::with_capacity(n);
    let mut ratio_if = Vec::with_capacity(n);
    for i in 0..n {
        let (d1, d3) = (in1[i] - p1, in3[i] - p3);
        let d2 = -d1 - d3;
        let da = dev[i] - alpha + tilt * (vals[i] - mean);
        lhs_if.push(sets.eps * (p3 * d1 + p1 * d3));
        rhs_if.push(alpha * d2 + p2 * da);
        if rhs > 0.0 && ratio.is_finite() {
            let g = sets.eps / rhs;
            ratio_if.push(g * (p3 * d1 + p1 * d3) - ratio * (d2 / p2 + da / alpha));
        }
    }
    let se = |v: &[f64]| if v.is_empty() { f64::NAN } else { crate::samples::influence_stderr(v) };
    Ok(rep
        .with_extra("p1", p1)
        .with_extra("p2", p2)
        .with_extra("p3", p3)
        .with_extra("mean", mean)
        .with_extra("alpha", alpha)
        .with_extra("lhs_stderr", se(&lhs_if))
        .with_extra("rhs_stderr", se(&rhs_if))
        .with_extra("ratio_stderr", se(&ratio_if)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheegerReport {
    pub label: String,
    pub alpha_f: f64,
    /// `inf ν⁺(A)·α_f / (ν(A)(1 − ν(A)))` over half-lines `A = (−∞, y]`.
    pub half_line_inf: f64,
    pub half_line_at: f64,
    pub half_line_cdf: f64,
    /// Same infimum over `A = (−∞, a] ∪ [b, ∞)` on a coarse grid.
    pub two_interval_inf: f64,
    pub two_interval_at: (f64, f64),
    /// `inf ν⁺(A) / min(ν(A), 1 − ν(A))` over half-lines.
    pub half_line_isoperimetric: f64,
    pub points: usize,
}

pub fn cheeger_profile(g: &GridDist, alpha_f: f64) -> Result<CheegerReport, IsoError> {
    if g.cells() < MIN_GRID_CELLS {
        return Err(IsoError::InvalidArgument(format!("need at least {MIN_GRID_CELLS} grid cells")));
    }
    if !(alpha_f > 0.0) {
        return Err(IsoError::InvalidArgument(format!("alpha_f must be positive, got {alpha_f}")));
    }
    let m = g.cells();
    let right: Vec<Option<f64>> = (0..=m).map(|i| g.one_sided_density(i, true)).collect();
    let left: Vec<Option<f64>> = (0..=m).map(|i| g.one_sided_density(i, false)).collect();
    let usable = |mass: f64| mass.min(1.0 - mass) >= CHEEGER_MIN_MASS;

    let mut best = (f64::INFINITY, f64::NAN, f64::NAN);
    let mut iso = f64::INFINITY;
    let mut points = 0;
    for i in 0..=m {
        let (Some(d), fy) = (right[i], g.cdf[i]) else { continue };
        if !usable(fy) {
            continue;
        }
        points += 1;
        let v = d * alpha_f / (fy * (1.0 - fy));
        if v < best.0 {
            best = (v, g.grid[i], fy);
        }
        iso = iso.min(d / fy.min(1.0 - fy));
    }

    let step = (m / TWO_INTERVAL_POINTS).max(4);
    let mut best2 = (f64::INFINITY, (f64::NAN, f64::NAN));
    for a in (0..=m).step_by(step) {
        let Some(da) = right[a] else { continue };
        for b in (a + 2 * step..=m).step_by(step) {
            let Some(db) = left[b] else { continue };
            let mass = g.cdf[a] + 1.0 - g.cdf[b];
            if !usable(mass) {
                continue;
            }
            let v = (da + db) * alpha_f / (mass * (1.0 - mass));
            if v < best2.0 {
                best2 = (v, (g.grid[a], g.grid[b]));
            }
        }
    }
    if points == 0 {
        return Err(IsoError::Degenerate);
    }
    Ok(CheegerReport {
        label: "half-line Cheeger witness".into(),
        alpha_f,
        half_line_inf: best.0,
        half_line_at: best.1,
        half_line_cdf: best.2,
        two_interval_inf: best2.0,
        two_interval_at: best2.1,
        half_line_isoperimetric: iso,
        points,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoincareReport {
    /// Smallest nonzero eigenvalue of the weighted Neumann operator.
    pub lambda1: f64,
    /// `1 / √λ₁`
    pub best_constant: f64,
    pub alpha_f: f64,
    /// `best_constant / α_f`
    pub ratio: f64,
    pub cells: usize,
}

// tail mass below which the grid CDF carries no information
const TAIL_ROUNDING: f64 = 64.0 * f64::EPSILON;

/// Spectral gap of `−(p u′)′ / p` with reflecting ends, `p` the cell density,
/// discretized by finite volumes on the grid cells that carry mass.
pub fn poincare_gap(g: &GridDist) -> Result<PoincareReport, IsoError> {
    let m = g.cells();
    if m < MIN_GRID_CELLS {
        return Err(IsoError::InvalidArgument(format!("need at least {MIN_GRID_CELLS} grid cells")));
    }
    let all: Vec<f64> = (0..m).map(|i| g.cdf[i + 1] - g.cdf[i]).collect();
    // tails lighter than the CDF's rounding level are cut off; a flat cell
    // inside is an error
    let cut = TAIL_ROUNDING * g.cdf[m];
    let first = (0..m).position(|i| g.cdf[i + 1] > cut).ok_or(IsoError::Degenerate)?;
    let last = (0..m).rposition(|i| g.cdf[i] < g.cdf[m] - cut).ok_or(IsoError::Degenerate)?;
    if last < first {
        return Err(IsoError::Degenerate);
    }
    if let Some(i) = all[first..=last].iter().position(|&p| !(p > 0.0)) {
        return Err(IsoError::ZeroMassCell(first + i));
    }
    let mass = all[first..=last].to_vec();
    let m = mass.len();
    if m < MIN_GRID_CELLS {
        return Err(IsoError::InvalidArgument(format!("fewer than {MIN_GRID_CELLS} grid cells carry mass")));
    }
    let width: Vec<f64> = (first..=last).map(|i| g.grid[i + 1] - g.grid[i]).collect();
    let dens: Vec<f64> = mass.iter().zip(&width).map(|(p, w)| p / w).collect();
    // face conductances between cells i and i + 1
    let cond: Vec<f64> = (0..m - 1)
        .map(|i| 0.5 * (dens[i] + dens[i + 1]) / (0.5 * (width[i] + width[i + 1])))
        .collect();
    let diag: Vec<f64> = (0..m)
        .map(|i| {
            let l = if i > 0 { cond[i - 1] } else { 0.0 };
            let r = if i + 1 < m { cond[i] } else { 0.0 };
            (l + r) / mass[i]
        })
        .collect();
    let off_sq: Vec<f64> = (0..m - 1).map(|i| cond[i] * cond[i] / (mass[i] * mass[i + 1])).collect();
    let lambda1 = kth_eigenvalue(&diag, &off_sq, 1);
    let (_, alpha_f) = g.mean_and_alpha();
    let best = 1.0 / lambda1.sqrt();
    Ok(PoincareReport { lambda1, best_constant: best, alpha_f, ratio: best / alpha_f, cells: m })
}

// eigenvalues below x of the symmetric tridiagonal matrix (diag, off²)
fn sturm_count(diag: &[f64], off_sq: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..diag.len() {
        let prev = if i == 0 { 0.0 } else { off_sq[i - 1] / q };
        q = diag[i] - x - prev;
        if q == 0.0 {
            q = -f64::EPSILON * (diag[i].abs() + x.abs()).max(f64::MIN_POSITIVE);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// `k`-th smallest eigenvalue (from 0) by bisection on the Sturm count.
fn kth_eigenvalue(diag: &[f64], off_sq: &[f64], k: usize) -> f64 {
    let n = diag.len();
    let off = |i: usize| off_sq.get(i).map_or(0.0, |v| v.sqrt());
    let bound = (0..n)
        .map(|i| diag[i].abs() + off(i) + if i > 0 { off(i - 1) } else { 0.0 })
        .fold(0.0, f64::max);
    let mut lo = -bound;
    let mut hi = bound;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if sturm_count(diag, off_sq, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}
