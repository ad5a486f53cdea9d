//! Worst-case witness ratios of the product small-ball inequality.
//!
//! Instances are monic polynomials given by their roots. Roots are offsets
//! from the left end of the weight domain, so one root box serves every
//! domain placement.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::checkers::{check_product_smallball, product_smallball_sides, CheckError};
use crate::nelder_mead::{minimize, NmOptions};
use crate::par::{map_indices, rng_for};
use crate::poly::UniPoly;
use crate::report::{IneqReport, Ratio};
use crate::weights::Weight;

/// Default half-width of the root box.
pub const ROOT_BOX: f64 = 10.0;
pub const EPS_RANGE: (f64, f64) = (1e-4, 1e2);
/// Domain lengths `[0, s]` searched for the exponential family.
pub const EXP_S_RANGE: (f64, f64) = (0.05, 30.0);
/// Left ends `s` of `[s, s+1]` searched for the power family.
pub const POWER_S_RANGE: (f64, f64) = (0.0, 20.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// `e^{−t}` on `[0, s]`.
    ExpCanonical,
    /// `t^n` on `[s, s+1]`.
    Power { n: u32 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSpace {
    pub degree: usize,
    pub root_box: f64,
    pub eps_range: (f64, f64),
    pub s_range: (f64, f64),
    pub family: Family,
    /// `None` fixes the shift `r` at 0.
    pub r_range: Option<(f64, f64)>,
}

impl SearchSpace {
    pub fn new(degree: usize, family: Family) -> Self {
        let s_range = match family {
            Family::ExpCanonical => EXP_S_RANGE,
            Family::Power { .. } => POWER_S_RANGE,
        };
        Self {
            degree,
            root_box: ROOT_BOX,
            eps_range: EPS_RANGE,
            s_range,
            family,
            r_range: None,
        }
    }

    pub fn validate(&self) -> Result<(), CheckError> {
        let bad = |m: &str| Err(CheckError::InvalidArgument(m.to_string()));
        if self.degree == 0 || self.degree > crate::poly::MAX_DEGREE {
            return bad("degree must be in 1..=12");
        }
        if !(self.root_box > 0.0 && self.root_box.is_finite()) {
            return bad("root box must be positive");
        }
        let (elo, ehi) = self.eps_range;
        if !(elo > 0.0 && elo <= ehi && ehi.is_finite()) {
            return bad("eps range must satisfy 0 < eps_lo ≤ eps_hi");
        }
        let (slo, shi) = self.s_range;
        let s_ok = match self.family {
            Family::ExpCanonical => slo > 0.0,
            Family::Power { .. } => slo >= 0.0,
        };
        if !(s_ok && slo <= shi && shi.is_finite()) {
            return bad("invalid s range");
        }
        if let Some((rlo, rhi)) = self.r_range {
            if !(rlo <= rhi && rlo.is_finite() && rhi.is_finite()) {
                return bad("invalid r range");
            }
        }
        if self.family == Family::ExpCanonical {
            let t = Weight::exponential().truncation_point(self.degree).unwrap_or(f64::INFINITY);
            if self.root_box >= t {
                return bad("root box must lie below the truncation point of the weight");
            }
        }
        Ok(())
    }

    fn dim(&self) -> usize {
        self.degree + 2 + usize::from(self.r_range.is_some())
    }

    fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
        let mut lo = vec![-self.root_box; self.degree];
        let mut hi = vec![self.root_box; self.degree];
        lo.push(self.eps_range.0.ln());
        hi.push(self.eps_range.1.ln());
        lo.push(self.s_range.0);
        hi.push(self.s_range.1);
        if let Some((a, b)) = self.r_range {
            lo.push(a);
            hi.push(b);
        }
        (lo, hi)
    }

    pub fn weight_for(&self, s: f64) -> Weight {
        match self.family {
            Family::ExpCanonical => Weight::exp_affine(0.0, -1.0, 0.0, s),
            Family::Power { n } => Weight::power(n, s, s + 1.0),
        }
        .expect("search weights are valid by construction")
    }

    fn decode(&self, x: &[f64]) -> Witness {
        let d = self.degree;
        let s = x[d + 1];
        let weight = self.weight_for(s);
        let mut roots: Vec<f64> = x[..d].iter().map(|o| weight.lo() + o).collect();
        roots.sort_by(f64::total_cmp);
        Witness {
            roots,
            eps: x[d].exp(),
            s,
            r: if self.r_range.is_some() { x[d + 2] } else { 0.0 },
            weight,
        }
    }
}

/// One fully specified instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    /// Absolute root positions of the monic polynomial.
    pub roots: Vec<f64>,
    pub eps: f64,
    pub s: f64,
    pub r: f64,
    pub weight: Weight,
}

impl Witness {
    pub fn poly(&self) -> UniPoly {
        UniPoly::from_roots(&self.roots)
    }

    pub fn ratio(&self) -> Result<Ratio, CheckError> {
        let (l, r) = product_smallball_sides(&self.poly(), &self.weight, self.eps, self.r)?;
        Ok(Ratio::of(l, r))
    }

    pub fn report(&self) -> Result<IneqReport, CheckError> {
        check_product_smallball(&self.poly(), &self.weight, self.eps, self.r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub start: usize,
    pub best_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub space: SearchSpace,
    pub best_ratio: f64,
    pub witness: Option<Witness>,
    pub trials: usize,
    pub seed: u64,
    pub evaluations: u64,
    /// Best-so-far value each time a start improves on all earlier starts.
    pub trajectory: Vec<TrajectoryPoint>,
    /// Instances whose right side vanished while the left side did not.
    pub infinite: Vec<Witness>,
}

struct StartOutcome {
    best: f64,
    witness: Option<Witness>,
    infinite: Vec<Witness>,
    evaluations: u64,
}

const MAX_INFINITE_PER_START: usize = 4;

fn run_start(space: &SearchSpace, seed: u64, index: usize, opts: &NmOptions) -> StartOutcome {
    let (lo, hi) = space.bounds();
    let mut rng = rng_for(seed, index as u64);
    let x0: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| if a < b { rng.random_range(*a..*b) } else { *a }).collect();
    let mut best = 0.0;
    let mut best_x: Option<Vec<f64>> = None;
    let mut infinite = Vec::new();
    let res = minimize(
        |x| {
            let wit = space.decode(x);
            match wit.ratio() {
                Ok(r) if r.infinite => {
                    if infinite.len() < MAX_INFINITE_PER_START {
                        infinite.push(wit);
                    }
                    0.0
                }
                Ok(r) => {
                    if r.witness_ratio > best || best_x.is_none() {
                        best = r.witness_ratio;
                        best_x = Some(x.to_vec());
                    }
                    -r.witness_ratio
                }
                Err(_) => 0.0,
            }
        },
        &x0,
        &lo,
        &hi,
        opts,
    );
    StartOutcome {
        best,
        witness: best_x.map(|x| space.decode(&x)),
        infinite,
        evaluations: res.evaluations as u64,
    }
}

/// Maximizes the product small-ball witness ratio over `space` from `budget`
/// random starts, each refined by Nelder–Mead.
pub fn worst_ratio_search(space: &SearchSpace, budget: usize, seed: u64) -> Result<SearchResult, CheckError> {
    space.validate()?;
    if budget == 0 {
        return Err(CheckError::InvalidArgument("budget must be at least 1".into()));
    }
    let opts = NmOptions::default();
    debug_assert_eq!(space.bounds().0.len(), space.dim());
    let outcomes = map_indices(budget, |i| run_start(space, seed, i, &opts));
    let mut best_ratio = 0.0;
    let mut witness = None;
    let mut trajectory = Vec::new();
    let mut infinite = Vec::new();
    let mut evaluations = 0;
    for (i, o) in outcomes.into_iter().enumerate() {
        evaluations += o.evaluations;
        infinite.extend(o.infinite);
        if o.witness.is_some() && (witness.is_none() || o.best > best_ratio) {
            best_ratio = o.best;
            witness = o.witness;
            trajectory.push(TrajectoryPoint { start: i, best_ratio });
        }
    }
    Ok(SearchResult {
        space: space.clone(),
        best_ratio,
        witness,
        trials: budget,
        seed,
        evaluations,
        trajectory,
        infinite,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DivergenceRow {
    pub a: f64,
    pub eps_star: f64,
    pub witness_ratio: f64,
}

/// Grid points per decade of `eps` in [`eps_sup`].
const EPS_GRID_PER_DECADE: usize = 12;

/// `sup_eps` of the witness ratio for `f` on `weight`, scanned on a log grid
/// over `[eps_lo, eps_hi]` and polished by golden-section search.
pub fn eps_sup(f: &UniPoly, weight: &Weight, eps_lo: f64, eps_hi: f64) -> Result<(f64, f64), CheckError> {
    let ratio = |le: f64| -> Result<f64, CheckError> {
        let (l, r) = product_smallball_sides(f, weight, le.exp(), 0.0)?;
        let q = Ratio::of(l, r);
        Ok(if q.infinite { 0.0 } else { q.witness_ratio })
    };
    let (a, b) = (eps_lo.ln(), eps_hi.ln());
    let n = (((b - a) / std::f64::consts::LN_10) * EPS_GRID_PER_DECADE as f64).ceil().max(2.0) as usize;
    let grid: Vec<f64> = (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect();
    let mut best = (f64::NEG_INFINITY, grid[0]);
    let mut best_i = 0;
    for (i, &g) in grid.iter().enumerate() {
        let v = ratio(g)?;
        if v > best.0 {
            best = (v, g);
            best_i = i;
        }
    }
    let (mut lo, mut hi) = (grid[best_i.saturating_sub(1)], grid[(best_i + 1).min(n)]);
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let (mut f1, mut f2) = (ratio(x1)?, ratio(x2)?);
    for _ in 0..60 {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = ratio(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = ratio(x2)?;
        }
    }
    for (v, x) in [(f1, x1), (f2, x2)] {
        if v > best.0 {
            best = (v, x);
        }
    }
    Ok((best.0, best.1.exp()))
}

/// Default cut-off for [`degree3_divergence`]: `2·max(a) + 50`.
pub fn default_trunc(a_values: &[f64]) -> f64 {
    2.0 * a_values.iter().copied().fold(0.0, f64::max) + 50.0
}

/// Weight `e^{a/2 − t}` on `[0, trunc]`. The constant factor cancels in the
/// ratio and keeps both tails of `f` representable for large `a`.
fn divergence_weight(a: f64, trunc: f64) -> Weight {
    Weight::exp_affine(0.5 * a, -1.0, 0.0, trunc).expect("valid divergence weight")
}

fn divergence_table(a_values: &[f64], trunc: f64, make: impl Fn(f64) -> UniPoly + Sync) -> Result<Vec<DivergenceRow>, CheckError> {
    if a_values.is_empty() || a_values.iter().any(|a| !(*a > 0.0 && a.is_finite())) {
        return Err(CheckError::InvalidArgument("a values must be positive".into()));
    }
    if a_values.windows(2).any(|p| p[1] <= p[0]) {
        return Err(CheckError::InvalidArgument("a values must be increasing".into()));
    }
    if !(trunc > a_values[a_values.len() - 1]) {
        return Err(CheckError::InvalidArgument("trunc must exceed every a".into()));
    }
    map_indices(a_values.len(), |i| {
        let a = a_values[i];
        let (ratio, eps) = eps_sup(&make(a), &divergence_weight(a, trunc), 1e-3, a * a)?;
        Ok(DivergenceRow { a, eps_star: eps, witness_ratio: ratio })
    })
    .into_iter()
    .collect()
}

/// Witness ratios of `(t + 1)²(t − a)` under `e^{−t}` on `[0, trunc]`, each
/// maximized over `eps`.
pub fn degree3_divergence(a_values: &[f64], trunc: f64) -> Result<Vec<DivergenceRow>, CheckError> {
    divergence_table(a_values, trunc, |a| UniPoly::from_roots(&[-1.0, -1.0, a]))
}

/// Same protocol for the quadratic `(t + 1)(t − a)`.
pub fn degree2_control(a_values: &[f64], trunc: f64) -> Result<Vec<DivergenceRow>, CheckError> {
    divergence_table(a_values, trunc, |a| UniPoly::from_roots(&[-1.0, a]))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileCell {
    pub d: usize,
    pub n: u32,
    pub best_ratio: f64,
    pub infinite_count: usize,
}

/// `worst_ratio_search` for the power family over `d = 1..=max_d`,
/// `n = 0..=max_n`, every cell with the same seed.
pub fn profile_constant(max_d: usize, max_n: u32, budget: usize, seed: u64) -> Result<Vec<ProfileCell>, CheckError> {
    if max_d == 0 || max_d > 6 || max_n > 8 {
        return Err(CheckError::InvalidArgument("profile requires 1 ≤ d ≤ 6 and n ≤ 8".into()));
    }
    let mut cells = Vec::new();
    for d in 1..=max_d {
        for n in 0..=max_n {
            let res = worst_ratio_search(&SearchSpace::new(d, Family::Power { n }), budget, seed)?;
            cells.push(ProfileCell { d, n, best_ratio: res.best_ratio, infinite_count: res.infinite.len() });
        }
    }
    Ok(cells)
}
