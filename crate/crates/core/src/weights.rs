//! The two one-dimensional weight families: `e^{c0 + c1 t}` and `(αt + β)^{n−1}`.
//!
//! Weights are kept unnormalized. All integrals of polynomials against a
//! weight are evaluated in closed form: the integrand is re-expanded around a
//! point of the integration range and integrated term by term, with the
//! exponential family going through lower incomplete gamma values.

use serde::{Deserialize, Serialize};

use crate::poly::{real_roots, Interval, IntervalUnion, PolyError, UniPoly, ROOT_TOL};
use crate::serde_ext::ext_f64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum WeightError {
    #[error("invalid domain [{lo}, {hi}]")]
    InvalidDomain { lo: f64, hi: f64 },
    #[error("divergent weight: infinite domain needs an exponential weight with c1 < 0")]
    Divergent,
    #[error("density is not positive on the interior of the domain")]
    NonPositiveDensity,
    #[error("invalid weight parameter: {0}")]
    InvalidParameter(String),
    #[error("set [{lo}, {hi}] is not contained in the weight domain")]
    OutsideDomain { lo: f64, hi: f64 },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum WeightKind {
    /// Density `e^{c0 + c1 t}`.
    ExpAffine { c0: f64, c1: f64 },
    /// Density `t^n`, domain inside `[0, ∞)`.
    Power { n: u32 },
    /// Density `(αt + β)^{n−1}`.
    AffinePower { alpha: f64, beta: f64, n: u32 },
}

/// A positive weight on an interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WeightRepr", into = "WeightRepr")]
pub struct Weight {
    kind: WeightKind,
    lo: f64,
    hi: f64,
}

#[derive(Clone, Serialize, Deserialize)]
struct WeightRepr {
    #[serde(flatten)]
    kind: WeightKind,
    #[serde(with = "ext_f64")]
    lo: f64,
    #[serde(with = "ext_f64")]
    hi: f64,
}

impl TryFrom<WeightRepr> for Weight {
    type Error = WeightError;
    fn try_from(r: WeightRepr) -> Result<Self, WeightError> {
        Weight::new(r.kind, r.lo, r.hi)
    }
}

impl From<Weight> for WeightRepr {
    fn from(w: Weight) -> Self {
        Self {
            kind: w.kind,
            lo: w.lo,
            hi: w.hi,
        }
    }
}

/// Affine change of variables `u = scale·t + shift`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineMap {
    pub scale: f64,
    pub shift: f64,
}

impl AffineMap {
    pub const IDENTITY: Self = Self { scale: 1.0, shift: 0.0 };

    pub fn apply(&self, t: f64) -> f64 {
        self.scale * t + self.shift
    }

    pub fn invert(&self, u: f64) -> f64 {
        (u - self.shift) / self.scale
    }

    /// `f ∘ map⁻¹`, the polynomial in the new variable.
    pub fn pull_back(&self, f: &UniPoly) -> UniPoly {
        f.compose_affine(-self.shift / self.scale, 1.0 / self.scale)
    }
}

/// Result of [`Weight::canonicalize`]: `∫ g dw = jacobian · ∫ g∘map⁻¹ d(weight)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Canonical {
    pub weight: Weight,
    pub map: AffineMap,
    pub jacobian: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentTable {
    pub weight: Weight,
    pub moments: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedStats {
    pub mass: f64,
    pub mean: f64,
    pub variance: f64,
}

impl Weight {
    pub fn new(kind: WeightKind, lo: f64, hi: f64) -> Result<Self, WeightError> {
        if lo.is_nan() || hi.is_nan() || lo > hi || lo == f64::INFINITY || lo == f64::NEG_INFINITY {
            return Err(WeightError::InvalidDomain { lo, hi });
        }
        match kind {
            WeightKind::ExpAffine { c0, c1 } => {
                if !c0.is_finite() || !c1.is_finite() {
                    return Err(WeightError::InvalidParameter("c0, c1 must be finite".into()));
                }
                if hi.is_infinite() && c1 >= 0.0 {
                    return Err(WeightError::Divergent);
                }
            }
            WeightKind::Power { .. } => {
                if hi.is_infinite() {
                    return Err(WeightError::Divergent);
                }
                if lo < 0.0 {
                    return Err(WeightError::NonPositiveDensity);
                }
            }
            WeightKind::AffinePower { alpha, beta, n } => {
                if hi.is_infinite() {
                    return Err(WeightError::Divergent);
                }
                if !alpha.is_finite() || !beta.is_finite() {
                    return Err(WeightError::InvalidParameter("alpha, beta must be finite".into()));
                }
                if n == 0 {
                    return Err(WeightError::InvalidParameter("n must be at least 1".into()));
                }
                // affine, so positivity on the open interval means
                // nonnegativity at both ends and positivity somewhere
                let (a, b) = (alpha * lo + beta, alpha * hi + beta);
                let slack = 1e-12 * (alpha.abs() * lo.abs().max(hi.abs()) + beta.abs());
                if n > 1 && (a < -slack || b < -slack || (a <= 0.0 && b <= 0.0)) {
                    return Err(WeightError::NonPositiveDensity);
                }
            }
        }
        Ok(Self { kind, lo, hi })
    }

    /// Lebesgue measure on `[lo, hi]`.
    pub fn uniform(lo: f64, hi: f64) -> Result<Self, WeightError> {
        Self::new(WeightKind::ExpAffine { c0: 0.0, c1: 0.0 }, lo, hi)
    }

    /// `e^{−t}` on `[0, ∞)`.
    pub fn exponential() -> Self {
        Self::new(WeightKind::ExpAffine { c0: 0.0, c1: -1.0 }, 0.0, f64::INFINITY)
            .expect("valid exponential weight")
    }

    pub fn exp_affine(c0: f64, c1: f64, lo: f64, hi: f64) -> Result<Self, WeightError> {
        Self::new(WeightKind::ExpAffine { c0, c1 }, lo, hi)
    }

    pub fn power(n: u32, lo: f64, hi: f64) -> Result<Self, WeightError> {
        Self::new(WeightKind::Power { n }, lo, hi)
    }

    pub fn affine_power(alpha: f64, beta: f64, n: u32, lo: f64, hi: f64) -> Result<Self, WeightError> {
        Self::new(WeightKind::AffinePower { alpha, beta, n }, lo, hi)
    }

    pub fn kind(&self) -> WeightKind {
        self.kind
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn with_domain(&self, lo: f64, hi: f64) -> Result<Self, WeightError> {
        Self::new(self.kind, lo, hi)
    }

    pub fn density(&self, t: f64) -> f64 {
        match self.kind {
            WeightKind::ExpAffine { c0, c1 } => (c0 + c1 * t).exp(),
            WeightKind::Power { n } => t.powi(n as i32),
            WeightKind::AffinePower { alpha, beta, n } => (alpha * t + beta).powi(n as i32 - 1),
        }
    }

    /// `∫ t^k dw`.
    pub fn moment(&self, k: usize) -> f64 {
        self.integrate_poly(&UniPoly::monomial(k))
    }

    pub fn moment_table(&self, max_k: usize) -> MomentTable {
        MomentTable {
            weight: *self,
            moments: (0..=max_k).map(|k| self.moment(k)).collect(),
        }
    }

    pub fn mass(&self) -> f64 {
        self.mass_on(self.lo, self.hi)
    }

    pub fn stats(&self) -> WeightedStats {
        let mass = self.mass();
        let mean = self.moment(1) / mass;
        let centered = UniPoly::new(vec![-mean, 1.0]);
        let variance = self.integrate_product(&centered, &centered) / mass;
        WeightedStats { mass, mean, variance }
    }

    pub fn integrate_poly(&self, f: &UniPoly) -> f64 {
        self.integrate_poly_on(f, self.lo, self.hi)
    }

    /// `∫_a^b f dw` for `[a, b]` inside the domain.
    pub fn integrate_poly_on(&self, f: &UniPoly, a: f64, b: f64) -> f64 {
        debug_assert!(a <= b);
        if f.is_zero() || a >= b {
            return 0.0;
        }
        let c = anchor(a, b);
        self.integrate_shifted(&f.compose_affine(c, 1.0), c, a, b)
    }

    /// `∫ f·g dw`. The factors are re-expanded about the middle of the domain
    /// before multiplying, so that a product which is small compared with its
    /// monomial coefficients keeps its relative accuracy.
    pub fn integrate_product(&self, f: &UniPoly, g: &UniPoly) -> f64 {
        let (a, b) = (self.lo, self.hi);
        if f.is_zero() || g.is_zero() || a >= b {
            return 0.0;
        }
        let c = anchor(a, b);
        let p = &f.compose_affine(c, 1.0) * &g.compose_affine(c, 1.0);
        self.integrate_shifted(&p, c, a, b)
    }

    /// `∫_a^b f^k dw`, with `f` re-expanded about the middle of `[a, b]`
    /// before the power is taken.
    pub fn integrate_powi_on(&self, f: &UniPoly, k: u32, a: f64, b: f64) -> f64 {
        if a >= b {
            return 0.0;
        }
        let c = anchor(a, b);
        self.integrate_shifted(&f.compose_affine(c, 1.0).powi(k), c, a, b)
    }

    /// `∫ |f|^k dw`, split at the real roots of `f`.
    pub fn integrate_abs_powi(&self, f: &UniPoly, k: u32) -> Result<f64, WeightError> {
        if f.is_zero() {
            return Ok(if k == 0 { self.mass() } else { 0.0 });
        }
        let roots = real_roots(f, self.lo, self.hi, ROOT_TOL)?;
        let mut cuts = vec![self.lo];
        cuts.extend(roots.roots.iter().copied().filter(|&r| r > self.lo && r < self.hi));
        cuts.push(self.hi);
        Ok(cuts.windows(2).map(|p| self.integrate_powi_on(f, k, p[0], p[1]).abs()).sum())
    }

    // ∫_a^b p(t − c) dw(t)
    fn integrate_shifted(&self, p: &UniPoly, c: f64, a: f64, b: f64) -> f64 {
        match self.kind {
            WeightKind::ExpAffine { c0, c1 } if c1 != 0.0 => exp_integral(p, c, c0, c1, a, b),
            WeightKind::ExpAffine { c0, .. } => c0.exp() * centered_integral(p, c, &UniPoly::constant(1.0), a, b),
            WeightKind::Power { n } => {
                let m = 0.5 * (a + b);
                let dens = UniPoly::new(vec![m, 1.0]).powi(n);
                centered_integral(p, c, &dens, a, b)
            }
            WeightKind::AffinePower { alpha, beta, n } => {
                let m = 0.5 * (a + b);
                let dens = UniPoly::new(vec![alpha * m + beta, alpha]).powi(n - 1);
                centered_integral(p, c, &dens, a, b)
            }
        }
    }

    pub fn mass_on(&self, a: f64, b: f64) -> f64 {
        self.integrate_poly_on(&UniPoly::constant(1.0), a, b)
    }

    fn check_inside(&self, set: &IntervalUnion) -> Result<(), WeightError> {
        let slack = 1e-12 * (1.0 + self.lo.abs().max(if self.hi.is_finite() { self.hi.abs() } else { 0.0 }));
        for iv in set.intervals() {
            if iv.lo < self.lo - slack || iv.hi > self.hi + slack {
                return Err(WeightError::OutsideDomain { lo: iv.lo, hi: iv.hi });
            }
        }
        Ok(())
    }

    /// `w(A)`; open/closed flags are irrelevant for an atomless measure.
    pub fn integrate_indicator(&self, set: &IntervalUnion) -> Result<f64, WeightError> {
        self.check_inside(set)?;
        Ok(set
            .clip(self.lo, self.hi)
            .intervals()
            .iter()
            .map(|iv| self.mass_on(iv.lo, iv.hi))
            .sum())
    }

    /// `∫_A f dw`.
    pub fn integrate_poly_over(&self, f: &UniPoly, set: &IntervalUnion) -> Result<f64, WeightError> {
        self.check_inside(set)?;
        Ok(set
            .clip(self.lo, self.hi)
            .intervals()
            .iter()
            .map(|iv| self.integrate_poly_on(f, iv.lo, iv.hi))
            .sum())
    }

    /// `∫ |f − r| dw`.
    pub fn integrate_abs_poly(&self, f: &UniPoly, r: f64) -> Result<f64, WeightError> {
        self.abs_integral_on(&f.shift_const(r), self.lo, self.hi)
    }

    /// `∫_A |f − r| dw`.
    pub fn integrate_abs_poly_over(&self, f: &UniPoly, r: f64, set: &IntervalUnion) -> Result<f64, WeightError> {
        self.check_inside(set)?;
        let g = f.shift_const(r);
        set.clip(self.lo, self.hi)
            .intervals()
            .iter()
            .map(|iv| self.abs_integral_on(&g, iv.lo, iv.hi))
            .sum()
    }

    /// `∫_a^b |g| dw`, splitting at the real roots of `g`; on each piece the
    /// sign of `g` is constant, so the piece contributes the modulus of its
    /// signed integral.
    pub fn abs_integral_on(&self, g: &UniPoly, a: f64, b: f64) -> Result<f64, WeightError> {
        if g.is_zero() || a >= b {
            return Ok(0.0);
        }
        let roots = real_roots(g, a, b, ROOT_TOL)?;
        let mut cuts = vec![a];
        cuts.extend(roots.roots.iter().copied().filter(|&r| r > a && r < b));
        cuts.push(b);
        Ok(cuts
            .windows(2)
            .map(|p| self.integrate_poly_on(g, p[0], p[1]).abs())
            .sum())
    }

    /// Equivalent weight in normal form together with the substitution.
    ///
    /// `ExpAffine` goes to `e^{−u}` on `[0, L]` (or Lebesgue on `[0, L]` when
    /// `c1 = 0`); `AffinePower` goes to `Power{n−1}` on the image interval;
    /// `Power` is already canonical.
    pub fn canonicalize(&self) -> Canonical {
        let (lo, hi) = (self.lo, self.hi);
        match self.kind {
            WeightKind::ExpAffine { c0, c1 } if c1 < 0.0 => {
                let s = -c1;
                Canonical {
                    weight: Weight::exp_affine(0.0, -1.0, 0.0, s * (hi - lo)).expect("canonical"),
                    map: AffineMap { scale: s, shift: -s * lo },
                    jacobian: (c0 + c1 * lo).exp() / s,
                }
            }
            WeightKind::ExpAffine { c0, c1 } if c1 > 0.0 => Canonical {
                weight: Weight::exp_affine(0.0, -1.0, 0.0, c1 * (hi - lo)).expect("canonical"),
                map: AffineMap { scale: -c1, shift: c1 * hi },
                jacobian: (c0 + c1 * hi).exp() / c1,
            },
            WeightKind::ExpAffine { c0, .. } => Canonical {
                weight: Weight::uniform(0.0, hi - lo).expect("canonical"),
                map: AffineMap { scale: 1.0, shift: -lo },
                jacobian: c0.exp(),
            },
            WeightKind::Power { .. } => Canonical {
                weight: *self,
                map: AffineMap::IDENTITY,
                jacobian: 1.0,
            },
            WeightKind::AffinePower { beta, n, .. } if self.affine_alpha() == 0.0 => Canonical {
                weight: Weight::uniform(0.0, hi - lo).expect("canonical"),
                map: AffineMap { scale: 1.0, shift: -lo },
                jacobian: beta.powi(n as i32 - 1),
            },
            WeightKind::AffinePower { alpha, beta, n } => {
                let (a, b) = (alpha * lo + beta, alpha * hi + beta);
                let (u_lo, u_hi) = if alpha > 0.0 { (a, b) } else { (b, a) };
                Canonical {
                    weight: Weight::power(n - 1, u_lo.max(0.0), u_hi).expect("canonical"),
                    map: AffineMap { scale: alpha, shift: beta },
                    jacobian: 1.0 / alpha.abs(),
                }
            }
        }
    }

    fn affine_alpha(&self) -> f64 {
        match self.kind {
            WeightKind::AffinePower { alpha, .. } => alpha,
            _ => 0.0,
        }
    }

    /// Smallest `T` with `∫_T^∞ density·(1+t)^{2d} dt < 1e−12`; `None` for
    /// bounded domains.
    pub fn truncation_point(&self, degree: usize) -> Option<f64> {
        if self.hi.is_finite() {
            return None;
        }
        let p = UniPoly::new(vec![1.0, 1.0]).powi(2 * degree as u32);
        let tail = |t: f64| self.integrate_poly_on(&p, t, f64::INFINITY);
        let target = 1e-12;
        if tail(self.lo) < target {
            return Some(self.lo);
        }
        let mut step = 1.0_f64.max(self.lo.abs());
        let mut hi = self.lo + step;
        while tail(hi) >= target {
            step *= 2.0;
            hi = self.lo + step;
        }
        let mut lo = self.lo;
        while hi - lo > 1e-9 * hi.abs().max(1.0) {
            let mid = 0.5 * (lo + hi);
            if tail(mid) < target {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Some(hi)
    }

    /// Same weight cut off at [`Weight::truncation_point`]; bounded weights
    /// are returned unchanged.
    pub fn truncated(&self, degree: usize) -> Self {
        match self.truncation_point(degree) {
            Some(t) => Self { hi: t, ..*self },
            None => *self,
        }
    }

    pub fn domain(&self) -> Interval {
        Interval::closed(self.lo, self.hi)
    }
}

/// `inf_s` of the variance of the normalized `t^n` on `[s, s+1]` over a grid,
/// together with the limiting value `1/12` as `s → ∞`.
pub fn c1_inf(n: u32, s_grid: &[f64]) -> f64 {
    s_grid
        .iter()
        .filter(|s| s.is_finite() && **s >= 0.0)
        .map(|&s| Weight::power(n, s, s + 1.0).expect("valid power weight").stats().variance)
        .fold(1.0 / 12.0, f64::min)
}

// expansion point for integrals over [a, b]: the midpoint, or the finite
// end of a half-line
fn anchor(a: f64, b: f64) -> f64 {
    if b.is_finite() {
        0.5 * (a + b)
    } else {
        a
    }
}

// ∫_a^b p(t − c) d(t − m) dt with d a polynomial and m the midpoint
fn centered_integral(p: &UniPoly, c: f64, dens_in_u: &UniPoly, a: f64, b: f64) -> f64 {
    let m = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let q = &p.compose_affine(m - c, 1.0) * dens_in_u;
    let mut hp = h;
    let mut sum = 0.0;
    for (j, &cj) in q.coeffs().iter().enumerate() {
        if j % 2 == 0 {
            sum += 2.0 * cj * hp / (j as f64 + 1.0);
        }
        hp *= h;
    }
    sum
}

// ∫_a^b p(t − c) e^{c0 + c1 t} dt for c1 ≠ 0; substitutes t = a + u/|c1|
// (or t = b − u/c1 when c1 > 0) so that the weight becomes e^{−u} on [0, L]
// and sums incomplete gamma values. When that sum cancels badly the integral
// is redone by Gauss quadrature, which is exact up to rounding here.
fn exp_integral(p: &UniPoly, c: f64, c0: f64, c1: f64, a: f64, b: f64) -> f64 {
    let lam = c1.abs();
    let (g, factor) = if c1 < 0.0 {
        (p.compose_affine(a - c, 1.0 / lam), (c0 + c1 * a).exp() / lam)
    } else {
        (p.compose_affine(b - c, -1.0 / lam), (c0 + c1 * b).exp() / lam)
    };
    let len = lam * (b - a);
    let gammas = lower_gamma_int_table(g.degree(), len);
    let (sum, size) = g
        .coeffs()
        .iter()
        .zip(&gammas)
        .fold((0.0, 0.0), |(s, m), (c, gm)| (s + c * gm, m + (c * gm).abs()));
    if size <= GAMMA_CANCELLATION * sum.abs() {
        return factor * sum;
    }
    // the quadrature samples p directly, away from the unstable expansion
    let nodes = p.degree() / 2 + 1;
    let quad = if len.is_infinite() {
        gauss::laguerre(nodes, |u| p.eval(a - c + u / lam))
    } else {
        // panels of unit length in u keep the exponential well inside the rule's reach
        let panels = len.ceil().max(1.0) as usize;
        let width = (b - a) / panels as f64;
        let anchor = if c1 < 0.0 { a } else { b };
        (0..panels)
            .map(|i| {
                let lo = a + i as f64 * width;
                let hi = if i + 1 == panels { b } else { lo + width };
                gauss::legendre(nodes + 12, lo, hi, |t| p.eval(t - c) * (c1 * (t - anchor)).exp())
            })
            .sum::<f64>()
            * lam
    };
    factor * quad
}

/// Largest tolerated ratio of `Σ|terms|` to `|Σ terms|` in the gamma sum.
const GAMMA_CANCELLATION: f64 = 1e4;

mod gauss {
    use std::num::NonZeroUsize;
    use std::sync::{Mutex, OnceLock};

    use gauss_quad::laguerre::GaussLaguerre;
    use gauss_quad::legendre::GaussLegendre;
    use gauss_quad::FiniteAboveNegOneF64;

    fn rule<T: Clone>(cache: &'static OnceLock<Mutex<Vec<Option<T>>>>, n: usize, make: impl FnOnce(NonZeroUsize) -> T) -> T {
        let mut rules = cache.get_or_init(|| Mutex::new(Vec::new())).lock().expect("rule cache");
        if rules.len() <= n {
            rules.resize(n + 1, None);
        }
        rules[n].get_or_insert_with(|| make(NonZeroUsize::new(n).expect("at least one node"))).clone()
    }

    /// `∫_a^b g` with an `n`-point Gauss–Legendre rule.
    pub fn legendre(n: usize, a: f64, b: f64, g: impl Fn(f64) -> f64) -> f64 {
        static CACHE: OnceLock<Mutex<Vec<Option<GaussLegendre>>>> = OnceLock::new();
        rule(&CACHE, n, GaussLegendre::new).integrate(a, b, g)
    }

    /// `∫_0^∞ g(u) e^{−u} du` with an `n`-point Gauss–Laguerre rule.
    pub fn laguerre(n: usize, g: impl Fn(f64) -> f64) -> f64 {
        static CACHE: OnceLock<Mutex<Vec<Option<GaussLaguerre>>>> = OnceLock::new();
        let alpha = FiniteAboveNegOneF64::new(0.0).expect("zero is above −1");
        rule(&CACHE, n, |k| GaussLaguerre::new(k, alpha)).integrate(g)
    }
}

fn ln_factorial(k: usize) -> f64 {
    (2..=k).map(|i| (i as f64).ln()).sum()
}

/// `γ(j+1, L) = ∫_0^L u^j e^{−u} du` for `j = 0..=max_j`.
pub fn lower_gamma_int_table(max_j: usize, len: f64) -> Vec<f64> {
    (0..=max_j).map(|j| lower_gamma_int(j, len)).collect()
}

/// `γ(j+1, L)` for integer `j`, `L ∈ [0, ∞]`.
pub fn lower_gamma_int(j: usize, len: f64) -> f64 {
    let s = j as f64 + 1.0;
    if len <= 0.0 {
        return 0.0;
    }
    if len.is_infinite() {
        return ln_factorial(j).exp();
    }
    if j == 0 {
        return -(-len).exp_m1();
    }
    if len < s {
        // γ(s, L) = L^s e^{−L} Σ_k L^k / (s (s+1) ⋯ (s+k))
        let mut term = 1.0 / s;
        let mut sum = term;
        let mut k = 1.0;
        while term > sum * 1e-17 {
            term *= len / (s + k);
            sum += term;
            k += 1.0;
        }
        (s * len.ln() - len).exp() * sum
    } else {
        // j! (1 − e^{−L} Σ_{i≤j} L^i / i!)
        let ln_len = len.ln();
        let tail: f64 = (0..=j)
            .map(|i| (i as f64 * ln_len - len - ln_factorial(i)).exp())
            .sum();
        ln_factorial(j).exp() * (1.0 - tail)
    }
}
