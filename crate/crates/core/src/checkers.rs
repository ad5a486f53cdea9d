//! Both sides of the one-dimensional inequalities for concrete `(f, w)`.
//!
//! Probabilities and norms are taken with respect to the normalized weight
//! `w / w(domain)`, except in the product small-ball and vanishing-point
//! checks, which compare unnormalized integrals.

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::poly::{preimage, real_roots, sign_partition, Interval, IntervalUnion, PolyError, UniPoly, ROOT_TOL};
use crate::quad::{finite_range, weighted_average, Factored};
use crate::report::{IneqReport, IneqTag};
use crate::weights::{Weight, WeightError, WeightKind};

/// Default `eps_frac` grid for mean-deviation scans.
pub const EPS_FRAC_GRID: [f64; 5] = [0.0, 0.01, 0.05, 0.1, 0.2];
/// Relative bisection tolerance for `k(f)`.
pub const KF_RTOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CheckError {
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("f has zero variance under the weight")]
    ZeroSigma,
    #[error("f is identically zero, so k(f) = 0")]
    ZeroPolynomial,
    #[error("f has no root in the weight domain")]
    NoRootInDomain,
    #[error("a power weight t^n is required")]
    NotPowerWeight,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolyStats1D {
    pub norm0: f64,
    pub norm1: f64,
    pub norm2: f64,
    pub kf: f64,
    pub mean: f64,
    pub sigma: f64,
    pub alpha: f64,
}

fn instance(f: &UniPoly, w: &Weight, rest: serde_json::Value) -> serde_json::Value {
    let mut v = json!({ "f": f, "weight": w });
    if let (Some(obj), serde_json::Value::Object(extra)) = (v.as_object_mut(), rest) {
        obj.extend(extra);
    }
    v
}

/// `w(|f| ≥ k)`, unnormalized.
pub fn tail_mass(f: &UniPoly, w: &Weight, k: f64) -> Result<f64, CheckError> {
    if k <= 0.0 {
        return Ok(w.mass());
    }
    let sp = sign_partition(f, k, w.lo(), w.hi())?;
    Ok(w.integrate_indicator(&sp.pos)? + w.integrate_indicator(&sp.neg)?)
}

/// Smallest `k` with `w(|f| ≥ k) ≤ w(domain)/e`, from above.
pub fn k_of(f: &UniPoly, w: &Weight) -> Result<f64, CheckError> {
    if f.is_zero() {
        return Ok(0.0);
    }
    let mass = w.mass();
    let target = mass / std::f64::consts::E;
    let ok = |k: f64| -> Result<bool, CheckError> { Ok(tail_mass(f, w, k)? <= target) };
    let norm2 = (w.integrate_product(f, f) / mass).sqrt();
    // Chebyshev: w(|f| ≥ k) ≤ ‖f‖₂²/k²
    let mut hi = norm2 * std::f64::consts::E.sqrt() * (1.0 + 1e-9);
    while !ok(hi)? {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    while hi - lo > KF_RTOL * hi {
        let mid = 0.5 * (lo + hi);
        if ok(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// `‖f‖₀ = exp(∫ ln|f| dμ)`, accumulated factor by factor.
pub fn norm0(f: &UniPoly, w: &Weight) -> Result<f64, CheckError> {
    if f.is_zero() {
        return Ok(0.0);
    }
    if f.degree() == 0 {
        return Ok(f.leading().abs());
    }
    let fac = Factored::new(f)?;
    let (lo, hi) = finite_range(w, f.degree());
    let sing: Vec<f64> = fac.roots.iter().map(|r| r.0).collect();
    Ok(weighted_average(w, lo, hi, &sing, |t| fac.ln_abs(t)).exp())
}

/// `‖f‖_q` for `q ≥ 1`; integer `q` exactly, otherwise by quadrature.
pub fn norm_q(f: &UniPoly, w: &Weight, q: f64) -> Result<f64, CheckError> {
    if !(q >= 1.0 && q.is_finite()) {
        return Err(CheckError::InvalidArgument(format!("q must be ≥ 1, got {q}")));
    }
    if f.is_zero() {
        return Ok(0.0);
    }
    let mass = w.mass();
    if q.fract() == 0.0 {
        let k = q as u32;
        let v = if k % 2 == 0 { w.integrate_powi_on(f, k, w.lo(), w.hi()) } else { w.integrate_abs_powi(f, k)? };
        return Ok((v / mass).powf(1.0 / q));
    }
    let fac = Factored::new(f)?;
    let (lo, hi) = finite_range(w, (q * f.degree() as f64).ceil() as usize);
    let sing: Vec<f64> = fac.roots.iter().map(|r| r.0).collect();
    let avg = weighted_average(w, lo, hi, &sing, |t| (q * fac.ln_abs(t)).exp());
    Ok(avg.powf(1.0 / q))
}

pub fn poly_stats(f: &UniPoly, w: &Weight) -> Result<PolyStats1D, CheckError> {
    let mass = w.mass();
    let mean = w.integrate_poly(f) / mass;
    let centered = f.shift_const(mean);
    Ok(PolyStats1D {
        norm0: norm0(f, w)?,
        norm1: w.integrate_abs_poly(f, 0.0)? / mass,
        norm2: (w.integrate_product(f, f) / mass).sqrt(),
        kf: k_of(f, w)?,
        mean,
        sigma: (w.integrate_product(&centered, &centered) / mass).sqrt(),
        alpha: w.integrate_abs_poly(f, mean)? / mass,
    })
}

/// `(lhs, rhs_core)` of the product small-ball inequality, unnormalized.
pub fn product_smallball_sides(f: &UniPoly, w: &Weight, eps: f64, r: f64) -> Result<(f64, f64), CheckError> {
    let sp = sign_partition(f, eps, w.lo(), w.hi())?;
    let neg = w.integrate_indicator(&sp.neg)?;
    let pos = w.integrate_indicator(&sp.pos)?;
    let mid = w.integrate_indicator(&sp.mid)?;
    let lhs = eps * neg * pos;
    // no need for the absolute integral when the left side vanishes
    let rhs = if mid == 0.0 { 0.0 } else { mid * w.integrate_abs_poly(f, r)? };
    Ok((lhs, rhs))
}

/// `eps·w(f ≤ −eps)·w(f ≥ eps)` against `w(|f| < eps)·∫|f − r| dw`.
pub fn check_product_smallball(f: &UniPoly, w: &Weight, eps: f64, r: f64) -> Result<IneqReport, CheckError> {
    let (lhs, rhs) = product_smallball_sides(f, w, eps, r)?;
    Ok(IneqReport::new(IneqTag::ProductSmallball, lhs, rhs, instance(f, w, json!({ "eps": eps, "r": r }))))
}

/// `‖f‖₁^{1/d}·μ(|f| ≤ α)` against `α^{1/d}` (`d` taken as at least 1).
pub fn check_carbery_wright(f: &UniPoly, w: &Weight, alpha: f64) -> Result<IneqReport, CheckError> {
    if !(alpha > 0.0) {
        return Err(CheckError::InvalidArgument(format!("alpha must be positive, got {alpha}")));
    }
    let mass = w.mass();
    let d = f.degree().max(1) as f64;
    let prob = if f.degree() == 0 {
        if f.leading().abs() <= alpha { 1.0 } else { 0.0 }
    } else {
        let sp = sign_partition(f, alpha, w.lo(), w.hi())?;
        w.integrate_indicator(&sp.mid)? / mass
    };
    let norm1 = w.integrate_abs_poly(f, 0.0)? / mass;
    let lhs = norm1.powf(1.0 / d) * prob;
    Ok(IneqReport::new(IneqTag::CarberyWright, lhs, alpha.powf(1.0 / d), instance(f, w, json!({ "alpha": alpha }))))
}

/// `μ(|f| ≥ (4t)^d k(f))` against `e^{−t}`.
pub fn check_nsv_tail(f: &UniPoly, w: &Weight, t: f64) -> Result<IneqReport, CheckError> {
    if !(t >= 1.0 && t.is_finite()) {
        return Err(CheckError::InvalidArgument(format!("t must be ≥ 1, got {t}")));
    }
    if f.is_zero() {
        return Err(CheckError::ZeroPolynomial);
    }
    let kf = k_of(f, w)?;
    let level = (4.0 * t).powi(f.degree() as i32) * kf;
    let lhs = tail_mass(f, w, level)? / w.mass();
    Ok(IneqReport::new(IneqTag::NsvTail, lhs, (-t).exp(), instance(f, w, json!({ "t": t })))
        .with_extra("kf", kf)
        .with_extra("level", level))
}

/// `μ(U)^{d+1} ∫|f| dμ` against `∫_U |f| dμ`.
pub fn check_restricted_mass(f: &UniPoly, w: &Weight, set: &IntervalUnion) -> Result<IneqReport, CheckError> {
    let mass = w.mass();
    let pu = w.integrate_indicator(set)? / mass;
    let lhs = pu.powi(f.degree() as i32 + 1) * (w.integrate_abs_poly(f, 0.0)? / mass);
    let rhs = w.integrate_abs_poly_over(f, 0.0, set)? / mass;
    Ok(IneqReport::new(IneqTag::RestrictedMass, lhs, rhs, instance(f, w, json!({ "set": set }))))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KhinchinReport {
    pub vs_norm0: IneqReport,
    pub vs_norm1: IneqReport,
}

/// `‖f‖_q` against `q^d‖f‖₀` and `q^d‖f‖₁`.
pub fn check_khinchin(f: &UniPoly, w: &Weight, q: f64) -> Result<KhinchinReport, CheckError> {
    let nq = norm_q(f, w, q)?;
    let qd = q.powi(f.degree() as i32);
    let n0 = norm0(f, w)?;
    let n1 = w.integrate_abs_poly(f, 0.0)? / w.mass();
    let inst = instance(f, w, json!({ "q": q }));
    Ok(KhinchinReport {
        vs_norm0: IneqReport::new(IneqTag::KhinchinNorm0, nq, qd * n0, inst.clone()),
        vs_norm1: IneqReport::new(IneqTag::KhinchinNorm1, nq, qd * n1, inst),
    })
}

/// `σ(μ)‖f′‖₂` against `‖f‖₂`.
pub fn check_reverse_poincare(f: &UniPoly, w: &Weight) -> Result<IneqReport, CheckError> {
    let st = w.stats();
    let df = f.derivative();
    let lhs = st.variance.sqrt() * (w.integrate_product(&df, &df) / st.mass).sqrt();
    let rhs = (w.integrate_product(f, f) / st.mass).sqrt();
    Ok(IneqReport::new(IneqTag::ReversePoincare, lhs, rhs, instance(f, w, json!({}))))
}

/// `μ(f − m_f ≥ eps_frac·α_f)` against 1; `extras.below_mean = μ(f < m_f)`.
pub fn check_mean_deviation(f: &UniPoly, w: &Weight, eps_frac: f64) -> Result<IneqReport, CheckError> {
    if !(eps_frac >= 0.0 && eps_frac.is_finite()) {
        return Err(CheckError::InvalidArgument(format!("eps_frac must be ≥ 0, got {eps_frac}")));
    }
    let mass = w.mass();
    let mean = w.integrate_poly(f) / mass;
    let centered = f.shift_const(mean);
    let var = w.integrate_product(&centered, &centered) / mass;
    if !(var > 0.0) || f.degree() == 0 {
        return Err(CheckError::ZeroSigma);
    }
    let alpha = w.integrate_abs_poly(f, mean)? / mass;
    let level = mean + eps_frac * alpha;
    let above = preimage(f, w.lo(), w.hi(), &IntervalUnion::single(Interval::closed(level, f64::INFINITY)))?;
    let below = preimage(
        f,
        w.lo(),
        w.hi(),
        &IntervalUnion::single(Interval { lo: f64::NEG_INFINITY, hi: mean, lo_closed: false, hi_closed: false }),
    )?;
    let lhs = w.integrate_indicator(&above)? / mass;
    Ok(IneqReport::new(IneqTag::MeanDeviation, lhs, 1.0, instance(f, w, json!({ "eps_frac": eps_frac })))
        .with_extra("below_mean", w.integrate_indicator(&below)? / mass)
        .with_extra("mean", mean)
        .with_extra("alpha", alpha))
}

/// `∫|f| t^n` against `∫|f − r| t^n` for `f` vanishing in the domain.
pub fn check_vanishing_l1(f: &UniPoly, w: &Weight, r: f64) -> Result<IneqReport, CheckError> {
    if !matches!(w.kind(), WeightKind::Power { .. }) {
        return Err(CheckError::NotPowerWeight);
    }
    if !f.is_zero() && real_roots(f, w.lo(), w.hi(), ROOT_TOL)?.is_empty() {
        return Err(CheckError::NoRootInDomain);
    }
    let lhs = w.integrate_abs_poly(f, 0.0)?;
    let rhs = w.integrate_abs_poly(f, r)?;
    Ok(IneqReport::new(IneqTag::VanishingL1, lhs, rhs, instance(f, w, json!({ "r": r }))))
}
