//! Random instances and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use polyconc::poly::{IntervalUnion, UniPoly};
use polyconc::par::rng_for;
use polyconc::weights::{Weight, WeightKind};
use rand::Rng;

/// Composite trapezoid rule for `∫_a^b g` with `panels` panels.
pub fn trapezoid<G: Fn(f64) -> f64>(g: G, a: f64, b: f64, panels: usize) -> f64 {
    if b <= a {
        return 0.0;
    }
    let h = (b - a) / panels as f64;
    let mut s = 0.5 * (g(a) + g(b));
    for i in 1..panels {
        s += g(a + h * i as f64);
    }
    s * h
}

/// Finite upper limit for brute-force integration of degree-`d` integrands.
pub fn oracle_hi(w: &Weight, degree: usize) -> f64 {
    w.truncation_point(degree).unwrap_or(w.hi())
}

/// `∫_A g dw` by the trapezoid rule, each interval of `A` integrated
/// separately so the indicator jumps fall on panel ends.
pub fn trapezoid_over<G: Fn(f64) -> f64>(w: &Weight, set: &IntervalUnion, degree: usize, g: G, panels: usize) -> f64 {
    let hi = oracle_hi(w, degree);
    set.clip(w.lo(), hi)
        .intervals()
        .iter()
        .map(|iv| trapezoid(|t| g(t) * w.density(t), iv.lo, iv.hi, panels))
        .sum()
}

/// One of the three weight families on a random domain.
pub fn random_weight<R: Rng>(rng: &mut R) -> Weight {
    match rng.random_range(0..4) {
        0 => {
            let lo = rng.random_range(-2.0..2.0);
            let len = rng.random_range(0.2..4.0);
            Weight::exp_affine(rng.random_range(-1.0..1.0), rng.random_range(-2.0..2.0), lo, lo + len).unwrap()
        }
        1 => {
            let lo = rng.random_range(-1.0..1.0);
            Weight::exp_affine(rng.random_range(-1.0..1.0), -rng.random_range(0.5..2.0), lo, f64::INFINITY).unwrap()
        }
        2 => {
            let s = rng.random_range(0.0..3.0);
            Weight::power(rng.random_range(0..6), s, s + rng.random_range(0.2..2.0)).unwrap()
        }
        _ => {
            let lo = rng.random_range(-1.0..1.0);
            let hi = lo + rng.random_range(0.2..2.0);
            let alpha: f64 = rng.random_range(0.2..2.0) * if rng.random::<bool>() { 1.0 } else { -1.0 };
            // keep αt + β > 0 on [lo, hi]
            let edge = if alpha > 0.0 { lo } else { hi };
            let beta = -alpha * edge + rng.random_range(0.05..1.0);
            Weight::new(WeightKind::AffinePower { alpha, beta, n: rng.random_range(1..6) }, lo, hi).unwrap()
        }
    }
}

/// Monic-up-to-scale polynomial with roots scattered around `[lo, hi]`.
pub fn random_poly<R: Rng>(rng: &mut R, w: &Weight, max_degree: usize) -> UniPoly {
    let d = rng.random_range(1..=max_degree);
    let (lo, len) = (w.lo(), working_hi(w) - w.lo());
    let roots: Vec<f64> = (0..d).map(|_| lo + len * rng.random_range(-0.3..1.3)).collect();
    UniPoly::from_roots(&roots).scale(rng.random_range(0.2..3.0))
}

/// A point inside the weight domain, away from the ends.
pub fn interior_point<R: Rng>(rng: &mut R, w: &Weight) -> f64 {
    w.lo() + (working_hi(w) - w.lo()) * rng.random_range(0.05..0.95)
}

pub fn rel_err(a: f64, b: f64, scale: f64) -> f64 {
    (a - b).abs() / scale.abs().max(f64::MIN_POSITIVE)
}

/// Finite part of the domain used for random sets and sample points.
pub fn working_hi(w: &Weight) -> f64 {
    if w.hi().is_finite() {
        w.hi()
    } else {
        w.lo() + 4.0
    }
}

/// One or two closed intervals inside the domain.
pub fn random_set<R: Rng>(rng: &mut R, w: &Weight) -> IntervalUnion {
    let (lo, hi) = (w.lo(), working_hi(w));
    let mut cuts: Vec<f64> = (0..4).map(|_| rng.random_range(lo..hi)).collect();
    cuts.sort_by(f64::total_cmp);
    let pairs = if rng.random::<bool>() {
        vec![(cuts[0], cuts[1]), (cuts[2], cuts[3])]
    } else {
        vec![(cuts[0], cuts[3])]
    };
    IntervalUnion::from_closed(&pairs).unwrap()
}

/// One exact-vs-oracle comparison: `|exact − oracle| / scale`.
pub struct OracleCase {
    pub label: &'static str,
    pub exact: f64,
    pub oracle: f64,
    pub scale: f64,
}

impl OracleCase {
    pub fn rel(&self) -> f64 {
        rel_err(self.exact, self.oracle, self.scale)
    }
}

/// Moment, signed integral, absolute integral and indicator mass of one
/// random instance, each paired with its trapezoid value.  Signed integrals
/// are scaled by the integral of the absolute integrand.
pub fn weight_oracle_cases(seed: u64, index: u64, panels: usize) -> (Weight, UniPoly, Vec<OracleCase>) {
    let mut rng = rng_for(seed, index);
    let w = random_weight(&mut rng);
    let f = random_poly(&mut rng, &w, 6);
    let d = f.degree();
    let k = rng.random_range(0..=2 * d);
    let r = rng.random_range(-1.0..1.0) * f.eval(interior_point(&mut rng, &w)).abs().max(1.0);
    let set = random_set(&mut rng, &w);
    let (lo, hi) = (w.lo(), oracle_hi(&w, d));
    let dens = |g: &dyn Fn(f64) -> f64| trapezoid(|t| g(t) * w.density(t), lo, hi, panels);
    let mut cases = Vec::new();
    let tk = |t: f64| t.powi(k as i32);
    cases.push(OracleCase {
        label: "moment",
        exact: w.moment(k),
        oracle: dens(&tk),
        scale: dens(&|t| tk(t).abs()),
    });
    cases.push(OracleCase {
        label: "integrate_poly",
        exact: w.integrate_poly(&f),
        oracle: dens(&|t| f.eval(t)),
        scale: dens(&|t| f.eval(t).abs()),
    });
    let abs = dens(&|t| (f.eval(t) - r).abs());
    cases.push(OracleCase {
        label: "integrate_abs_poly",
        exact: w.integrate_abs_poly(&f, r).unwrap(),
        oracle: abs,
        scale: abs,
    });
    let mass = trapezoid_over(&w, &set, d, |_| 1.0, panels);
    cases.push(OracleCase {
        label: "integrate_indicator",
        exact: w.integrate_indicator(&set).unwrap(),
        oracle: mass,
        scale: mass,
    });
    (w, f, cases)
}

/// Distinct roots in `[-4, 4]` with multiplicities summing to at most 6,
/// pairwise further apart than `min_sep`.
pub fn random_factored<R: Rng>(rng: &mut R, min_sep: f64) -> Vec<(f64, u32)> {
    loop {
        let d = rng.random_range(1..=6u32);
        let mut left = d;
        let mut roots = Vec::new();
        while left > 0 {
            let m = rng.random_range(1..=left.min(3));
            roots.push((rng.random_range(-4.0..4.0f64), m));
            left -= m;
        }
        roots.sort_by(|a, b| a.0.total_cmp(&b.0));
        if roots.windows(2).all(|p| p[1].0 - p[0].0 > min_sep) {
            return roots;
        }
    }
}

pub fn expand(roots: &[(f64, u32)]) -> UniPoly {
    let flat: Vec<f64> = roots.iter().flat_map(|&(r, m)| std::iter::repeat_n(r, m as usize)).collect();
    UniPoly::from_roots(&flat)
}

/// Sparse polynomial in `dim` variables with total degree at most `max_degree`.
pub fn random_multi<R: Rng>(rng: &mut R, dim: usize, max_degree: u32) -> polyconc::poly::MultiPoly {
    let mut p = polyconc::poly::MultiPoly::zero(dim);
    for _ in 0..rng.random_range(1..=6) {
        let mut e = vec![0u32; dim];
        let total = rng.random_range(0..=max_degree);
        for _ in 0..total {
            e[rng.random_range(0..dim)] += 1;
        }
        p.add_term(e, rng.random_range(-2.0..2.0)).unwrap();
    }
    p
}

/// `Σ|c|·Π|x_i|^{e_i}`, the size of the terms summed by `eval`.
pub fn abs_eval(p: &polyconc::poly::MultiPoly, x: &[f64]) -> f64 {
    p.terms()
        .map(|(e, c)| c.abs() * e.iter().zip(x).map(|(&k, &xi)| xi.abs().powi(k as i32)).product::<f64>())
        .sum()
}

/// `Σ|c_k||t|^k`.
pub fn abs_horner(f: &UniPoly, t: f64) -> f64 {
    f.coeffs().iter().rev().fold(0.0, |acc, c| acc * t.abs() + c.abs())
}

/// Spread of `value(g)` over copies `g` of `f` whose coefficients are moved
/// by a few units in the last place: how much of any discrepancy the input
/// rounding alone can explain.
pub fn ulp_sensitivity(f: &UniPoly, value: impl Fn(&UniPoly) -> f64) -> f64 {
    let base = value(f);
    let mut rng = rng_for(0x5eed, f.coeffs().len() as u64);
    (0..4)
        .map(|_| {
            let g = UniPoly::new(f.coeffs().iter().map(|c| c * (1.0 + 4.0 * f64::EPSILON * rng.random_range(-1.0..1.0))).collect());
            (value(&g) - base).abs()
        })
        .fold(0.0, f64::max)
}
