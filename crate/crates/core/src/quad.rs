//! Panel Gauss–Legendre quadrature against a weight, for integrands with
//! integrable singularities at known points (`ln|t − r|`, `|t − r|^q`).

use crate::poly::{real_roots, PolyError, UniPoly, ROOT_TOL};
use crate::weights::Weight;

/// Initial total panel count.
pub const BASE_PANELS: usize = 10_000;
/// Relative change between successive refinements that ends the doubling.
pub const REFINE_RTOL: f64 = 1e-8;
const MAX_DOUBLINGS: usize = 6;
const MIN_PIECE_PANELS: usize = 64;

const GL_NODES: [f64; 4] = [
    -0.861_136_311_594_052_6,
    -0.339_981_043_584_856_3,
    0.339_981_043_584_856_3,
    0.861_136_311_594_052_6,
];
const GL_WEIGHTS: [f64; 4] = [
    0.347_854_845_137_453_8,
    0.652_145_154_862_546_2,
    0.652_145_154_862_546_2,
    0.347_854_845_137_453_8,
];

/// `f = lead · ∏ (t − r_i)^{m_i} · rest`, `rest` without real roots.
#[derive(Debug, Clone)]
pub struct Factored {
    pub lead: f64,
    pub roots: Vec<(f64, u32)>,
    pub rest: UniPoly,
}

impl Factored {
    pub fn new(f: &UniPoly) -> Result<Self, PolyError> {
        if f.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        let lead = f.leading();
        if f.degree() == 0 {
            return Ok(Self { lead, roots: Vec::new(), rest: UniPoly::constant(1.0) });
        }
        let rl = real_roots(f, f64::NEG_INFINITY, f64::INFINITY, ROOT_TOL)?;
        let mut rest = f.scale(1.0 / lead);
        for (r, m) in rl.iter() {
            for _ in 0..m {
                rest = rest.div_rem(&UniPoly::new(vec![-r, 1.0])).0;
            }
        }
        Ok(Self { lead, roots: rl.iter().collect(), rest })
    }

    pub fn ln_abs(&self, t: f64) -> f64 {
        let mut s = self.lead.abs().ln();
        for &(r, m) in &self.roots {
            s += m as f64 * (t - r).abs().ln();
        }
        if self.rest.degree() > 0 {
            s += self.rest.eval(t).abs().ln();
        }
        s
    }
}

/// Weighted average `∫ g dw / ∫ dw` over `[lo, hi]` (finite), computed with
/// the same nodes for numerator and denominator. `singular` lists points
/// where `g` may blow up or lose smoothness.
pub fn weighted_average<G: Fn(f64) -> f64>(w: &Weight, lo: f64, hi: f64, singular: &[f64], g: G) -> f64 {
    let mut breaks: Vec<f64> = singular.iter().copied().filter(|&s| s > lo && s < hi).collect();
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let is_sing = |x: f64| singular.contains(&x);

    // pieces with at most one singular end, the singular end first
    let mut pieces: Vec<(f64, f64, bool)> = Vec::new();
    let mut pts = vec![lo];
    pts.extend(&breaks);
    pts.push(hi);
    for p in pts.windows(2) {
        let (a, b) = (p[0], p[1]);
        if b <= a {
            continue;
        }
        match (is_sing(a), is_sing(b)) {
            (true, true) => {
                let m = 0.5 * (a + b);
                pieces.push((a, m, true));
                pieces.push((b, m, true));
            }
            (true, false) => pieces.push((a, b, true)),
            (false, true) => pieces.push((b, a, true)),
            (false, false) => pieces.push((a, b, false)),
        }
    }
    let total: f64 = pieces.iter().map(|p| (p.1 - p.0).abs()).sum();
    let eval = |panels: usize| -> (f64, f64) {
        let mut num = 0.0;
        let mut den = 0.0;
        for &(s, e, sing) in &pieces {
            let share = ((panels as f64) * (e - s).abs() / total).ceil() as usize;
            let n = share.max(MIN_PIECE_PANELS);
            let (pn, pd) = piece(w, s, e, sing, n, &g);
            num += pn;
            den += pd;
        }
        (num, den)
    };
    let (n0, d0) = eval(BASE_PANELS);
    let mut prev = n0 / d0;
    let mut panels = BASE_PANELS;
    for _ in 0..MAX_DOUBLINGS {
        panels *= 2;
        let (n1, d1) = eval(panels);
        let cur = n1 / d1;
        if (cur - prev).abs() <= REFINE_RTOL * cur.abs().max(f64::MIN_POSITIVE) {
            return cur;
        }
        prev = cur;
    }
    prev
}

// one piece from `s` to `e`; with a singular start, t = s + (e − s)·x³
fn piece<G: Fn(f64) -> f64>(w: &Weight, s: f64, e: f64, sing: bool, n: usize, g: &G) -> (f64, f64) {
    let h = 1.0 / n as f64;
    let len = e - s;
    let mut num = 0.0;
    let mut den = 0.0;
    for k in 0..n {
        let c = (k as f64 + 0.5) * h;
        for (x0, wt) in GL_NODES.iter().zip(GL_WEIGHTS) {
            let x = c + 0.5 * h * x0;
            let (t, jac) = if sing {
                (s + len * x * x * x, 3.0 * len * x * x)
            } else {
                (s + len * x, len)
            };
            let d = w.density(t) * jac.abs() * wt * 0.5 * h;
            num += g(t) * d;
            den += d;
        }
    }
    (num, den)
}

/// Finite integration range for `w`: the domain, cut at the truncation point
/// for polynomial growth of degree `degree` when unbounded.
pub fn finite_range(w: &Weight, degree: usize) -> (f64, f64) {
    let hi = if w.hi().is_finite() { w.hi() } else { w.truncation_point(degree).expect("unbounded domain") };
    (w.lo(), hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factored_log_matches_direct() {
        let f = &UniPoly::from_roots(&[-1.0, -1.0, 2.5]) * &UniPoly::new(vec![1.0, 0.0, 1.0]);
        let fac = Factored::new(&f.scale(-3.0)).unwrap();
        assert_eq!(fac.roots.len(), 2);
        for &t in &[-3.0, 0.0, 0.7, 4.0] {
            let direct = (3.0 * f.eval(t)).abs().ln();
            assert!((fac.ln_abs(t) - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn log_average_on_unit_interval() {
        // ∫_0^1 ln t dt = −1 and ∫_0^1 ln|t − 1/2| dt = −1 − ln 2
        let w = Weight::uniform(0.0, 1.0).unwrap();
        let v = weighted_average(&w, 0.0, 1.0, &[0.0], |t| t.ln());
        assert!((v + 1.0).abs() < 1e-9);
        let v = weighted_average(&w, 0.0, 1.0, &[0.5], |t| (t - 0.5).abs().ln());
        assert!((v + 1.0 + 2f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn fractional_power_under_exponential() {
        // ∫ t^{1/2} e^{−t} dt = Γ(3/2) = √π / 2
        let w = Weight::exponential();
        let (lo, hi) = finite_range(&w, 2);
        let v = weighted_average(&w, lo, hi, &[0.0], |t| t.sqrt());
        assert!((v - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-9);
    }
}
