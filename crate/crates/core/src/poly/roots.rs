//! Real root isolation for univariate polynomials.
//!
//! Roots are isolated with floating-point Sturm sequences and refined by
//! bisection. A root of multiplicity `k > 1` is located as a simple root of
//! the `(k-1)`-th derivative, so multiple roots come out at full precision
//! instead of the `eps^(1/k)` that bisection on `f` itself would give.
//! Whenever a Sturm count is ambiguous or inconsistent the whole search
//! falls back to a dense sign scan between the critical points of `f`.

use serde::{Deserialize, Serialize};

use super::{PolyError, UniPoly};

/// Panels used by the sign-scan fallback.
pub const SCAN_PANELS: usize = 1 << 16;

/// Remainders below this fraction of the dividend's scale end the Sturm chain.
pub const STURM_GUARD: f64 = 1e-9;

/// Real roots in ascending order with their multiplicities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootList {
    pub roots: Vec<f64>,
    pub multiplicities: Vec<u32>,
    pub tol: f64,
}

impl RootList {
    fn from_pairs(mut pairs: Vec<(f64, u32)>, tol: f64) -> Self {
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut roots: Vec<f64> = Vec::with_capacity(pairs.len());
        let mut multiplicities: Vec<u32> = Vec::with_capacity(pairs.len());
        for (r, m) in pairs {
            if let Some(&last) = roots.last() {
                if r <= last {
                    // coincident report of the same root: keep the larger multiplicity
                    let lm = multiplicities.last_mut().unwrap();
                    *lm = (*lm).max(m);
                    continue;
                }
            }
            roots.push(r);
            multiplicities.push(m);
        }
        Self {
            roots,
            multiplicities,
            tol,
        }
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, u32)> + '_ {
        self.roots.iter().copied().zip(self.multiplicities.iter().copied())
    }

    pub fn total_multiplicity(&self) -> u32 {
        self.multiplicities.iter().sum()
    }
}

/// All real roots of `f` in `[lo, hi]` (infinite endpoints allowed), each
/// located to within `tol`.
pub fn real_roots(f: &UniPoly, lo: f64, hi: f64, tol: f64) -> Result<RootList, PolyError> {
    check_args(f, lo, hi, tol)?;
    Ok(RootList::from_pairs(find_roots(f, lo, hi, tol, false), tol))
}

/// Same contract as [`real_roots`] but always uses the sign-scan fallback.
pub fn real_roots_scan(f: &UniPoly, lo: f64, hi: f64, tol: f64) -> Result<RootList, PolyError> {
    check_args(f, lo, hi, tol)?;
    Ok(RootList::from_pairs(find_roots(f, lo, hi, tol, true), tol))
}

fn check_args(f: &UniPoly, lo: f64, hi: f64, tol: f64) -> Result<(), PolyError> {
    if f.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    if lo.is_nan() || hi.is_nan() || lo > hi {
        return Err(PolyError::InvalidInterval { lo, hi });
    }
    if !(tol > 0.0) {
        return Err(PolyError::InvalidTolerance(tol));
    }
    Ok(())
}

/// Every real root lies strictly inside `(-B, B)`.
pub fn cauchy_bound(f: &UniPoly) -> f64 {
    let lead = f.leading().abs();
    let c = f.coeffs();
    1.0 + c[..c.len().saturating_sub(1)]
        .iter()
        .fold(0.0_f64, |m, a| m.max(a.abs() / lead))
}

/// Threshold on `|f(r)|` below which a critical point `r` counts as a
/// multiple root: a small multiple of the change in `f(r)` caused by
/// rounding the coefficients. Compensated evaluation keeps the evaluation
/// error well below this.
fn zero_threshold(f: &UniPoly, r: f64) -> f64 {
    let mag: f64 = f
        .coeffs()
        .iter()
        .rev()
        .fold(0.0, |acc, c| acc * r.abs() + c.abs());
    4.0 * f64::EPSILON * mag
}

fn sign(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

fn find_roots(f: &UniPoly, lo: f64, hi: f64, tol: f64, force_scan: bool) -> Vec<(f64, u32)> {
    match f.degree() {
        0 => return Vec::new(),
        1 => {
            let r = -f.coeff(0) / f.coeff(1);
            return if r >= lo && r <= hi { vec![(r, 1)] } else { Vec::new() };
        }
        _ => {}
    }
    let bound = cauchy_bound(f);
    let a = lo.max(-bound);
    let b = hi.min(bound);
    if a > b {
        return Vec::new();
    }
    let pad = tol * a.abs().max(b.abs()).max(1.0);
    let (wa, wb) = (a - pad, b + pad);
    // Sturm chains are built in u ∈ [−1, 1], t = m + h·u, for conditioning;
    // the derivative-chain scan stays on f so that its zero tests use the
    // rounding level of f itself
    let m = 0.5 * (wa + wb);
    let h = 0.5 * (wb - wa);
    let found = if force_scan {
        scan_roots(f, wa, wb, SCAN_PANELS)
    } else {
        let chain = scan_roots(f, wa, wb, 0);
        let g = f.compose_affine(m, h);
        match sturm_roots(&g, -1.0, 1.0, tol / h) {
            // the chain roots were located on f itself, so they are kept
            Some(s) if same_structure(&s, &chain) => chain,
            _ => scan_roots(f, wa, wb, SCAN_PANELS),
        }
    };
    let gaps: Vec<f64> = (0..found.len())
        .map(|i| {
            let left = if i > 0 { found[i].0 - found[i - 1].0 } else { f64::INFINITY };
            let right = found.get(i + 1).map_or(f64::INFINITY, |n| n.0 - found[i].0);
            0.5 * left.min(right).min(h)
        })
        .collect();
    found
        .into_iter()
        .zip(gaps)
        .map(|((r, k), reach)| (polish(f, r, k, reach), k))
        .filter(|&(r, _)| r >= lo - pad && r <= hi + pad)
        .map(|(r, k)| (r.clamp(lo, hi), k))
        .collect()
}

fn same_structure(a: &[(f64, u32)], b: &[(f64, u32)]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.1 == y.1)
}

/// Re-brackets a root on the original polynomial (or its derivative for a
/// multiple root) and bisects there; the bracket grows geometrically but
/// never past `reach`, half the distance to the neighbouring roots.
fn polish(f: &UniPoly, r: f64, mult: u32, reach: f64) -> f64 {
    let p = f.nth_derivative(mult as usize - 1);
    let v = p.eval_compensated(r);
    if v == 0.0 {
        return r;
    }
    let mut delta = 4.0 * f64::EPSILON * r.abs().max(1.0);
    while delta <= reach {
        let (a, b) = (r - delta, r + delta);
        let (sa, sb) = (sign(p.eval_compensated(a)), sign(p.eval_compensated(b)));
        if sa != 0 && sb != 0 && sa != sb {
            return bisect(&p, a, b);
        }
        delta *= 4.0;
    }
    r
}

/// Bisection on a strict sign change, run to machine precision.
fn bisect(f: &UniPoly, mut a: f64, mut b: f64) -> f64 {
    let mut sa = sign(f.eval_compensated(a));
    loop {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let sm = sign(f.eval_compensated(m));
        if sm == 0 {
            return m;
        }
        if sm == sa {
            a = m;
            sa = sm;
        } else {
            b = m;
        }
    }
    if f.eval_compensated(a).abs() <= f.eval_compensated(b).abs() {
        a
    } else {
        b
    }
}

struct SturmChain {
    seq: Vec<UniPoly>,
}

impl SturmChain {
    fn build(f: &UniPoly) -> Option<Self> {
        let mut seq = vec![f.normalized(), f.derivative().normalized()];
        loop {
            let n = seq.len();
            if seq[n - 1].degree() == 0 {
                break;
            }
            let (_, r) = seq[n - 2].div_rem(&seq[n - 1]);
            let scale = seq[n - 2].max_abs_coeff().max(seq[n - 1].max_abs_coeff());
            let rmax = r.max_abs_coeff();
            if rmax <= STURM_GUARD * scale {
                // remainder is rounding noise: seq[n-1] is the gcd of f and f'
                break;
            }
            // drop leading coefficients that are rounding residue
            let mut c = r.coeffs().to_vec();
            while c.len() > 1 && c.last().unwrap().abs() <= 1e-13 * rmax {
                c.pop();
            }
            let next = (-&UniPoly::new(c)).normalized();
            if next.is_zero() {
                return None;
            }
            seq.push(next);
            if seq.len() > f.degree() + 2 {
                return None;
            }
        }
        Some(Self { seq })
    }

    /// Sign variations at `x`, or `None` when some member is too close to zero
    /// to trust its sign.
    fn variations(&self, x: f64) -> Option<i64> {
        let mut count = 0;
        let mut last = 0i8;
        for p in &self.seq {
            let v = p.eval_compensated(x);
            let mag: f64 = p
                .coeffs()
                .iter()
                .enumerate()
                .map(|(k, c)| c.abs() * x.abs().powi(k as i32))
                .sum();
            if v.abs() <= 64.0 * f64::EPSILON * mag {
                return None;
            }
            let s = sign(v);
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
        Some(count)
    }

    /// Variations at a point near `x` inside `(lo, hi)` whose signs are trustworthy.
    fn variations_near(&self, x: f64, lo: f64, hi: f64) -> Option<(f64, i64)> {
        const OFFSETS: [f64; 7] = [0.0, 0.0371, -0.0529, 0.113, -0.137, 0.211, -0.241];
        let w = hi - lo;
        OFFSETS.iter().find_map(|&o| {
            let y = x + o * w;
            if y <= lo || y >= hi {
                return None;
            }
            self.variations(y).map(|v| (y, v))
        })
    }

    fn variations_at_end(&self, x: f64, outward: f64) -> Option<(f64, i64)> {
        let step = outward * f64::EPSILON * x.abs().max(1.0);
        (0..8).find_map(|i| {
            let y = x + step * (1u64 << (4 * i)) as f64;
            self.variations(y).map(|v| (y, v))
        })
    }
}

fn sturm_roots(f: &UniPoly, a: f64, b: f64, tol: f64) -> Option<Vec<(f64, u32)>> {
    let chain = SturmChain::build(f)?;
    let (a, va) = chain.variations_at_end(a, -1.0)?;
    let (b, vb) = chain.variations_at_end(b, 1.0)?;
    let total = va - vb;
    if total < 0 || total as usize > f.degree() {
        return None;
    }
    let mut intervals = Vec::new();
    let min_width = 1e-2 * tol * a.abs().max(b.abs()).max(1.0);
    isolate(&chain, a, b, va, vb, min_width, 0, &mut intervals)?;
    let mut out = Vec::with_capacity(intervals.len());
    for (lo, hi) in intervals {
        out.push(locate_single(f, lo, hi)?);
    }
    if out.len() as i64 != total {
        return None;
    }
    Some(out)
}

#[allow(clippy::too_many_arguments)]
fn isolate(
    chain: &SturmChain,
    a: f64,
    b: f64,
    va: i64,
    vb: i64,
    min_width: f64,
    depth: usize,
    out: &mut Vec<(f64, f64)>,
) -> Option<()> {
    let n = va - vb;
    if n < 0 {
        return None;
    }
    if n == 0 {
        return Some(());
    }
    if n == 1 {
        out.push((a, b));
        return Some(());
    }
    if b - a <= min_width || depth > 200 {
        // distinct roots closer than the tolerance cannot be told apart
        return None;
    }
    let (m, vm) = chain.variations_near(0.5 * (a + b), a, b)?;
    isolate(chain, a, m, va, vm, min_width, depth + 1, out)?;
    isolate(chain, m, b, vm, vb, min_width, depth + 1, out)
}

/// Locates the single distinct root of `f` in `(a, b]`.
fn locate_single(f: &UniPoly, a: f64, b: f64) -> Option<(f64, u32)> {
    if f.degree() >= 2 {
        let df = f.derivative();
        let crit = scan_roots(&df, a, b, 0);
        let best = crit
            .into_iter()
            .filter(|&(c, _)| f.eval_compensated(c).abs() <= zero_threshold(f, c))
            .min_by(|x, y| f.eval_compensated(x.0).abs().total_cmp(&f.eval_compensated(y.0).abs()));
        if let Some((c, m)) = best {
            return Some((c, m + 1));
        }
    }
    let (sa, sb) = (sign(f.eval_compensated(a)), sign(f.eval_compensated(b)));
    if sb == 0 {
        return Some((b, 1));
    }
    if sa != 0 && sa != sb {
        return Some((bisect(f, a, b), 1));
    }
    None
}

/// Roots between consecutive critical points, where `f` is monotone, plus
/// critical points at which `f` vanishes to rounding accuracy. With
/// `panels > 0` the sign is also sampled on a uniform grid, which guards
/// against critical points lost to rounding.
fn scan_roots(f: &UniPoly, a: f64, b: f64, panels: usize) -> Vec<(f64, u32)> {
    match f.degree() {
        0 => return Vec::new(),
        1 => {
            let r = -f.coeff(0) / f.coeff(1);
            return if r >= a && r <= b { vec![(r, 1)] } else { Vec::new() };
        }
        _ => {}
    }
    let crit = scan_roots(&f.derivative(), a, b, panels);
    let mut out: Vec<(f64, u32)> = crit
        .iter()
        .filter(|&&(c, _)| f.eval_compensated(c).abs() <= zero_threshold(f, c))
        .map(|&(c, m)| (c, m + 1))
        .collect();
    let multiple: Vec<f64> = out.iter().map(|p| p.0).collect();

    let mut pts: Vec<f64> = (0..=panels.max(1))
        .map(|i| a + (b - a) * i as f64 / panels.max(1) as f64)
        .chain(crit.iter().map(|p| p.0))
        .collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let vals: Vec<f64> = pts.iter().map(|&x| f.eval_compensated(x)).collect();
    for i in 0..pts.len() {
        if vals[i] == 0.0 && !multiple.contains(&pts[i]) {
            out.push((pts[i], 1));
        }
        if i + 1 == pts.len() {
            break;
        }
        let (s0, s1) = (sign(vals[i]), sign(vals[i + 1]));
        if s0 == 0 || s1 == 0 || s0 == s1 {
            continue;
        }
        // odd-multiplicity roots also change sign; they are already recorded
        if multiple.contains(&pts[i]) || multiple.contains(&pts[i + 1]) {
            continue;
        }
        out.push((bisect(f, pts[i], pts[i + 1]), 1));
    }
    out.sort_by(|x, y| x.0.total_cmp(&y.0));
    merge_clusters(f, out)
}

/// Radius within which the roots of a `k`-fold cluster at `c` cannot be told
/// apart: `(δ·k!/|f⁽ᵏ⁾(c)|)^{1/k}` with `δ` the rounding threshold of `f`.
fn cluster_radius(f: &UniPoly, c: f64, k: u32) -> f64 {
    let dk = f.nth_derivative(k as usize).eval_compensated(c).abs();
    let fact: f64 = (1..=k).map(f64::from).product();
    (zero_threshold(f, c) * fact / dk).powf(1.0 / f64::from(k))
}

/// Order of the first derivative of `f` that is not negligible at `c`.
fn vanishing_order(f: &UniPoly, c: f64) -> u32 {
    let mut p = f.clone();
    let mut k = 0;
    while p.degree() > 0 && p.eval_compensated(c).abs() <= zero_threshold(&p, c) {
        p = p.derivative();
        k += 1;
    }
    k
}

/// Collapses candidates that fall inside one numerically indistinguishable
/// cluster into a single multiple root, so that the multiplicities never
/// exceed what the coefficients can resolve.
fn merge_clusters(f: &UniPoly, cands: Vec<(f64, u32)>) -> Vec<(f64, u32)> {
    let mut out: Vec<(f64, u32, f64)> = Vec::with_capacity(cands.len());
    for (c, k) in cands {
        let rad = if k > 1 { cluster_radius(f, c, k) } else { 0.0 };
        if let Some(last) = out.last_mut() {
            if c - last.0 <= last.2.max(rad) {
                // keep the deeper of the two and re-derive its order
                let keep = if k > last.1 || (k == last.1 && f.eval_compensated(c).abs() < f.eval_compensated(last.0).abs()) { c } else { last.0 };
                let order = vanishing_order(f, keep).max(k.max(last.1));
                *last = (keep, order, cluster_radius(f, keep, order).max(last.2).max(rad));
                continue;
            }
        }
        out.push((c, k, rad));
    }
    out.into_iter().map(|(c, k, _)| (c, k)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(list: &RootList, expected: &[(f64, u32)]) {
        assert_eq!(list.len(), expected.len(), "{list:?} vs {expected:?}");
        for ((r, m), &(er, em)) in list.iter().zip(expected) {
            assert!((r - er).abs() <= 1e-10, "{r} vs {er}");
            assert_eq!(m, em);
        }
    }

    #[test]
    fn simple_pair() {
        let f = UniPoly::new(vec![-1.0, 0.0, 1.0]);
        check(&real_roots(&f, -2.0, 2.0, 1e-10).unwrap(), &[(-1.0, 1), (1.0, 1)]);
    }

    #[test]
    fn double_root() {
        let f = UniPoly::from_roots(&[-1.0, -1.0, 3.0]);
        check(&real_roots(&f, -5.0, 5.0, 1e-10).unwrap(), &[(-1.0, 2), (3.0, 1)]);
        check(&real_roots_scan(&f, -5.0, 5.0, 1e-10).unwrap(), &[(-1.0, 2), (3.0, 1)]);
    }

    #[test]
    fn no_real_roots() {
        let f = UniPoly::new(vec![1.0, 0.0, 1.0]);
        assert!(real_roots(&f, -10.0, 10.0, 1e-10).unwrap().is_empty());
    }

    #[test]
    fn zero_polynomial_is_rejected() {
        assert!(matches!(
            real_roots(&UniPoly::zero(), 0.0, 1.0, 1e-10),
            Err(PolyError::ZeroPolynomial)
        ));
    }

    #[test]
    fn triple_and_quadruple_roots() {
        let f = UniPoly::from_roots(&[0.5, 0.5, 0.5, -2.0, -2.0, -2.0]);
        check(&real_roots(&f, -5.0, 5.0, 1e-10).unwrap(), &[(-2.0, 3), (0.5, 3)]);
        let g = UniPoly::from_roots(&[1.25, 1.25, 1.25, 1.25, -0.5]);
        check(&real_roots(&g, -5.0, 5.0, 1e-10).unwrap(), &[(-0.5, 1), (1.25, 4)]);
    }

    #[test]
    fn roots_on_domain_boundary_are_kept() {
        let f = UniPoly::from_roots(&[0.0, 1.0, 3.0]);
        check(&real_roots(&f, 0.0, 1.0, 1e-10).unwrap(), &[(0.0, 1), (1.0, 1)]);
    }

    #[test]
    fn infinite_domain() {
        let f = UniPoly::from_roots(&[-7.0, 2.0, 40.0]);
        check(
            &real_roots(&f, 0.0, f64::INFINITY, 1e-10).unwrap(),
            &[(2.0, 1), (40.0, 1)],
        );
    }
}
