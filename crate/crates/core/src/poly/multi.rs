use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{PolyError, UniPoly, MAX_DEGREE};

/// Sparse polynomial on ℝⁿ: exponent multi-index → coefficient.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MultiPolyRepr", into = "MultiPolyRepr")]
pub struct MultiPoly {
    dim: usize,
    terms: BTreeMap<Vec<u32>, f64>,
}

#[derive(Clone, Serialize, Deserialize)]
struct MultiPolyRepr {
    dim: usize,
    terms: Vec<TermRepr>,
}

#[derive(Clone, Serialize, Deserialize)]
struct TermRepr {
    exponents: Vec<u32>,
    coeff: f64,
}

impl TryFrom<MultiPolyRepr> for MultiPoly {
    type Error = PolyError;
    fn try_from(r: MultiPolyRepr) -> Result<Self, PolyError> {
        Self::from_terms(r.dim, r.terms.into_iter().map(|t| (t.exponents, t.coeff)))
    }
}

impl From<MultiPoly> for MultiPolyRepr {
    fn from(p: MultiPoly) -> Self {
        Self {
            dim: p.dim,
            terms: p
                .terms
                .into_iter()
                .map(|(exponents, coeff)| TermRepr { exponents, coeff })
                .collect(),
        }
    }
}

impl MultiPoly {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms(
        dim: usize,
        terms: impl IntoIterator<Item = (Vec<u32>, f64)>,
    ) -> Result<Self, PolyError> {
        let mut p = Self::zero(dim);
        for (e, c) in terms {
            p.add_term(e, c)?;
        }
        Ok(p)
    }

    /// The coordinate function `x_i` (0-based index).
    pub fn coordinate(dim: usize, i: usize) -> Self {
        let mut e = vec![0; dim];
        e[i] = 1;
        Self::from_terms(dim, [(e, 1.0)]).expect("valid coordinate")
    }

    pub fn add_term(&mut self, exponents: Vec<u32>, coeff: f64) -> Result<(), PolyError> {
        if exponents.len() != self.dim {
            return Err(PolyError::DimensionMismatch {
                expected: self.dim,
                got: exponents.len(),
            });
        }
        let entry = self.terms.entry(exponents).or_insert(0.0);
        *entry += coeff;
        self.terms.retain(|_, c| *c != 0.0);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], f64)> {
        self.terms.iter().map(|(e, &c)| (e.as_slice(), c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Maximal total degree.
    pub fn degree(&self) -> usize {
        self.terms
            .keys()
            .map(|e| e.iter().sum::<u32>() as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        self.terms
            .iter()
            .map(|(e, c)| c * e.iter().zip(x).map(|(&k, &xi)| xi.powi(k as i32)).product::<f64>())
            .sum()
    }

    pub fn try_eval(&self, x: &[f64]) -> Result<f64, PolyError> {
        self.check_dim(x.len())?;
        Ok(self.eval(x))
    }

    fn check_dim(&self, got: usize) -> Result<(), PolyError> {
        if got != self.dim {
            Err(PolyError::DimensionMismatch {
                expected: self.dim,
                got,
            })
        } else {
            Ok(())
        }
    }

    /// `∂f/∂x_i`.
    pub fn partial(&self, i: usize) -> Self {
        let mut out = Self::zero(self.dim);
        for (e, &c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[i] -= 1;
            *out.terms.entry(e2).or_insert(0.0) += c * e[i] as f64;
        }
        out.terms.retain(|_, c| *c != 0.0);
        out
    }

    /// `∂^α f(x)` for a multi-index `α`.
    fn mixed_partial_at(&self, alpha: &[u32], x: &[f64]) -> f64 {
        self.terms
            .iter()
            .filter(|(e, _)| e.iter().zip(alpha).all(|(ei, ai)| ei >= ai))
            .map(|(e, &c)| {
                let mut v = c;
                for ((&ei, &ai), &xi) in e.iter().zip(alpha).zip(x) {
                    // falling factorial e!/(e-a)!
                    for k in 0..ai {
                        v *= (ei - k) as f64;
                    }
                    v *= xi.powi((ei - ai) as i32);
                }
                v
            })
            .sum()
    }

    /// Frobenius norm of the m-th derivative tensor at `x`.
    ///
    /// Each multi-index `α` with `|α| = m` stands for `m!/α!` ordered index
    /// tuples of the tensor, all carrying the same partial derivative.
    pub fn dm_norm_at(&self, m: usize, x: &[f64]) -> Result<f64, PolyError> {
        self.check_dim(x.len())?;
        let d = self.degree();
        if m == 0 || m > d {
            return Err(PolyError::DerivativeOrder { m, degree: d });
        }
        let mut sum = 0.0;
        let mut alpha = vec![0u32; self.dim];
        for_each_multi_index(self.dim, m as u32, &mut alpha, 0, &mut |a| {
            let mult = factorial(m as u32) / a.iter().map(|&k| factorial(k)).product::<f64>();
            let v = self.mixed_partial_at(a, x);
            sum += mult * v * v;
        });
        Ok(sum.sqrt())
    }

    /// `g(t) = f(x + t(y − x))`, recovered by interpolation at `deg f + 1`
    /// Chebyshev nodes on `[0, 1]`.
    pub fn restrict_to_segment(&self, x: &[f64], y: &[f64]) -> Result<UniPoly, PolyError> {
        self.check_dim(x.len())?;
        self.check_dim(y.len())?;
        if x == y {
            return Err(PolyError::DegenerateSegment);
        }
        let d = self.degree();
        if d > MAX_DEGREE {
            return Err(PolyError::DegreeTooHigh { degree: d, max: MAX_DEGREE });
        }
        if d == 0 {
            return Ok(UniPoly::constant(self.eval(x)));
        }
        let n = d + 1;
        let theta: Vec<f64> = (0..n).map(|k| PI * (k as f64 + 0.5) / n as f64).collect();
        let vals: Vec<f64> = theta
            .iter()
            .map(|th| {
                let t = 0.5 * (1.0 + th.cos());
                let p: Vec<f64> = x.iter().zip(y).map(|(a, b)| a + t * (b - a)).collect();
                self.eval(&p)
            })
            .collect();
        // Chebyshev coefficients in u = 2t − 1
        let cheb: Vec<f64> = (0..n)
            .map(|j| {
                let s: f64 = vals
                    .iter()
                    .zip(&theta)
                    .map(|(v, th)| v * (j as f64 * th).cos())
                    .sum();
                let c = 2.0 * s / n as f64;
                if j == 0 {
                    0.5 * c
                } else {
                    c
                }
            })
            .collect();
        let u = UniPoly::new(vec![-1.0, 2.0]);
        let mut t_prev = UniPoly::constant(1.0);
        let mut t_cur = u.clone();
        let mut acc = t_prev.scale(cheb[0]);
        for (j, &c) in cheb.iter().enumerate().skip(1) {
            if j > 1 {
                let next = &(&u * &t_cur).scale(2.0) - &t_prev;
                t_prev = std::mem::replace(&mut t_cur, next);
            }
            acc = &acc + &t_cur.scale(c);
        }
        // interpolation residue in coefficients that vanish exactly
        let scale: f64 = vals.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
        let noise = 64.0 * f64::EPSILON * scale * (1u64 << d.min(20)) as f64;
        let cleaned = acc
            .coeffs()
            .iter()
            .map(|&c| if c.abs() <= noise { 0.0 } else { c })
            .collect();
        Ok(UniPoly::new(cleaned))
    }

    /// Parses expressions such as `3*x1^2*x2 - 0.5*x3 + 1` (1-based variables).
    pub fn parse(expr: &str, dim: Option<usize>) -> Result<Self, PolyError> {
        let bad = |msg: &str| PolyError::Parse(format!("{msg} in {expr:?}"));
        let s: String = expr.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(bad("empty expression"));
        }
        // split into signed terms
        let mut raw_terms: Vec<(f64, String)> = Vec::new();
        let mut cur = String::new();
        let mut sign = 1.0;
        for ch in s.chars() {
            if (ch == '+' || ch == '-') && !in_exponent(&cur) {
                if !cur.is_empty() {
                    raw_terms.push((sign, std::mem::take(&mut cur)));
                    sign = 1.0;
                }
                // consecutive signs compose
                if ch == '-' {
                    sign = -sign;
                }
            } else {
                cur.push(ch);
            }
        }
        if cur.is_empty() {
            return Err(bad("trailing operator"));
        }
        raw_terms.push((sign, cur));

        let mut parsed: Vec<(BTreeMap<usize, u32>, f64)> = Vec::new();
        let mut max_var = 0usize;
        for (sg, term) in raw_terms {
            let mut coeff = sg;
            let mut vars: BTreeMap<usize, u32> = BTreeMap::new();
            for factor in term.split('*') {
                if factor.is_empty() {
                    return Err(bad("empty factor"));
                }
                if let Some(rest) = factor.strip_prefix('x') {
                    let (idx, pow) = match rest.split_once('^') {
                        Some((i, p)) => (i, p.parse::<u32>().map_err(|_| bad("bad exponent"))?),
                        None => (rest, 1),
                    };
                    let idx: usize = idx.parse().map_err(|_| bad("bad variable index"))?;
                    if idx == 0 {
                        return Err(bad("variables are 1-based"));
                    }
                    max_var = max_var.max(idx);
                    *vars.entry(idx - 1).or_insert(0) += pow;
                } else {
                    let v: f64 = factor.parse().map_err(|_| bad("bad number"))?;
                    coeff *= v;
                }
            }
            parsed.push((vars, coeff));
        }
        let dim = match dim {
            Some(d) if d < max_var => {
                return Err(PolyError::DimensionMismatch { expected: d, got: max_var })
            }
            Some(d) => d,
            None => max_var.max(1),
        };
        let mut p = Self::zero(dim);
        for (vars, c) in parsed {
            let mut e = vec![0u32; dim];
            for (i, k) in vars {
                e[i] = k;
            }
            p.add_term(e, c)?;
        }
        Ok(p)
    }
}

// true when `cur` ends in the mantissa of a number like `2.5e`
fn in_exponent(cur: &str) -> bool {
    let factor = cur.rsplit('*').next().unwrap_or("");
    if factor.starts_with('x') {
        return false;
    }
    match factor.strip_suffix(['e', 'E']) {
        Some(m) => m.ends_with(|c: char| c.is_ascii_digit() || c == '.'),
        None => false,
    }
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

fn for_each_multi_index(
    dim: usize,
    remaining: u32,
    alpha: &mut Vec<u32>,
    pos: usize,
    visit: &mut dyn FnMut(&[u32]),
) {
    if pos + 1 == dim {
        alpha[pos] = remaining;
        visit(alpha);
        alpha[pos] = 0;
        return;
    }
    for k in 0..=remaining {
        alpha[pos] = k;
        for_each_multi_index(dim, remaining - k, alpha, pos + 1, visit);
    }
    alpha[pos] = 0;
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (e, c)) in self.terms.iter().rev().enumerate() {
            if n > 0 {
                write!(f, " {} ", if *c < 0.0 { '-' } else { '+' })?;
            } else if *c < 0.0 {
                write!(f, "-")?;
            }
            write!(f, "{}", c.abs())?;
            for (i, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => write!(f, "*x{}", i + 1)?,
                    _ => write!(f, "*x{}^{}", i + 1, k)?,
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x1x2() -> MultiPoly {
        MultiPoly::from_terms(2, [(vec![1, 1], 1.0)]).unwrap()
    }

    #[test]
    fn restrict_examples() {
        let g = x1x2().restrict_to_segment(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        assert_eq!(g.degree(), 2);
        for (c, e) in g.coeffs().iter().zip([0.0, 0.0, 1.0]) {
            assert!((c - e).abs() < 1e-14);
        }
        let f = MultiPoly::coordinate(2, 0);
        let g = f.restrict_to_segment(&[0.0, 0.0], &[2.0, 0.0]).unwrap();
        assert_eq!(g.degree(), 1);
        assert!((g.coeff(1) - 2.0).abs() < 1e-14 && g.coeff(0).abs() < 1e-14);
        // x1^2 + x2^2 from (1,0) to (0,1): expansion gives 2t^2 - 2t + 1
        let f = MultiPoly::parse("x1^2 + x2^2", None).unwrap();
        let g = f.restrict_to_segment(&[1.0, 0.0], &[0.0, 1.0]).unwrap();
        for (c, e) in g.coeffs().iter().zip([1.0, -2.0, 2.0]) {
            assert!((c - e).abs() < 1e-13, "{g}");
        }
    }

    #[test]
    fn restrict_errors() {
        let f = x1x2();
        assert!(matches!(
            f.restrict_to_segment(&[0.0], &[1.0, 1.0]),
            Err(PolyError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            f.restrict_to_segment(&[1.0, 1.0], &[1.0, 1.0]),
            Err(PolyError::DegenerateSegment)
        ));
        let big = MultiPoly::parse("x1^13", None).unwrap();
        assert!(matches!(
            big.restrict_to_segment(&[0.0], &[1.0]),
            Err(PolyError::DegreeTooHigh { .. })
        ));
    }

    #[test]
    fn dm_norm_examples() {
        let sq = MultiPoly::parse("x1^2", None).unwrap();
        assert_eq!(sq.dm_norm_at(2, &[0.7]).unwrap(), 2.0);
        assert_eq!(sq.dm_norm_at(1, &[3.0]).unwrap(), 6.0);
        assert!((x1x2().dm_norm_at(2, &[0.3, -1.0]).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert!(matches!(sq.dm_norm_at(3, &[1.0]), Err(PolyError::DerivativeOrder { .. })));
        assert!(matches!(sq.dm_norm_at(0, &[1.0]), Err(PolyError::DerivativeOrder { .. })));
    }

    #[test]
    fn parse_forms() {
        let p = MultiPoly::parse("3*x1^2*x2 - 0.5*x3 + 1", None).unwrap();
        assert_eq!(p.dim(), 3);
        assert_eq!(p.degree(), 3);
        assert!((p.eval(&[1.0, 2.0, 4.0]) - 5.0).abs() < 1e-15);
        let q = MultiPoly::parse("-x1^2-1", Some(2)).unwrap();
        assert_eq!(q.eval(&[2.0, 9.0]), -5.0);
        let r = MultiPoly::parse("1e-3*x1 + 2.5E+1", None).unwrap();
        assert!((r.eval(&[1000.0]) - 26.0).abs() < 1e-12);
        assert!(MultiPoly::parse("x1 +", None).is_err());
        assert!(MultiPoly::parse("x0", None).is_err());
        assert!(MultiPoly::parse("x3", Some(2)).is_err());
    }

    #[test]
    fn partial_derivative() {
        let p = MultiPoly::parse("x1^3*x2 + 2*x2", None).unwrap();
        let d1 = p.partial(0);
        assert_eq!(d1.eval(&[2.0, 1.0]), 12.0);
        let d2 = p.partial(1);
        assert_eq!(d2.eval(&[2.0, 5.0]), 10.0);
    }
}
