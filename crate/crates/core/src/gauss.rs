//! Gaussian-measure experiments: exact moments of quadratic forms, Monte
//! Carlo small-ball and tail estimates, derivative norms, and the mean
//! small-ball product under several sampling measures.

use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::body::{hit_and_run, BodyError, ChainConfig, ConvexBody};
use crate::poly::{MultiPoly, PolyError};
use crate::report::{IneqReport, IneqTag};
use crate::samples::{draw, influence_stderr, map_sample_blocks, MCEstimate, Moments, ProductExponential, SampleBlock, StdGaussian};

/// Samples used to estimate `m_f` and `σ_f` when no exact formula applies.
pub const PILOT_SAMPLES: usize = 100_000;
// pilot draws use a derived seed, independent of the main run
const PILOT_STREAM: u64 = 1 << 40;
/// Exceedance counts below this are flagged in tail tables.
pub const TAIL_MIN_HITS: usize = 10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GaussError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Body(#[from] BodyError),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("σ_f is indistinguishable from 0")]
    ZeroSigma,
    #[error("polynomial degree {0} exceeds 2")]
    NotQuadratic(usize),
    #[error("eps = {eps} is not below the estimated mean deviation {alpha} (stderr {stderr})")]
    EpsTooLarge { eps: f64, alpha: f64, stderr: f64 },
}

/// `xᵀAx + b·x + c` with symmetric `A`, kept as its upper triangle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "QuadFormRepr", into = "QuadFormRepr")]
pub struct QuadForm {
    n: usize,
    // row-major upper triangle, (i, j) with i ≤ j
    upper: Vec<f64>,
    b: Vec<f64>,
    c: f64,
}

#[derive(Serialize, Deserialize)]
struct QuadFormRepr {
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    c: f64,
}

impl TryFrom<QuadFormRepr> for QuadForm {
    type Error = GaussError;
    fn try_from(r: QuadFormRepr) -> Result<Self, GaussError> {
        QuadForm::new(&r.a, r.b, r.c)
    }
}

impl From<QuadForm> for QuadFormRepr {
    fn from(q: QuadForm) -> Self {
        let a = (0..q.n).map(|i| (0..q.n).map(|j| q.a(i, j)).collect()).collect();
        Self { a, b: q.b, c: q.c }
    }
}

fn upper_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * n - i * (i + 1) / 2 + j
}

impl QuadForm {
    /// `a` must be square, match `b`, and be exactly symmetric.
    pub fn new(a: &[Vec<f64>], b: Vec<f64>, c: f64) -> Result<Self, GaussError> {
        let n = b.len();
        if n == 0 || a.len() != n || a.iter().any(|r| r.len() != n) {
            return Err(GaussError::InvalidArgument("A must be n×n with n = len(b) ≥ 1".into()));
        }
        let mut upper = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in i..n {
                if a[i][j] != a[j][i] {
                    return Err(GaussError::InvalidArgument(format!("A is not symmetric at ({i}, {j})")));
                }
                upper.push(a[i][j]);
            }
        }
        Ok(Self { n, upper, b, c })
    }

    pub fn linear(b: Vec<f64>, c: f64) -> Self {
        let n = b.len();
        Self { n, upper: vec![0.0; n * (n + 1) / 2], b, c }
    }

    /// The quadratic form of a polynomial of degree at most 2.
    pub fn from_poly(f: &MultiPoly) -> Result<Self, GaussError> {
        if f.degree() > 2 {
            return Err(GaussError::NotQuadratic(f.degree()));
        }
        let n = f.dim();
        let mut q = Self::linear(vec![0.0; n], 0.0);
        for (e, coeff) in f.terms() {
            let idx: Vec<usize> = e.iter().enumerate().filter(|p| *p.1 > 0).map(|p| p.0).collect();
            match (idx.as_slice(), e.iter().sum::<u32>()) {
                ([], _) => q.c += coeff,
                ([i], 1) => q.b[*i] += coeff,
                ([i], _) => q.upper[upper_index(n, *i, *i)] += coeff,
                ([i, j], _) => q.upper[upper_index(n, *i, *j)] += 0.5 * coeff,
                _ => unreachable!("degree ≤ 2"),
            }
        }
        Ok(q)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn a(&self, i: usize, j: usize) -> f64 {
        self.upper[upper_index(self.n, i, j)]
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut v = self.c;
        for i in 0..self.n {
            v += self.b[i] * x[i] + self.a(i, i) * x[i] * x[i];
            for j in i + 1..self.n {
                v += 2.0 * self.a(i, j) * x[i] * x[j];
            }
        }
        v
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.a(i, i)).sum()
    }

    pub fn frobenius_sq(&self) -> f64 {
        (0..self.n).flat_map(|i| (0..self.n).map(move |j| (i, j))).map(|(i, j)| self.a(i, j).powi(2)).sum()
    }

    /// Exact `(mean, variance)` of `q(X)` for standard Gaussian `X`:
    /// `tr A + c` and `2‖A‖_F² + |b|²`.
    pub fn stats(&self) -> (f64, f64) {
        let b2: f64 = self.b.iter().map(|x| x * x).sum();
        (self.trace() + self.c, 2.0 * self.frobenius_sq() + b2)
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        Self {
            n: self.n,
            upper: self.upper.iter().map(|x| lambda * x).collect(),
            b: self.b.iter().map(|x| lambda * x).collect(),
            c: lambda * self.c,
        }
    }

    pub fn to_poly(&self) -> MultiPoly {
        let mut f = MultiPoly::zero(self.n);
        let unit = |i: usize, k: u32| {
            let mut e = vec![0u32; self.n];
            e[i] += k;
            e
        };
        let _ = f.add_term(vec![0; self.n], self.c);
        for i in 0..self.n {
            let _ = f.add_term(unit(i, 1), self.b[i]);
            let _ = f.add_term(unit(i, 2), self.a(i, i));
            for j in i + 1..self.n {
                let mut e = unit(i, 1);
                e[j] = 1;
                let _ = f.add_term(e, 2.0 * self.a(i, j));
            }
        }
        f
    }
}

/// `n × N` standard Gaussian block from blocks of streams `(seed, block)`.
pub fn gaussian_sample(dim: usize, n: usize, seed: u64) -> Result<SampleBlock, GaussError> {
    if dim == 0 || n == 0 {
        return Err(GaussError::InvalidArgument("dimension and sample count must be positive".into()));
    }
    Ok(draw(&StdGaussian(dim), n, seed))
}

/// Mean and standard deviation of `f(X)`, exact for degree ≤ 2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussMoments {
    pub mean: f64,
    pub sigma: f64,
    pub exact: bool,
    pub mean_stderr: f64,
    pub sigma_stderr: f64,
}

pub fn gauss_moments(f: &MultiPoly, seed: u64) -> Result<GaussMoments, GaussError> {
    if f.degree() <= 2 {
        let (mean, var) = QuadForm::from_poly(f)?.stats();
        if !(var > 0.0) {
            return Err(GaussError::ZeroSigma);
        }
        return Ok(GaussMoments { mean, sigma: var.sqrt(), exact: true, mean_stderr: 0.0, sigma_stderr: 0.0 });
    }
    let vals: Vec<f64> = draw(&StdGaussian(f.dim()), PILOT_SAMPLES, seed ^ PILOT_STREAM)
        .rows()
        .map(|x| f.eval(x))
        .collect();
    let m: Moments = vals.iter().copied().collect();
    let (mean, var) = (m.mean(), m.variance());
    let sigma = var.sqrt();
    // var(s) ≈ (μ₄ − σ⁴) / (4σ²N)
    let mu4 = vals.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / vals.len() as f64;
    let sigma_stderr = ((mu4 - var * var).max(0.0) / (4.0 * var * vals.len() as f64)).sqrt();
    if !(sigma > 3.0 * sigma_stderr) {
        return Err(GaussError::ZeroSigma);
    }
    Ok(GaussMoments { mean, sigma, exact: false, mean_stderr: m.stderr(), sigma_stderr })
}

/// Small-ball estimate together with the moments it was centered on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmallBall {
    pub s: f64,
    pub estimate: MCEstimate,
    pub moments: GaussMoments,
}

fn check_s(s: f64) -> Result<(), GaussError> {
    if !(s > 0.0 && s <= 0.5) {
        return Err(GaussError::InvalidArgument(format!("s must lie in (0, 1/2], got {s}")));
    }
    Ok(())
}

// per block: hits of |f − m| ≤ σ s for each s, and hits of the band
// σ s ± δ used to fold pilot uncertainty into the stderr
fn band_counts(f: &MultiPoly, mo: &GaussMoments, s_list: &[f64], n: usize, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let k = s_list.len();
    let parts = map_sample_blocks(&StdGaussian(f.dim()), n, seed, |blk| {
        let mut hits = vec![0usize; 2 * k];
        for x in blk.rows() {
            let dev = (f.eval(x) - mo.mean).abs();
            for (j, &s) in s_list.iter().enumerate() {
                let w = mo.sigma * s;
                let delta = (mo.mean_stderr.powi(2) + (s * mo.sigma_stderr).powi(2)).sqrt();
                hits[j] += usize::from(dev <= w);
                hits[k + j] += usize::from(dev > w - delta && dev <= w + delta);
            }
        }
        hits
    });
    let mut total = vec![0usize; 2 * k];
    for p in parts {
        total.iter_mut().zip(p).for_each(|(t, h)| *t += h);
    }
    (total[..k].to_vec(), total[k..].to_vec())
}

fn fold(hits: usize, band: usize, n: usize, seed: u64, exact: bool) -> MCEstimate {
    let mut e = MCEstimate::frequency(hits, n, seed);
    if !exact {
        // half the band mass approximates the shift from a one-stderr move
        let shift = 0.5 * band as f64 / n as f64;
        e.stderr = (e.stderr * e.stderr + shift * shift).sqrt();
    }
    e
}

/// Frequency of `|f(X) − m_f| ≤ σ_f s` under the standard Gaussian.
pub fn mc_smallball(f: &MultiPoly, s: f64, n: usize, seed: u64) -> Result<SmallBall, GaussError> {
    check_s(s)?;
    let mo = gauss_moments(f, seed)?;
    let (hits, band) = band_counts(f, &mo, &[s], n, seed);
    Ok(SmallBall { s, estimate: fold(hits[0], band[0], n, seed, mo.exact), moments: mo })
}

/// `s·|ln s|^{−d/2}`
pub fn smallball_profile(s: f64, degree: usize) -> f64 {
    s * s.ln().abs().powf(-(degree as f64) / 2.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub s: f64,
    pub estimate: MCEstimate,
    pub profile: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmallBallScan {
    pub degree: usize,
    pub moments: GaussMoments,
    pub rows: Vec<ScanRow>,
    /// Smallest ratio over the scan, the empirical lower witness for `f`.
    pub min_ratio: f64,
}

/// Small-ball estimates for every `s` from one shared sample.
pub fn smallball_scan(f: &MultiPoly, s_list: &[f64], n: usize, seed: u64) -> Result<SmallBallScan, GaussError> {
    for &s in s_list {
        check_s(s)?;
    }
    let mo = gauss_moments(f, seed)?;
    let (hits, band) = band_counts(f, &mo, s_list, n, seed);
    let d = f.degree();
    let rows: Vec<ScanRow> = s_list
        .iter()
        .enumerate()
        .map(|(j, &s)| {
            let estimate = fold(hits[j], band[j], n, seed, mo.exact);
            let profile = smallball_profile(s, d);
            ScanRow { s, estimate, profile, ratio: estimate.value / profile }
        })
        .collect();
    let min_ratio = rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    Ok(SmallBallScan { degree: d, moments: mo, rows, min_ratio })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailRow {
    pub t: f64,
    pub estimate: MCEstimate,
    /// `−ln p̂ / t²`, absent when the row is flagged.
    pub rate: Option<f64>,
    /// Fewer than [`TAIL_MIN_HITS`] exceedances; `p̂ < 1/N` when none.
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailTable {
    pub norm2: f64,
    pub norm2_exact: bool,
    pub degree: usize,
    pub rows: Vec<TailRow>,
    /// Smallest rate among unflagged rows.
    pub min_rate: Option<f64>,
}

/// Frequencies of `|f| > ‖f‖₂ t^d` under the standard Gaussian.
pub fn check_gauss_tail(f: &MultiPoly, t_list: &[f64], n: usize, seed: u64) -> Result<TailTable, GaussError> {
    if let Some(t) = t_list.iter().find(|t| !(**t >= 1.0)) {
        return Err(GaussError::InvalidArgument(format!("t must be ≥ 1, got {t}")));
    }
    let mo = gauss_moments(f, seed)?;
    let norm2 = (mo.sigma * mo.sigma + mo.mean * mo.mean).sqrt();
    let d = f.degree() as i32;
    let levels: Vec<f64> = t_list.iter().map(|t| norm2 * t.powi(d)).collect();
    let parts = map_sample_blocks(&StdGaussian(f.dim()), n, seed, |blk| {
        let mut hits = vec![0usize; levels.len()];
        for x in blk.rows() {
            let v = f.eval(x).abs();
            for (h, l) in hits.iter_mut().zip(&levels) {
                *h += usize::from(v > *l);
            }
        }
        hits
    });
    let mut hits = vec![0usize; levels.len()];
    for p in parts {
        hits.iter_mut().zip(p).for_each(|(t, h)| *t += h);
    }
    let rows: Vec<TailRow> = t_list
        .iter()
        .zip(&hits)
        .map(|(&t, &h)| {
            let estimate = MCEstimate::frequency(h, n, seed);
            let flagged = h < TAIL_MIN_HITS;
            let rate = (!flagged).then(|| -estimate.value.ln() / (t * t));
            TailRow { t, estimate, rate, flagged }
        })
        .collect();
    let min_rate = rows.iter().filter_map(|r| r.rate).reduce(f64::min);
    Ok(TailTable { norm2, norm2_exact: mo.exact, degree: f.degree(), rows, min_rate })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivativeNorm {
    pub m: usize,
    /// Monte Carlo estimate of `∫|D^m f|² dγ`.
    pub estimate: MCEstimate,
    pub exact: Option<f64>,
    pub sigma_sq: f64,
    /// `∫|D^m f|² dγ / σ_f²`, from the exact value when known.
    pub ratio: f64,
}

/// `∫|D^m f|² dγ`, by Monte Carlo and, for degree ≤ 2, exactly.
pub fn dm_l2_gaussian(f: &MultiPoly, m: usize, n: usize, seed: u64) -> Result<DerivativeNorm, GaussError> {
    if m == 0 || m > f.degree() {
        return Err(PolyError::DerivativeOrder { m, degree: f.degree() }.into());
    }
    let parts = map_sample_blocks(&StdGaussian(f.dim()), n, seed, |blk| {
        blk.rows().map(|x| f.dm_norm_at(m, x).map(|v| v * v)).collect::<Result<Moments, _>>()
    });
    let mut acc = Moments::default();
    for p in parts {
        acc = acc.merge(&p?);
    }
    let estimate = MCEstimate::from_moments(&acc, seed);
    let mo = gauss_moments(f, seed)?;
    let exact = if f.degree() <= 2 {
        let q = QuadForm::from_poly(f)?;
        let b2: f64 = q.b().iter().map(|x| x * x).sum();
        // |∇f|² = |2Ax + b|², |D²f|² = 4‖A‖_F²
        Some(if m == 1 { 4.0 * q.frobenius_sq() + b2 } else { 4.0 * q.frobenius_sq() })
    } else {
        None
    };
    let sigma_sq = mo.sigma * mo.sigma;
    let ratio = exact.unwrap_or(estimate.value) / sigma_sq;
    Ok(DerivativeNorm { m, estimate, exact, sigma_sq, ratio })
}

/// Sampling measure for the mean small-ball product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "measure", rename_all = "snake_case")]
pub enum Sampler {
    Gaussian,
    ProductExponential,
    Uniform { body: ConvexBody, chain: Option<ChainConfig> },
}

impl Sampler {
    pub fn sample(&self, dim: usize, n: usize, seed: u64) -> Result<SampleBlock, GaussError> {
        Ok(match self {
            Self::Gaussian => draw(&StdGaussian(dim), n, seed),
            Self::ProductExponential => draw(&ProductExponential(dim), n, seed),
            Self::Uniform { body, chain } => {
                if body.dim() != dim {
                    return Err(PolyError::DimensionMismatch { expected: body.dim(), got: dim }.into());
                }
                let cfg = chain.clone().unwrap_or_else(|| ChainConfig::for_dim(dim, seed));
                hit_and_run(body, n, &cfg)?
            }
        })
    }

    fn exact_mean(&self, q: &QuadForm) -> Option<f64> {
        match self {
            Self::Gaussian => Some(q.stats().0),
            _ => None,
        }
    }
}

/// `eps` against `μ(|f − m_f| < eps) · ∫|f − m_f| dμ` for a quadratic form.
///
/// The mean is exact for the Gaussian and a sample mean otherwise; the
/// extras carry the two factors, their standard errors, and the delta-method
/// standard error of the ratio.
pub fn check_cor28_mc(q: &QuadForm, sampler: &Sampler, eps: f64, n: usize, seed: u64) -> Result<IneqReport, GaussError> {
    if !(eps > 0.0) {
        return Err(GaussError::InvalidArgument(format!("eps must be positive, got {eps}")));
    }
    if n < 2 {
        return Err(GaussError::InvalidArgument("need at least two samples".into()));
    }
    let block = sampler.sample(q.dim(), n, seed)?;
    let vals: Vec<f64> = block.rows().map(|x| q.eval(x)).collect();
    let nf = n as f64;
    let exact_mean = sampler.exact_mean(q);
    let mean = exact_mean.unwrap_or_else(|| vals.iter().sum::<f64>() / nf);
    let dev: Vec<f64> = vals.iter().map(|v| (v - mean).abs()).collect();
    let alpha = dev.iter().sum::<f64>() / nf;
    let inside: Vec<f64> = dev.iter().map(|&d| f64::from(u8::from(d < eps))).collect();
    let hits = dev.iter().filter(|&&d| d < eps).count();
    let p = hits as f64 / nf;
    let tilt = if exact_mean.is_some() {
        0.0
    } else {
        vals.iter().map(|&v| (v < mean) as i32 - (v > mean) as i32).sum::<i32>() as f64 / nf
    };
    let alpha_if: Vec<f64> = (0..n).map(|i| dev[i] - alpha + tilt * (vals[i] - mean)).collect();
    let alpha_se = influence_stderr(&alpha_if);
    if eps >= alpha - 3.0 * alpha_se {
        return Err(GaussError::EpsTooLarge { eps, alpha, stderr: alpha_se });
    }
    let rhs = p * alpha;
    let rep = IneqReport::new(
        IneqTag::MeanSmallball,
        eps,
        rhs,
        json!({ "q": q, "sampler": sampler, "eps": eps, "n": n, "seed": seed }),
    );
    let ratio = rep.witness_ratio();
    let rhs_if: Vec<f64> = (0..n).map(|i| alpha * (inside[i] - p) + p * alpha_if[i]).collect();
    let ratio_se = if ratio.is_finite() && rhs > 0.0 {
        ratio * influence_stderr(&rhs_if) / rhs
    } else {
        f64::NAN
    };
    let p_se = MCEstimate::frequency(hits, n, seed).stderr;
    Ok(rep
        .with_extra("p_hat", p)
        .with_extra("p_stderr", p_se)
        .with_extra("alpha_hat", alpha)
        .with_extra("alpha_stderr", alpha_se)
        .with_extra("mean", mean)
        .with_extra("rhs_stderr", influence_stderr(&rhs_if))
        .with_extra("ratio_stderr", ratio_se))
}
