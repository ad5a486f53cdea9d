//! Sample blocks and Monte Carlo estimates.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::par;

/// Rows per generator stream. Fixed so that output does not depend on the
/// worker count.
pub const BLOCK_ROWS: usize = 4096;

/// `rows × dim` points stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBlock {
    pub dim: usize,
    pub data: Vec<f64>,
}

impl SampleBlock {
    pub fn new(dim: usize, data: Vec<f64>) -> Self {
        assert!(dim > 0 && data.len() % dim == 0, "ragged sample block");
        Self { dim, data }
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }
}

/// A Monte Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MCEstimate {
    pub value: f64,
    pub stderr: f64,
    pub n_samples: usize,
    pub seed: u64,
}

impl MCEstimate {
    /// Frequency of `hits` among `n` draws; the stderr uses the unbiased
    /// sample variance of the indicator.
    pub fn frequency(hits: usize, n: usize, seed: u64) -> Self {
        let p = hits as f64 / n as f64;
        let var = if n > 1 { p * (1.0 - p) * n as f64 / (n as f64 - 1.0) } else { 0.0 };
        Self { value: p, stderr: (var / n as f64).sqrt(), n_samples: n, seed }
    }

    pub fn from_moments(m: &Moments, seed: u64) -> Self {
        Self { value: m.mean(), stderr: m.stderr(), n_samples: m.n, seed }
    }
}

/// Running mean and variance (Welford), merged in a fixed order.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    pub n: usize,
    mean: f64,
    m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(self, other: &Self) -> Self {
        if other.n == 0 {
            return self;
        }
        if self.n == 0 {
            return *other;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        let w = other.n as f64 / n as f64;
        Self {
            n,
            mean: self.mean + d * w,
            m2: self.m2 + other.m2 + d * d * self.n as f64 * w,
        }
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        self.m2 / (self.n as f64 - 1.0)
    }

    pub fn stderr(&self) -> f64 {
        (self.variance() / self.n as f64).sqrt()
    }
}

impl FromIterator<f64> for Moments {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut m = Self::default();
        for x in iter {
            m.push(x);
        }
        m
    }
}

/// Standard normal pair from two uniforms (Box–Muller).
pub fn normal_pair<R: Rng + ?Sized>(rng: &mut R) -> (f64, f64) {
    // 1 − U lies in (0, 1], keeping the logarithm finite
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random();
    let r = (-2.0 * u1.ln()).sqrt();
    let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
    (r * c, r * s)
}

/// Fills `out` with independent standard normals.
pub fn fill_normal<R: Rng + ?Sized>(rng: &mut R, out: &mut [f64]) {
    let mut chunks = out.chunks_exact_mut(2);
    for pair in &mut chunks {
        let (a, b) = normal_pair(rng);
        pair[0] = a;
        pair[1] = b;
    }
    if let [last] = chunks.into_remainder() {
        *last = normal_pair(rng).0;
    }
}

/// Uniform direction on the unit sphere in `dim` dimensions.
pub fn unit_direction<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<f64> {
    let mut u = vec![0.0; dim];
    loop {
        fill_normal(rng, &mut u);
        let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-300 {
            u.iter_mut().for_each(|x| *x /= norm);
            return u;
        }
    }
}

/// How i.i.d. draws of one row are produced from a stream.
pub trait RowSampler: Sync {
    fn dim(&self) -> usize;
    fn fill<R: Rng + ?Sized>(&self, rng: &mut R, rows: usize, out: &mut [f64]);
}

pub struct StdGaussian(pub usize);

impl RowSampler for StdGaussian {
    fn dim(&self) -> usize {
        self.0
    }
    fn fill<R: Rng + ?Sized>(&self, rng: &mut R, _rows: usize, out: &mut [f64]) {
        fill_normal(rng, out);
    }
}

/// Independent unit-rate exponential coordinates.
pub struct ProductExponential(pub usize);

impl RowSampler for ProductExponential {
    fn dim(&self) -> usize {
        self.0
    }
    fn fill<R: Rng + ?Sized>(&self, rng: &mut R, _rows: usize, out: &mut [f64]) {
        for x in out.iter_mut() {
            *x = -(1.0 - rng.random::<f64>()).ln();
        }
    }
}

/// Applies `f` to each fixed-size block of `n` i.i.d. rows; block `b` draws
/// from stream `(seed, b)`. Results come back in block order.
pub fn map_sample_blocks<S, T, F>(sampler: &S, n: usize, seed: u64, f: F) -> Vec<T>
where
    S: RowSampler,
    T: Send,
    F: Fn(&SampleBlock) -> T + Sync + Send,
{
    let ranges = par::blocks(n, BLOCK_ROWS);
    let dim = sampler.dim();
    par::map_indices(ranges.len(), |b| {
        let (lo, hi) = ranges[b];
        let rows = hi - lo;
        let mut rng = par::rng_for(seed, b as u64);
        let mut data = vec![0.0; rows * dim];
        sampler.fill(&mut rng, rows, &mut data);
        f(&SampleBlock::new(dim, data))
    })
}

/// All `n` rows of a sampler, concatenated in block order.
pub fn draw<S: RowSampler>(sampler: &S, n: usize, seed: u64) -> SampleBlock {
    let parts = map_sample_blocks(sampler, n, seed, |b| b.data.clone());
    SampleBlock::new(sampler.dim(), parts.concat())
}

/// Delta-method standard error of a smooth functional of sample means.
///
/// `influence` holds the influence-function value of each sample; the
/// result is `sd(influence) / √N`.
pub fn influence_stderr(influence: &[f64]) -> f64 {
    let m: Moments = influence.iter().copied().collect();
    m.stderr()
}

/// Standard error of the mean of a correlated sequence from the spread of
/// `batches` contiguous batch means.
pub fn batch_means_stderr(values: &[f64], batches: usize) -> f64 {
    let b = batches.clamp(2, values.len().max(2));
    let size = values.len() / b;
    if size == 0 {
        return f64::NAN;
    }
    let means: Moments = values.chunks_exact(size).take(b).map(|c| c.iter().sum::<f64>() / size as f64).collect();
    means.stderr()
}
