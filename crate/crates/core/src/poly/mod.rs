//! Polynomials, real roots and the sets they cut out of the line.

mod multi;
mod roots;
mod sets;
mod uni;

pub use multi::MultiPoly;
pub use roots::{cauchy_bound, real_roots, real_roots_scan, RootList, SCAN_PANELS, STURM_GUARD};
pub use sets::{partition_by_levels, preimage, sign_partition, Interval, IntervalUnion, SignPartition};
pub use uni::UniPoly;

/// Default absolute tolerance for root location.
pub const ROOT_TOL: f64 = 1e-12;

/// Largest total degree accepted for restrictions and sign analysis.
pub const MAX_DEGREE: usize = 12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PolyError {
    #[error("the zero polynomial has no isolated roots")]
    ZeroPolynomial,
    #[error("invalid interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },
    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),
    #[error("eps must be positive, got {0}")]
    InvalidEps(f64),
    #[error("intervals overlap or are out of order")]
    OverlappingIntervals,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("degree {degree} exceeds the maximum {max}")]
    DegreeTooHigh { degree: usize, max: usize },
    #[error("derivative order {m} is outside 1..={degree}")]
    DerivativeOrder { m: usize, degree: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("segment endpoints coincide")]
    DegenerateSegment,
}
