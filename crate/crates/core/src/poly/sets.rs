//! Interval unions and level-set partitions of univariate polynomials.

use serde::{Deserialize, Serialize};

use super::{real_roots, PolyError, UniPoly, ROOT_TOL};
use crate::serde_ext::ext_f64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    #[serde(with = "ext_f64")]
    pub lo: f64,
    #[serde(with = "ext_f64")]
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn closed(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            lo_closed: lo.is_finite(),
            hi_closed: hi.is_finite(),
        }
    }

    pub fn open(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            lo_closed: false,
            hi_closed: false,
        }
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo_closed { x >= self.lo } else { x > self.lo };
        let below = if self.hi_closed { x <= self.hi } else { x < self.hi };
        above && below
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }
}

/// Sorted union of pairwise disjoint intervals.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<Interval>", into = "Vec<Interval>")]
pub struct IntervalUnion {
    intervals: Vec<Interval>,
}

impl TryFrom<Vec<Interval>> for IntervalUnion {
    type Error = PolyError;
    fn try_from(v: Vec<Interval>) -> Result<Self, PolyError> {
        Self::new(v)
    }
}

impl From<IntervalUnion> for Vec<Interval> {
    fn from(u: IntervalUnion) -> Self {
        u.intervals
    }
}

impl IntervalUnion {
    pub fn new(intervals: Vec<Interval>) -> Result<Self, PolyError> {
        for iv in &intervals {
            if iv.lo.is_nan() || iv.hi.is_nan() || iv.lo > iv.hi {
                return Err(PolyError::InvalidInterval { lo: iv.lo, hi: iv.hi });
            }
        }
        for w in intervals.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            let touching = a.hi == b.lo && a.hi_closed && b.lo_closed;
            if a.hi > b.lo || touching {
                return Err(PolyError::OverlappingIntervals);
            }
        }
        Ok(Self { intervals })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// Union of closed intervals; overlapping input is merged.
    pub fn from_closed(pairs: &[(f64, f64)]) -> Result<Self, PolyError> {
        let mut ivs: Vec<Interval> = pairs.iter().map(|&(a, b)| Interval::closed(a, b)).collect();
        for iv in &ivs {
            if iv.lo.is_nan() || iv.hi.is_nan() || iv.lo > iv.hi {
                return Err(PolyError::InvalidInterval { lo: iv.lo, hi: iv.hi });
            }
        }
        ivs.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        Ok(Self { intervals: merge_sorted(ivs) })
    }

    pub fn single(iv: Interval) -> Self {
        Self { intervals: vec![iv] }
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|iv| iv.contains(x))
    }

    /// Lebesgue measure.
    pub fn length(&self) -> f64 {
        self.intervals.iter().map(Interval::len).sum()
    }

    /// Finite endpoints in ascending order.
    pub fn finite_endpoints(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self
            .intervals
            .iter()
            .flat_map(|iv| [iv.lo, iv.hi])
            .filter(|x| x.is_finite())
            .collect();
        v.dedup();
        v
    }

    /// Intersection with the closed interval `[lo, hi]`.
    pub fn clip(&self, lo: f64, hi: f64) -> Self {
        let mut out = Vec::new();
        for iv in &self.intervals {
            let mut c = *iv;
            if c.lo < lo {
                c.lo = lo;
                c.lo_closed = true;
            }
            if c.hi > hi {
                c.hi = hi;
                c.hi_closed = true;
            }
            if c.lo < c.hi || (c.lo == c.hi && c.lo_closed && c.hi_closed) {
                out.push(c);
            }
        }
        Self { intervals: out }
    }

    /// Open enlargement `A + (-h, h)`.
    pub fn enlarge(&self, h: f64) -> Self {
        let ivs = self
            .intervals
            .iter()
            .map(|iv| Interval::open(iv.lo - h, iv.hi + h))
            .collect();
        Self { intervals: merge_sorted(ivs) }
    }

    /// Complement inside `[lo, hi]`.
    pub fn complement_in(&self, lo: f64, hi: f64) -> Self {
        let mut out = Vec::new();
        let mut cursor = lo;
        let mut cursor_closed = lo.is_finite();
        for iv in &self.clip(lo, hi).intervals {
            if iv.lo > cursor || (iv.lo == cursor && cursor_closed && !iv.lo_closed) {
                out.push(Interval {
                    lo: cursor,
                    hi: iv.lo,
                    lo_closed: cursor_closed,
                    hi_closed: !iv.lo_closed,
                });
            }
            cursor = iv.hi;
            cursor_closed = !iv.hi_closed;
        }
        if cursor < hi || (cursor == hi && cursor_closed && hi.is_finite()) {
            out.push(Interval {
                lo: cursor,
                hi,
                lo_closed: cursor_closed,
                hi_closed: hi.is_finite(),
            });
        }
        Self { intervals: out }
    }

    /// Minimal distance between two unions (0 if they touch or overlap).
    pub fn distance(&self, other: &Self) -> f64 {
        let mut best = f64::INFINITY;
        for a in &self.intervals {
            for b in &other.intervals {
                let gap = if a.hi <= b.lo {
                    b.lo - a.hi
                } else if b.hi <= a.lo {
                    a.lo - b.hi
                } else {
                    0.0
                };
                best = best.min(gap);
            }
        }
        best
    }
}

fn merge_sorted(ivs: Vec<Interval>) -> Vec<Interval> {
    let mut out: Vec<Interval> = Vec::with_capacity(ivs.len());
    for iv in ivs {
        if let Some(last) = out.last_mut() {
            let overlaps = iv.lo < last.hi || (iv.lo == last.hi && (iv.lo_closed || last.hi_closed));
            if overlaps {
                if iv.hi > last.hi || (iv.hi == last.hi && iv.hi_closed) {
                    last.hi = iv.hi;
                    last.hi_closed = iv.hi_closed;
                }
                continue;
            }
        }
        out.push(iv);
    }
    out
}

/// Partitions `[lo, hi]` into maximal runs on which `classify` is constant.
///
/// The partition points are the roots of `f − L` for every level `L`; at such
/// a point `classify` sees the exact level value, elsewhere it sees `f`.
/// Runs are returned in ascending order with exact closure flags.
pub fn partition_by_levels<C: Copy + PartialEq>(
    f: &UniPoly,
    lo: f64,
    hi: f64,
    levels: &[f64],
    classify: impl Fn(f64) -> C,
) -> Result<Vec<(C, Interval)>, PolyError> {
    if lo.is_nan() || hi.is_nan() || lo > hi {
        return Err(PolyError::InvalidInterval { lo, hi });
    }
    // (point, class at that point)
    let mut points: Vec<(f64, C)> = Vec::new();
    for &level in levels {
        let g = f.shift_const(level);
        if g.is_zero() {
            continue;
        }
        for r in real_roots(&g, lo, hi, ROOT_TOL)?.roots {
            points.push((r, classify(level)));
        }
    }
    if lo.is_finite() {
        points.push((lo, classify(f.eval(lo))));
    }
    if hi.is_finite() {
        points.push((hi, classify(f.eval(hi))));
    }
    // level roots take precedence over endpoint evaluation at the same abscissa
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    points.dedup_by(|later, earlier| later.0 == earlier.0);

    let mut elems: Vec<(C, Interval)> = Vec::with_capacity(2 * points.len() + 1);
    let mid_class = |a: f64, b: f64| -> C {
        let m = if a.is_finite() && b.is_finite() {
            0.5 * (a + b)
        } else if a.is_finite() {
            a + 1.0 + a.abs()
        } else if b.is_finite() {
            b - 1.0 - b.abs()
        } else {
            0.0
        };
        classify(f.eval(m))
    };
    let mut prev = lo;
    for &(p, c) in &points {
        if p > prev {
            elems.push((mid_class(prev, p), Interval::open(prev, p)));
        }
        elems.push((c, Interval::closed(p, p)));
        prev = p;
    }
    if hi > prev || (points.is_empty() && lo == hi) {
        elems.push((mid_class(prev, hi), Interval::open(prev, hi)));
    }

    let mut runs: Vec<(C, Interval)> = Vec::new();
    for (c, iv) in elems {
        match runs.last_mut() {
            Some((lc, last)) if *lc == c => {
                last.hi = iv.hi;
                last.hi_closed = iv.hi_closed;
            }
            _ => runs.push((c, iv)),
        }
    }
    Ok(runs)
}

/// `{t ∈ [lo, hi] : f(t) ∈ set}`.
pub fn preimage(f: &UniPoly, lo: f64, hi: f64, set: &IntervalUnion) -> Result<IntervalUnion, PolyError> {
    let levels = set.finite_endpoints();
    let runs = partition_by_levels(f, lo, hi, &levels, |v| set.contains(v))?;
    Ok(IntervalUnion {
        intervals: runs.into_iter().filter(|(c, _)| *c).map(|(_, iv)| iv).collect(),
    })
}

/// The three ε-level sets of a polynomial on a base interval.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignPartition {
    pub eps: f64,
    /// `{f ≤ −ε}`
    pub neg: IntervalUnion,
    /// `{|f| < ε}`
    pub mid: IntervalUnion,
    /// `{f ≥ ε}`
    pub pos: IntervalUnion,
    #[serde(with = "ext_f64")]
    pub domain_lo: f64,
    #[serde(with = "ext_f64")]
    pub domain_hi: f64,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Level {
    Neg,
    Mid,
    Pos,
}

pub fn sign_partition(f: &UniPoly, eps: f64, lo: f64, hi: f64) -> Result<SignPartition, PolyError> {
    if !(eps > 0.0) {
        return Err(PolyError::InvalidEps(eps));
    }
    let runs = partition_by_levels(f, lo, hi, &[-eps, eps], |v| {
        if v <= -eps {
            Level::Neg
        } else if v >= eps {
            Level::Pos
        } else {
            Level::Mid
        }
    })?;
    let pick = |want: Level| IntervalUnion {
        intervals: runs.iter().filter(|(c, _)| *c == want).map(|(_, iv)| *iv).collect(),
    };
    Ok(SignPartition {
        eps,
        neg: pick(Level::Neg),
        mid: pick(Level::Mid),
        pos: pick(Level::Pos),
        domain_lo: lo,
        domain_hi: hi,
    })
}
