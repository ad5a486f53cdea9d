use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::serde_ext::ext_f64;

/// `lhs / rhs_core`, or an infinite flag when `rhs_core = 0 < lhs`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ratio {
    #[serde(with = "ext_f64")]
    pub witness_ratio: f64,
    pub infinite: bool,
}

impl Ratio {
    /// Smallest float `c` with `lhs ≤ c·rhs` (`0/0` counts as `0`).
    pub fn of(lhs: f64, rhs: f64) -> Self {
        if lhs <= 0.0 {
            return Self { witness_ratio: 0.0, infinite: false };
        }
        if rhs <= 0.0 {
            return Self { witness_ratio: f64::INFINITY, infinite: true };
        }
        let mut r = lhs / rhs;
        while r * rhs < lhs {
            r = r.next_up();
        }
        while r > 0.0 && r.next_down() * rhs >= lhs {
            r = r.next_down();
        }
        Self { witness_ratio: r, infinite: r.is_infinite() }
    }

    pub fn value(&self) -> f64 {
        self.witness_ratio
    }

    pub fn is_finite(&self) -> bool {
        !self.infinite
    }
}

/// Which inequality a report instantiates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IneqTag {
    ProductSmallball,
    CarberyWright,
    NsvTail,
    RestrictedMass,
    KhinchinNorm0,
    KhinchinNorm1,
    ReversePoincare,
    MeanDeviation,
    VanishingL1,
    MeanSmallball,
    ThreeSet,
}

impl IneqTag {
    pub fn name(&self) -> &'static str {
        match self {
            Self::ProductSmallball => "product-smallball",
            Self::CarberyWright => "carbery-wright",
            Self::NsvTail => "nsv-tail",
            Self::RestrictedMass => "restricted-mass",
            Self::KhinchinNorm0 => "khinchin-norm0",
            Self::KhinchinNorm1 => "khinchin-norm1",
            Self::ReversePoincare => "reverse-poincare",
            Self::MeanDeviation => "mean-deviation",
            Self::VanishingL1 => "vanishing-l1",
            Self::MeanSmallball => "mean-smallball",
            Self::ThreeSet => "three-set",
        }
    }
}

impl fmt::Display for IneqTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Both sides of one inequality instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IneqReport {
    pub tag: IneqTag,
    pub lhs: f64,
    pub rhs_core: f64,
    #[serde(flatten)]
    pub ratio: Ratio,
    pub instance: serde_json::Value,
    /// Side quantities (standard errors, companion probabilities).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extras: BTreeMap<String, f64>,
}

impl IneqReport {
    pub fn new(tag: IneqTag, lhs: f64, rhs_core: f64, instance: serde_json::Value) -> Self {
        Self {
            tag,
            lhs,
            rhs_core,
            ratio: Ratio::of(lhs, rhs_core),
            instance,
            extras: BTreeMap::new(),
        }
    }

    pub fn with_extra(mut self, key: &str, value: f64) -> Self {
        self.extras.insert(key.to_string(), value);
        self
    }

    pub fn witness_ratio(&self) -> f64 {
        self.ratio.witness_ratio
    }
}
