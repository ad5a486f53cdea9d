use polyconc::body::BodyError;
use polyconc::checkers::CheckError;
use polyconc::gauss::GaussError;
use polyconc::isoperim::IsoError;
use polyconc::poly::PolyError;
use polyconc::weights::WeightError;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorKind {
    /// Bad configuration or an instance outside a routine's preconditions.
    Validation,
    /// The computation itself broke down, or output could not be written.
    Numeric,
}

/// Failure surfaced to the caller as a JSON object and an exit status.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, thiserror::Error)]
#[error("{tag}: {message}")]
pub struct CliError {
    pub kind: ErrorKind,
    /// `module/variant`, e.g. `weight/divergent`.
    pub tag: String,
    pub message: String,
}

impl CliError {
    pub fn validation(tag: &str, message: impl Into<String>) -> Self {
        Self { kind: ErrorKind::Validation, tag: tag.into(), message: message.into() }
    }

    pub fn numeric(tag: &str, message: impl Into<String>) -> Self {
        Self { kind: ErrorKind::Numeric, tag: tag.into(), message: message.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            ErrorKind::Validation => 2,
            ErrorKind::Numeric => 3,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::json!({ "error": self }).to_string()
    }
}

fn make(kind: ErrorKind, tag: &str, e: &impl std::fmt::Display) -> CliError {
    CliError { kind, tag: tag.into(), message: e.to_string() }
}

use ErrorKind::{Numeric, Validation};

impl From<PolyError> for CliError {
    fn from(e: PolyError) -> Self {
        let tag = match e {
            PolyError::ZeroPolynomial => "poly/zero-polynomial",
            PolyError::InvalidInterval { .. } => "poly/invalid-interval",
            PolyError::InvalidTolerance(_) => "poly/invalid-tolerance",
            PolyError::InvalidEps(_) => "poly/invalid-eps",
            PolyError::OverlappingIntervals => "poly/overlapping-intervals",
            PolyError::DimensionMismatch { .. } => "poly/dimension-mismatch",
            PolyError::DegreeTooHigh { .. } => "poly/degree-too-high",
            PolyError::DerivativeOrder { .. } => "poly/derivative-order",
            PolyError::Parse(_) => "poly/parse",
            PolyError::DegenerateSegment => "poly/degenerate-segment",
        };
        make(Validation, tag, &e)
    }
}

impl From<WeightError> for CliError {
    fn from(e: WeightError) -> Self {
        let tag = match e {
            WeightError::Poly(p) => return p.into(),
            WeightError::InvalidDomain { .. } => "weight/invalid-domain",
            WeightError::Divergent => "weight/divergent",
            WeightError::NonPositiveDensity => "weight/non-positive-density",
            WeightError::InvalidParameter(_) => "weight/invalid-parameter",
            WeightError::OutsideDomain { .. } => "weight/outside-domain",
        };
        make(Validation, tag, &e)
    }
}

impl From<CheckError> for CliError {
    fn from(e: CheckError) -> Self {
        let (kind, tag) = match e {
            CheckError::Weight(w) => return w.into(),
            CheckError::Poly(p) => return p.into(),
            CheckError::InvalidArgument(_) => (Validation, "check/invalid-argument"),
            CheckError::NoRootInDomain => (Validation, "check/no-root-in-domain"),
            CheckError::NotPowerWeight => (Validation, "check/not-power-weight"),
            CheckError::ZeroPolynomial => (Validation, "check/zero-polynomial"),
            CheckError::ZeroSigma => (Numeric, "check/zero-sigma"),
        };
        make(kind, tag, &e)
    }
}

impl From<BodyError> for CliError {
    fn from(e: BodyError) -> Self {
        let tag = match e {
            BodyError::DimensionMismatch { .. } => "body/dimension-mismatch",
            BodyError::EmptyInterior(_) => "body/empty-interior",
            BodyError::Unbounded => "body/unbounded",
            BodyError::NotInterior => "body/not-interior",
            BodyError::InvalidConfig(_) => "body/invalid-config",
        };
        make(Validation, tag, &e)
    }
}

impl From<GaussError> for CliError {
    fn from(e: GaussError) -> Self {
        let (kind, tag) = match e {
            GaussError::Poly(p) => return p.into(),
            GaussError::Body(b) => return b.into(),
            GaussError::InvalidArgument(_) => (Validation, "gauss/invalid-argument"),
            GaussError::NotQuadratic(_) => (Validation, "gauss/not-quadratic"),
            GaussError::EpsTooLarge { .. } => (Validation, "gauss/eps-too-large"),
            GaussError::ZeroSigma => (Numeric, "gauss/zero-sigma"),
        };
        make(kind, tag, &e)
    }
}

impl From<IsoError> for CliError {
    fn from(e: IsoError) -> Self {
        let (kind, tag) = match e {
            IsoError::Weight(w) => return w.into(),
            IsoError::Poly(p) => return p.into(),
            IsoError::Body(b) => return b.into(),
            IsoError::Check(c) => return c.into(),
            IsoError::InvalidArgument(_) => (Validation, "isoperim/invalid-argument"),
            IsoError::InvalidSets(_) => (Validation, "isoperim/invalid-sets"),
            IsoError::InvalidGrid(_) => (Numeric, "isoperim/invalid-grid"),
            IsoError::Degenerate => (Numeric, "isoperim/degenerate"),
            IsoError::OutsideSpan => (Numeric, "isoperim/outside-span"),
            IsoError::ZeroMassCell(_) => (Numeric, "isoperim/zero-mass-cell"),
        };
        make(kind, tag, &e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        make(Numeric, "io/write", &e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        make(Numeric, "io/csv", &e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        make(Validation, "config/json", &e)
    }
}
