//! Run configuration: one command plus every knob it reads, each with a default.

use std::path::PathBuf;

use polyconc::body::ConvexBody;
use polyconc::gauss::Sampler;
use polyconc::isoperim::ThreeSets;
use polyconc::poly::{Interval, IntervalUnion, MultiPoly, UniPoly};
use polyconc::search::{default_trunc, Family};
use polyconc::serde_ext::ext_f64;
use polyconc::weights::Weight;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Check,
    Search,
    Smallball,
    Tail,
    Isoperimetry,
    Divergence,
    Profile,
}

/// Inequality evaluated by `check`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Ineq {
    ProductSmallball,
    CarberyWright,
    NsvTail,
    RestrictedMass,
    Khinchin,
    ReversePoincare,
    MeanDeviation,
    VanishingL1,
    MeanSmallball,
    ThreeSet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SamplerKind {
    Gaussian,
    Exponential,
    Uniform,
}

/// Fully resolved run description. Keys in a `--config` file are the long
/// flag names; a missing key takes the default listed on the field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case", deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    /// `check` only. Default `product-smallball`.
    pub ineq: Ineq,
    /// Univariate instance as roots of a monic polynomial.
    pub poly_roots: Option<Vec<f64>>,
    /// Univariate instance as coefficients, constant term first.
    pub poly_coeffs: Option<Vec<f64>>,
    /// Multivariate instance such as `x1*x2 - x3^2`.
    pub poly: Option<String>,
    /// `exp`, `uniform:lo,hi`, `exp-affine:c0,c1,lo,hi`, `power:n,lo,hi` or
    /// `affine-power:alpha,beta,n,lo,hi`. Default `exp`.
    pub weight: String,
    /// `cube[:lo,hi]`, `ball[:radius]` or `simplex`, in the dimension of
    /// `poly`. Default `cube` (the unit cube).
    pub body: String,
    /// Measure for `mean-smallball`. Default `gaussian`.
    pub sampler: SamplerKind,
    /// `a,b` for the sets `(−∞, a]` and `[b, ∞)`.
    pub sets: Option<Vec<f64>>,
    /// `lo,hi` for `restricted-mass`; the weight domain when absent.
    pub set: Option<Vec<f64>>,
    /// Default 0.05.
    pub eps: f64,
    /// Shift in the product small-ball and vanishing-point checks. Default 0.
    pub r: f64,
    /// Level for `carbery-wright`. Default 0.1.
    pub alpha: f64,
    /// Tail parameter for `nsv-tail`. Default 2.
    pub t: f64,
    /// Norm exponent for `khinchin`. Default 2.
    pub q: f64,
    /// Fraction of `α_f` for `mean-deviation`. Default 0.05.
    pub eps_frac: f64,
    /// Monte Carlo sample count. Default 100000.
    pub n: usize,
    /// Random starts per search. Default 1000.
    pub budget: usize,
    /// Default 0.
    pub seed: u64,
    /// Search degree. Default 2.
    pub degree: usize,
    /// `exp` or `power:n`. Default `exp`.
    pub family: String,
    /// Default `0.5,0.1,0.01`.
    pub s: Vec<f64>,
    /// Tail levels for `tail`. Default `1,1.5,2,3`.
    pub t_list: Vec<f64>,
    /// Default `10,100,1000`.
    pub a: Vec<f64>,
    /// Cut-off for `divergence`; `2·max(a) + 50` when absent.
    #[serde(with = "opt_ext_f64")]
    pub trunc: Option<f64>,
    /// Default 4.
    pub max_d: usize,
    /// Default 3.
    pub max_n: u32,
    /// Grid cells for pushforward CDFs. Default 2000.
    pub grid: usize,
    /// JSON report path; CSV tables go next to it. Stdout when absent.
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: Command::Check,
            ineq: Ineq::ProductSmallball,
            poly_roots: None,
            poly_coeffs: None,
            poly: None,
            weight: "exp".into(),
            body: "cube".into(),
            sampler: SamplerKind::Gaussian,
            sets: None,
            set: None,
            eps: 0.05,
            r: 0.0,
            alpha: 0.1,
            t: 2.0,
            q: 2.0,
            eps_frac: 0.05,
            n: 100_000,
            budget: 1000,
            seed: 0,
            degree: 2,
            family: "exp".into(),
            s: vec![0.5, 0.1, 0.01],
            t_list: vec![1.0, 1.5, 2.0, 3.0],
            a: vec![10.0, 100.0, 1000.0],
            trunc: None,
            max_d: 4,
            max_n: 3,
            grid: 2000,
            output: None,
        }
    }
}

mod opt_ext_f64 {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(transparent)]
    struct Wrap(#[serde(with = "super::ext_f64")] f64);

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        v.map(Wrap).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        Ok(Option::<Wrap>::deserialize(d)?.map(|w| w.0))
    }
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::validation("config/invalid", msg)
}

fn numbers(spec: &str, what: &str) -> Result<Vec<f64>, CliError> {
    spec.split(',')
        .map(|s| ext_f64::parse(s).ok_or_else(|| invalid(format!("bad number {s:?} in {what} {spec:?}"))))
        .collect()
}

fn split_spec<'a>(spec: &'a str) -> (&'a str, Option<&'a str>) {
    match spec.split_once(':') {
        Some((k, rest)) => (k.trim(), Some(rest)),
        None => (spec.trim(), None),
    }
}

fn count(v: &[f64], k: usize, what: &str) -> Result<(), CliError> {
    if v.len() != k {
        return Err(invalid(format!("{what} takes {k} numbers, got {}", v.len())));
    }
    Ok(())
}

fn exponent(x: f64, what: &str) -> Result<u32, CliError> {
    if x >= 0.0 && x.fract() == 0.0 && x <= u32::MAX as f64 {
        Ok(x as u32)
    } else {
        Err(invalid(format!("{what} must be a nonnegative integer, got {x}")))
    }
}

pub fn parse_weight(spec: &str) -> Result<Weight, CliError> {
    let (kind, args) = split_spec(spec);
    let args = args.map(|a| numbers(a, "weight")).transpose()?.unwrap_or_default();
    let w = match kind {
        "exp" => {
            count(&args, 0, "exp")?;
            Ok(Weight::exponential())
        }
        "uniform" => {
            count(&args, 2, "uniform")?;
            Weight::uniform(args[0], args[1])
        }
        "exp-affine" => {
            count(&args, 4, "exp-affine")?;
            Weight::exp_affine(args[0], args[1], args[2], args[3])
        }
        "power" => {
            count(&args, 3, "power")?;
            Weight::power(exponent(args[0], "power n")?, args[1], args[2])
        }
        "affine-power" => {
            count(&args, 5, "affine-power")?;
            Weight::affine_power(args[0], args[1], exponent(args[2], "affine-power n")?, args[3], args[4])
        }
        other => return Err(invalid(format!("unknown weight {other:?}"))),
    };
    Ok(w?)
}

pub fn parse_body(spec: &str, dim: usize) -> Result<ConvexBody, CliError> {
    let (kind, args) = split_spec(spec);
    let args = args.map(|a| numbers(a, "body")).transpose()?.unwrap_or_default();
    let body = match kind {
        "cube" => {
            let (lo, hi) = match args.len() {
                0 => (0.0, 1.0),
                2 => (args[0], args[1]),
                _ => return Err(invalid("cube takes no bounds or lo,hi")),
            };
            ConvexBody::cube(vec![lo; dim], vec![hi; dim])
        }
        "ball" => {
            let radius = match args.len() {
                0 => 1.0,
                1 => args[0],
                _ => return Err(invalid("ball takes at most a radius")),
            };
            ConvexBody::ball(vec![0.0; dim], radius)
        }
        "simplex" => {
            count(&args, 0, "simplex")?;
            let mut vertices = vec![vec![0.0; dim]];
            for i in 0..dim {
                let mut v = vec![0.0; dim];
                v[i] = 1.0;
                vertices.push(v);
            }
            ConvexBody::simplex(vertices)
        }
        other => return Err(invalid(format!("unknown body {other:?}"))),
    };
    Ok(body?)
}

pub fn parse_family(spec: &str) -> Result<Family, CliError> {
    let (kind, args) = split_spec(spec);
    match (kind, args) {
        ("exp", None) => Ok(Family::ExpCanonical),
        ("power", Some(n)) => {
            let v = numbers(n, "family")?;
            count(&v, 1, "power family")?;
            Ok(Family::Power { n: exponent(v[0], "power n")? })
        }
        _ => Err(invalid(format!("unknown family {spec:?}; expected exp or power:n"))),
    }
}

impl RunConfig {
    /// Fills the defaults that depend on other fields, so the echoed config
    /// states everything the run used.
    pub fn resolve(mut self) -> Result<Self, CliError> {
        if self.command == Command::Divergence && self.trunc.is_none() {
            self.trunc = Some(default_trunc(&self.a));
        }
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.poly_roots.is_some() && self.poly_coeffs.is_some() {
            return Err(invalid("give either poly-roots or poly-coeffs, not both"));
        }
        if let Some(s) = &self.sets {
            count(s, 2, "sets")?;
        }
        if let Some(s) = &self.set {
            count(s, 2, "set")?;
        }
        for (name, v) in [("eps", self.eps), ("r", self.r), ("alpha", self.alpha), ("t", self.t), ("q", self.q), ("eps-frac", self.eps_frac)] {
            if !v.is_finite() {
                return Err(invalid(format!("{name} must be finite")));
            }
        }
        parse_weight(&self.weight)?;
        parse_family(&self.family)?;
        Ok(())
    }

    /// The univariate instance, if one was given.
    pub fn uni_poly(&self) -> Option<UniPoly> {
        match (&self.poly_roots, &self.poly_coeffs) {
            (Some(r), _) => Some(UniPoly::from_roots(r)),
            (_, Some(c)) => Some(UniPoly::new(c.clone())),
            _ => None,
        }
    }

    pub fn require_uni(&self) -> Result<UniPoly, CliError> {
        self.uni_poly().ok_or_else(|| invalid("this command needs poly-roots or poly-coeffs"))
    }

    pub fn multi_poly(&self) -> Result<Option<MultiPoly>, CliError> {
        self.poly.as_deref().map(|e| MultiPoly::parse(e, None).map_err(CliError::from)).transpose()
    }

    pub fn require_multi(&self) -> Result<MultiPoly, CliError> {
        self.multi_poly()?.ok_or_else(|| invalid("this command needs poly"))
    }

    pub fn weight(&self) -> Result<Weight, CliError> {
        parse_weight(&self.weight)
    }

    pub fn body_for(&self, dim: usize) -> Result<ConvexBody, CliError> {
        parse_body(&self.body, dim)
    }

    pub fn family(&self) -> Result<Family, CliError> {
        parse_family(&self.family)
    }

    pub fn three_sets(&self) -> Result<Option<ThreeSets>, CliError> {
        self.sets.as_ref().map(|s| ThreeSets::half_lines(s[0], s[1]).map_err(CliError::from)).transpose()
    }

    pub fn require_sets(&self) -> Result<ThreeSets, CliError> {
        self.three_sets()?.ok_or_else(|| invalid("this command needs sets"))
    }

    pub fn restricted_set(&self, w: &Weight) -> Result<IntervalUnion, CliError> {
        let (lo, hi) = match &self.set {
            Some(s) => (s[0], s[1]),
            None => (w.lo(), w.hi()),
        };
        let iv = Interval { lo, hi, lo_closed: true, hi_closed: hi.is_finite() };
        if !(lo <= hi) {
            return Err(invalid(format!("set [{lo}, {hi}] is empty")));
        }
        Ok(IntervalUnion::single(iv))
    }

    pub fn sampler(&self, dim: usize) -> Result<Sampler, CliError> {
        Ok(match self.sampler {
            SamplerKind::Gaussian => Sampler::Gaussian,
            SamplerKind::Exponential => Sampler::ProductExponential,
            SamplerKind::Uniform => Sampler::Uniform { body: self.body_for(dim)?, chain: None },
        })
    }
}
