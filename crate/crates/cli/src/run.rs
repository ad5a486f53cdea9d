//! Dispatch from a [`RunConfig`] to the library and the report envelope.

use std::path::PathBuf;

use polyconc::body::{hit_and_run, pushforward_samples, ChainConfig, Shape};
use polyconc::checkers::{
    check_carbery_wright, check_khinchin, check_mean_deviation, check_nsv_tail, check_product_smallball,
    check_restricted_mass, check_reverse_poincare, check_vanishing_l1, poly_stats, KhinchinReport,
};
use polyconc::gauss::{check_cor28_mc, check_gauss_tail, smallball_scan, QuadForm, SmallBallScan, TailTable};
use polyconc::isoperim::{
    cheeger_profile, poincare_gap, pushforward_grid, three_set_check, three_set_exact, CheegerReport, GridDist,
    PoincareReport, MIN_GRID_CELLS,
};
use polyconc::poly::{MultiPoly, UniPoly};
use polyconc::report::IneqReport;
use polyconc::search::{
    degree2_control, degree3_divergence, profile_constant, worst_ratio_search, DivergenceRow, ProfileCell,
    SearchResult, SearchSpace,
};
use polyconc::weights::Weight;
use serde::{Deserialize, Serialize};

use crate::config::{Command, Ineq, RunConfig};
use crate::error::CliError;
use crate::table::emit_tables;

pub const TOOL: &str = "polyconc";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// One entry of the results array.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "data", rename_all = "kebab-case")]
pub enum RunResult {
    Ineq(IneqReport),
    Khinchin(KhinchinReport),
    Search(SearchResult),
    Smallball(SmallBallScan),
    Tail(TailTable),
    Cheeger(CheegerReport),
    Poincare(PoincareReport),
    /// `degree` 3 is the divergence table, `degree` 2 the control.
    Divergence { degree: usize, rows: Vec<DivergenceRow> },
    Profile(Vec<ProfileCell>),
}

/// The same quantity computed along an independent path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSection {
    pub method: String,
    pub results: Vec<RunResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportEnvelope {
    pub tool: String,
    pub version: String,
    pub config: RunConfig,
    /// RFC 3339, UTC.
    pub timestamp: String,
    pub results: Vec<RunResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSection>,
}

impl ReportEnvelope {
    /// Everything but the timestamp, serialized; equal for equal configs.
    pub fn results_json(&self) -> String {
        serde_json::json!({ "config": self.config, "results": self.results, "oracle": self.oracle }).to_string()
    }
}

/// Resolves `config`, computes the results and writes the report and its
/// tables when an output path is set.
pub fn run(config: RunConfig) -> Result<ReportEnvelope, CliError> {
    let config = config.resolve()?;
    let (results, oracle) = dispatch(&config)?;
    let env = ReportEnvelope {
        tool: TOOL.into(),
        version: VERSION.into(),
        config,
        timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true),
        results,
        oracle,
    };
    if let Some(path) = &env.config.output {
        write_report(&env, path)?;
    }
    Ok(env)
}

/// Writes the JSON envelope to `path` and the tables beside it.
pub fn write_report(env: &ReportEnvelope, path: &PathBuf) -> Result<Vec<PathBuf>, CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let json = serde_json::to_string_pretty(env).map_err(|e| CliError::numeric("io/json", e.to_string()))?;
    std::fs::write(path, json + "\n")?;
    emit_tables(env, path)
}

type Outcome = (Vec<RunResult>, Option<OracleSection>);

fn dispatch(c: &RunConfig) -> Result<Outcome, CliError> {
    match c.command {
        Command::Check => check(c),
        Command::Search => {
            let space = SearchSpace::new(c.degree, c.family()?);
            Ok((vec![RunResult::Search(worst_ratio_search(&space, c.budget, c.seed)?)], None))
        }
        Command::Smallball => {
            let f = c.require_multi()?;
            Ok((vec![RunResult::Smallball(smallball_scan(&f, &c.s, c.n, c.seed)?)], None))
        }
        Command::Tail => {
            let f = c.require_multi()?;
            Ok((vec![RunResult::Tail(check_gauss_tail(&f, &c.t_list, c.n, c.seed)?)], None))
        }
        Command::Isoperimetry => isoperimetry(c),
        Command::Divergence => {
            let trunc = c.trunc.expect("resolved");
            Ok((
                vec![
                    RunResult::Divergence { degree: 3, rows: degree3_divergence(&c.a, trunc)? },
                    RunResult::Divergence { degree: 2, rows: degree2_control(&c.a, trunc)? },
                ],
                None,
            ))
        }
        Command::Profile => Ok((vec![RunResult::Profile(profile_constant(c.max_d, c.max_n, c.budget, c.seed)?)], None)),
    }
}

fn check(c: &RunConfig) -> Result<Outcome, CliError> {
    if c.ineq == Ineq::MeanSmallball {
        let f = c.require_multi()?;
        let q = QuadForm::from_poly(&f)?;
        let rep = check_cor28_mc(&q, &c.sampler(f.dim())?, c.eps, c.n, c.seed)?;
        return Ok((vec![RunResult::Ineq(rep)], None));
    }
    if c.ineq == Ineq::ThreeSet && c.uni_poly().is_none() {
        let (rep, oracle) = three_set_sampled(c, &c.require_multi()?)?;
        return Ok((vec![RunResult::Ineq(rep)], oracle));
    }
    let f = c.require_uni()?;
    let w = c.weight()?;
    let res = match c.ineq {
        Ineq::ProductSmallball => RunResult::Ineq(check_product_smallball(&f, &w, c.eps, c.r)?),
        Ineq::CarberyWright => RunResult::Ineq(check_carbery_wright(&f, &w, c.alpha)?),
        Ineq::NsvTail => RunResult::Ineq(check_nsv_tail(&f, &w, c.t)?),
        Ineq::RestrictedMass => RunResult::Ineq(check_restricted_mass(&f, &w, &c.restricted_set(&w)?)?),
        Ineq::Khinchin => RunResult::Khinchin(check_khinchin(&f, &w, c.q)?),
        Ineq::ReversePoincare => RunResult::Ineq(check_reverse_poincare(&f, &w)?),
        Ineq::MeanDeviation => RunResult::Ineq(check_mean_deviation(&f, &w, c.eps_frac)?),
        Ineq::VanishingL1 => RunResult::Ineq(check_vanishing_l1(&f, &w, c.r)?),
        Ineq::ThreeSet => RunResult::Ineq(three_set_exact(&f, &w, &c.require_sets()?)?),
        Ineq::MeanSmallball => unreachable!("handled above"),
    };
    Ok((vec![res], None))
}

/// An interval body in one dimension, as a uniform weight.
fn interval_weight(c: &RunConfig, dim: usize) -> Result<Option<Weight>, CliError> {
    if dim != 1 {
        return Ok(None);
    }
    match c.body_for(1)?.shape() {
        Shape::Box { lo, hi } => Ok(Some(Weight::uniform(lo[0], hi[0])?)),
        Shape::Ball { center, radius } => Ok(Some(Weight::uniform(center[0] - radius, center[0] + radius)?)),
        _ => Ok(None),
    }
}

/// `f` of one variable as a univariate polynomial.
fn univariate(f: &MultiPoly) -> UniPoly {
    let mut coeffs = vec![0.0; f.degree() + 1];
    for (e, v) in f.terms() {
        coeffs[e[0] as usize] += v;
    }
    UniPoly::new(coeffs)
}

fn three_set_sampled(c: &RunConfig, f: &MultiPoly) -> Result<(IneqReport, Option<OracleSection>), CliError> {
    let sets = c.require_sets()?;
    let body = c.body_for(f.dim())?;
    let rep = three_set_check(&body, f, &sets, c.n, &ChainConfig::for_dim(f.dim(), c.seed))?;
    let oracle = match interval_weight(c, f.dim())? {
        Some(w) => Some(OracleSection {
            method: "exact pushforward of the uniform weight on the interval".into(),
            results: vec![RunResult::Ineq(three_set_exact(&univariate(f), &w, &sets)?)],
        }),
        None => None,
    };
    Ok((rep, oracle))
}

fn isoperimetry(c: &RunConfig) -> Result<Outcome, CliError> {
    let mut results = Vec::new();
    let mut oracle = None;
    let (g, alpha) = if let Some(f) = c.uni_poly() {
        let w = c.weight()?;
        if let Some(sets) = c.three_sets()? {
            results.push(RunResult::Ineq(three_set_exact(&f, &w, &sets)?));
        }
        (pushforward_grid(&f, &w, c.grid)?, poly_stats(&f, &w)?.alpha)
    } else {
        let f = c.require_multi()?;
        if c.sets.is_some() {
            let (rep, o) = three_set_sampled(c, &f)?;
            results.push(RunResult::Ineq(rep));
            oracle = o;
        }
        let body = c.body_for(f.dim())?;
        let block = hit_and_run(&body, c.n, &ChainConfig::for_dim(f.dim(), c.seed))?;
        let dist = pushforward_samples(&f, &block)?;
        let vals = dist.values();
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        let alpha = vals.iter().map(|v| (v - mean).abs()).sum::<f64>() / vals.len() as f64;
        let bins = dist.default_bins().max(MIN_GRID_CELLS).min(c.grid.max(MIN_GRID_CELLS));
        (GridDist::from_empirical(&dist, bins)?, alpha)
    };
    let cheeger: CheegerReport = cheeger_profile(&g, alpha)?;
    let poincare: PoincareReport = poincare_gap(&g)?;
    results.push(RunResult::Cheeger(cheeger));
    results.push(RunResult::Poincare(poincare));
    Ok((results, oracle))
}
