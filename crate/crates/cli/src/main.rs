use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use polyconc_cli::{configure_threads_from_env, run, CliError, Command, Ineq, RunConfig, SamplerKind};

/// Numerical checks of small-ball, tail and isoperimetric inequalities.
///
/// Give a command and flags, or `--config run.json` with the same keys as the
/// long flags; flags override the file. Exit status: 0 ok, 2 invalid input,
/// 3 numeric failure.
#[derive(Debug, Parser)]
#[command(name = "polyconc", version)]
struct Cli {
    command: Option<Command>,
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Debug, clap::Args)]
struct Flags {
    #[arg(long)]
    ineq: Option<Ineq>,
    /// Roots of a monic univariate polynomial, e.g. `0,1`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    poly_roots: Option<Vec<f64>>,
    /// Univariate coefficients, constant term first.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    poly_coeffs: Option<Vec<f64>>,
    /// Multivariate polynomial, e.g. `x1*x2 - x3^2`.
    #[arg(long, allow_hyphen_values = true)]
    poly: Option<String>,
    /// exp | uniform:lo,hi | exp-affine:c0,c1,lo,hi | power:n,lo,hi | affine-power:alpha,beta,n,lo,hi
    #[arg(long, allow_hyphen_values = true)]
    weight: Option<String>,
    /// cube[:lo,hi] | ball[:radius] | simplex
    #[arg(long, allow_hyphen_values = true)]
    body: Option<String>,
    #[arg(long)]
    sampler: Option<SamplerKind>,
    /// `a,b` for the sets (−∞, a] and [b, ∞).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    sets: Option<Vec<f64>>,
    /// `lo,hi` for restricted-mass.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    set: Option<Vec<f64>>,
    #[arg(long, allow_hyphen_values = true)]
    eps: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    r: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    eps_frac: Option<f64>,
    /// Monte Carlo samples.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    degree: Option<usize>,
    /// exp | power:n
    #[arg(long)]
    family: Option<String>,
    #[arg(long, value_delimiter = ',')]
    s: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    t_list: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    a: Option<Vec<f64>>,
    #[arg(long)]
    trunc: Option<f64>,
    #[arg(long)]
    max_d: Option<usize>,
    #[arg(long)]
    max_n: Option<u32>,
    /// Grid cells for pushforward CDFs.
    #[arg(long)]
    grid: Option<usize>,
    /// Report path; tables are written beside it. Stdout when absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

macro_rules! overlay {
    ($cfg:ident, $flags:ident; $($field:ident),*) => {
        $(if let Some(v) = $flags.$field { $cfg.$field = v; })*
    };
}

fn build_config(cli: Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::validation("config/read", format!("{}: {e}", path.display())))?;
            serde_json::from_str(&text)?
        }
        None => match cli.command {
            Some(_) => RunConfig::default(),
            None => return Err(CliError::validation("config/missing-command", "give a command or --config")),
        },
    };
    if let Some(c) = cli.command {
        cfg.command = c;
    }
    let f = cli.flags;
    overlay!(cfg, f; ineq, weight, body, sampler, eps, r, alpha, t, q, eps_frac, n, budget, seed, degree, family, s, t_list, a, max_d, max_n, grid);
    if f.poly_roots.is_some() {
        cfg.poly_roots = f.poly_roots;
    }
    if f.poly_coeffs.is_some() {
        cfg.poly_coeffs = f.poly_coeffs;
    }
    if f.poly.is_some() {
        cfg.poly = f.poly;
    }
    if f.sets.is_some() {
        cfg.sets = f.sets;
    }
    if f.set.is_some() {
        cfg.set = f.set;
    }
    if f.trunc.is_some() {
        cfg.trunc = f.trunc;
    }
    if f.output.is_some() {
        cfg.output = f.output;
    }
    Ok(cfg)
}

fn main_inner() -> Result<(), CliError> {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => return Err(CliError::validation("cli/usage", e.to_string().trim())),
    };
    configure_threads_from_env()?;
    let env = run(build_config(cli)?)?;
    if env.config.output.is_none() {
        let json = serde_json::to_string_pretty(&env).map_err(|e| CliError::numeric("io/json", e.to_string()))?;
        let mut out = std::io::stdout().lock();
        match writeln!(out, "{json}") {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => return Err(e.into()),
            _ => {}
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match main_inner() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
