//! Batch front-end: a [`RunConfig`] in, a JSON [`ReportEnvelope`] and CSV tables out.

pub mod config;
pub mod error;
pub mod run;
pub mod table;

pub use config::{Command, Ineq, RunConfig, SamplerKind};
pub use error::{CliError, ErrorKind};
pub use run::{run, ReportEnvelope, RunResult};
pub use table::{emit_table, emit_tables};

/// Worker cap from `POLYCONC_THREADS`; unset or `0` leaves the default.
pub fn configure_threads_from_env() -> Result<(), CliError> {
    let Ok(v) = std::env::var("POLYCONC_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| CliError::validation("config/threads", format!("POLYCONC_THREADS must be a count, got {v:?}")))?;
    polyconc::par::configure_threads(n).map_err(|e| CliError::numeric("config/threads", e))
}
