//! Configuration-driven batch runs.
//!
//! A [`RunConfig`] names one command and its parameters; [`run`] executes
//! it (ensembles in parallel) and returns a [`RunOutput`] that can be
//! written as CSV or JSON. Output for a given configuration and seed does
//! not depend on the number of worker threads.

mod commands;
pub mod config;
pub mod output;

pub use config::{CommandKind, OutputFormat, Parameters, RunConfig};
pub use output::{csv_data_section, Cell, RunOutput};

use crate::error::{Error, Result};

/// Environment variable holding the default worker-thread count.
pub const THREADS_ENV: &str = "COLLAPSE_THREADS";

/// Executes `config` on the current rayon pool.
pub fn run(config: &RunConfig) -> Result<RunOutput> {
    let mut out = commands::dispatch(config)?;
    let mut meta = vec![
        ("version".to_string(), env!("CARGO_PKG_VERSION").to_string()),
        ("schema_version".to_string(), output::SCHEMA_VERSION.to_string()),
        ("command".to_string(), config.command.as_str().to_string()),
        ("seed".to_string(), config.seed.to_string()),
        ("n_trajectories".to_string(), config.n_trajectories.to_string()),
    ];
    for (k, v) in config.parameters.to_pairs() {
        meta.push((format!("param.{k}"), v));
    }
    meta.append(&mut out.metadata);
    out.metadata = meta;
    Ok(out)
}

/// Executes `config` on a dedicated pool of `threads` workers.
pub fn run_with_threads(config: &RunConfig, threads: usize) -> Result<RunOutput> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot start {threads} worker threads: {e}")))?;
    pool.install(|| run(config))
}

/// Thread count from [`THREADS_ENV`], if set.
pub fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map(Some)
            .map_err(|_| Error::Config(format!("{THREADS_ENV} must be a positive integer, got '{v}'"))),
        Err(_) => Ok(None),
    }
}
