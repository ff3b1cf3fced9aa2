//! Batch front end: flags and config file in, PNGs and reports out.

pub mod batch;
pub mod config;

use std::ffi::OsString;

use clap::Parser;

pub use batch::{emit_stats, expand_inputs, plan, run_batch, EXIT_OK, EXIT_PARTIAL, EXIT_USAGE};
pub use config::{Args, Config, Preset, StatsFormat, Sweep, SweepParam, CONFIG_ENV};

/// Bad flags, config or input list.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

/// Parses `args` (program name first), runs the batch and returns the exit
/// status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let env_config = std::env::var_os(CONFIG_ENV).map(Into::into);
    match Config::resolve(args, env_config) {
        Ok(cfg) => run_batch(&cfg),
        Err(e) => {
            eprintln!("tonemap: {e}");
            EXIT_USAGE
        }
    }
}
