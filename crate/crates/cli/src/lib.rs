//! Batch front-end: configuration, the verification suites and their output.

pub mod commands;
pub mod config;
pub mod output;

pub use config::{Command, ConfigError, Format, Overrides, RunConfig, Settings};
pub use output::{Check, Report, Table};

/// Exit status of a run.
pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INVALID_CONFIG: i32 = 2;

/// Caps the global thread pool at `CQG_THREADS` workers when the variable is set.
pub fn configure_threads() -> Result<(), ConfigError> {
    let Ok(value) = std::env::var("CQG_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| ConfigError(format!("CQG_THREADS = {value:?} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| ConfigError(format!("thread pool: {e}")))
}
