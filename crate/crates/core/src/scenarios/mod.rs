//! Presets, scenario files, data export and the verification suites.

pub mod config;
pub mod csv;
pub mod manifest;
pub mod plot;
pub mod presets;
pub mod runner;
pub mod verify;

pub use config::{parse_config, read_config, write_config, RunSettings, ScenarioFile};
pub use presets::{preset, Pipeline, Preset, PRESET_NAMES};
pub use runner::{run_preset, simulate, Overrides, Resolved, RunSummary, SpatialRun, TwoExcitationRun};
pub use verify::{verify, Check, Scope, VerificationReport};

use crate::error::{Error, Result};

pub const THREADS_ENV: &str = "WQSIM_THREADS";

/// Worker count from `WQSIM_THREADS`, or `None` to use every core.
pub fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::InvalidArgument(format!(
                "{THREADS_ENV} must be a positive integer (got `{v}`)"
            ))),
        },
    }
}

/// A rayon pool sized by `WQSIM_THREADS`.
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads_from_env()? {
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))
}
