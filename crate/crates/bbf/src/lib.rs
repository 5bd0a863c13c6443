//! Verification suites over `bbf-core`: configuration, reports, and the check registry.

pub mod checks;
pub mod config;
pub mod report;
pub mod suites;

use std::path::PathBuf;

pub use checks::Context;
pub use config::{ConfigError, RunConfig};
pub use report::{Record, Report, Value};
pub use suites::{default_registry, Registry, RegistryError, Suite};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

/// Runs a registered suite under `config`.
pub fn run_suite(registry: &Registry, name: &str, config: RunConfig, threads: Option<usize>) -> Result<Report, ConfigError> {
    let suite = registry.get(name).ok_or_else(|| ConfigError::UnknownSuite(name.into()))?;
    if let Some(s) = &config.suite {
        if s != name {
            return Err(ConfigError::Invalid(format!("config is for suite {s:?}, not {name:?}")));
        }
    }
    let hash = config.hash();
    let ctx = Context::new(config, threads)?;
    Ok(Report::new(name, hash, suite.notes, (suite.run)(&ctx)))
}

/// Output directory: explicit flag, then config, then `bbf-out`.
pub fn output_dir(flag: Option<PathBuf>, config: &RunConfig) -> PathBuf {
    flag.or_else(|| config.output.clone()).unwrap_or_else(|| PathBuf::from("bbf-out"))
}
