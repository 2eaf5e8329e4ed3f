//! Config-driven experiment runner around the `sopkit` library.
//!
//! A run is a pure function of `(config, seed)`: the resolved config is
//! hashed and written next to the delimited-text outputs, and a manifest
//! records a checksum per file so re-runs can be compared bit for bit.

pub mod config;
pub mod experiments;
pub mod manifest;

use std::path::{Path, PathBuf};

use config::{ExperimentConfig, ExperimentKind};
use manifest::RunManifest;

/// Failure classes mapped onto process exit codes: config errors exit
/// with 2, numerical and integrity failures with 3.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("integrity failure: {0}")]
    Integrity(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) | CliError::Integrity(_) => 3,
        }
    }
}

/// Loads a config, applies flag overrides, and executes the run.
///
/// `forced_kind` is the subcommand's kind, if any; the bare `run`
/// subcommand passes `None` and requires the config to name one.
pub fn run_cli(
    forced_kind: Option<ExperimentKind>,
    config_path: Option<&Path>,
    seed: Option<u64>,
    out: Option<PathBuf>,
) -> Result<RunManifest, CliError> {
    let cfg = config::load(config_path, forced_kind, seed, out)?;
    execute(&cfg)
}

/// Runs the experiment and writes outputs, resolved config, and manifest
/// into the output directory. The directory is created if missing, and
/// the manifest is re-read and verified before returning.
pub fn execute(cfg: &ExperimentConfig) -> Result<RunManifest, CliError> {
    let files = experiments::run_experiment(cfg)?;
    manifest::write_run(cfg, &files)
}
