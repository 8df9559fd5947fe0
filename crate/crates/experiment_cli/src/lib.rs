//! Configuration-driven experiment runner: TOML configs in, CSV/JSON artifacts and a
//! machine-readable run record out.

pub mod config;
pub mod record;
pub mod run;

pub use config::{parse_config, ConfigErrors, ConfigIssue, ExperimentConfig, ExperimentKind, ModeRef, ModeValue, ModelConfig};
pub use record::{RunRecord, Verdict};
pub use run::{execute, replay_plan, run, run_dir, Outcome};

/// Environment variable naming the default output root.
pub const OUT_ENV: &str = "SATCTL_OUT";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigErrors),
    #[error("{0}")]
    Invalid(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl CliError {
    /// Configuration problems exit with 2; everything else is a failed run.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Invalid(_) => 2,
            CliError::Io(_) => 1,
        }
    }
}
