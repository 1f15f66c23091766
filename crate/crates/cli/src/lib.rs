//! Batch experiment harness on top of `polysurf-core`: configuration,
//! the `params`, `surface`, `extremal-sweep` and `verify` commands, and the
//! log-log scaling fit.

mod commands;
mod config;
mod fit;
pub mod fixtures;
mod verify;

pub use commands::{cmd_extremal_sweep, cmd_params, cmd_surface, SweepOutput, SweepSeries};
pub use config::ExperimentConfig;
pub use fit::{fit_scaling, ScalingFit};
pub use verify::{agree, cmd_verify, isoperimetric_profile, Check, VerifyOptions, VerifyReport};

use polysurf_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    /// 1 for usage and input errors, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(
                CoreError::Divergence(_)
                | CoreError::Domain { .. }
                | CoreError::Bracket { .. }
                | CoreError::DegenerateDensity,
            ) => 3,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
