use std::path::PathBuf;

use thiserror::Error;

/// Failures of a CLI run, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read config {path}: {source}")]
    ReadConfig {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("invalid config: {0}")]
    Config(String),

    #[error("unknown check suite `{0}` (expected one of: {known})", known = crate::check::SUITES.join(", "))]
    UnknownSuite(String),

    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] svfractal_core::Error),
}

impl CliError {
    /// 2 for invalid input, 3 for numerical failures, 4 when a capacity
    /// budget is exceeded, 1 for I/O trouble.
    pub fn exit_code(&self) -> i32 {
        use svfractal_core::Error as E;
        match self {
            CliError::ReadConfig { .. } | CliError::Write { .. } => 1,
            CliError::Config(_) | CliError::UnknownSuite(_) => 2,
            CliError::Core(e) => match e {
                E::CapacityExceeded(_) => 4,
                E::NoConvergence { .. } | E::DegreeCapExceeded { .. } | E::DegenerateFit(_) => 3,
                E::Csv(_) => 1,
                _ => 2,
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
