use std::path::PathBuf;

use thiserror::Error;

/// Process exit codes: configuration problems, data/artifact problems, and
/// numerical failures get distinct codes so scripts can branch on them.
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

/// Anything a pipeline command can fail with.
#[derive(Debug, Error)]
pub enum CliError {
    /// Configuration file, override, or flag problems.
    #[error("configuration error: {0}")]
    Config(String),

    /// Missing, malformed, or unwritable artifacts.
    #[error("data error: {0}")]
    Data(String),

    /// A simulation, training, or optimization step failed numerically.
    #[error("numerical error: {0}")]
    Numerical(String),
}

impl CliError {
    /// File-tagged I/O failure (always a data error).
    pub fn io(path: &std::path::Path, err: std::io::Error) -> Self {
        CliError::Data(format!("{}: {err}", path.display()))
    }

    /// The process exit code this error maps to.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Data(_) => EXIT_DATA,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

impl From<mlqoc_pulse::PulseError> for CliError {
    fn from(e: mlqoc_pulse::PulseError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<mlqoc_device::DeviceError> for CliError {
    fn from(e: mlqoc_device::DeviceError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<mlqoc_model::ModelError> for CliError {
    fn from(e: mlqoc_model::ModelError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<mlqoc_train::TrainError> for CliError {
    fn from(e: mlqoc_train::TrainError) -> Self {
        match e {
            mlqoc_train::TrainError::BadConfig(m) => CliError::Config(m.to_string()),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

/// Convenience for call sites that only have a path at hand.
pub fn data_err(path: PathBuf, msg: impl std::fmt::Display) -> CliError {
    CliError::Data(format!("{}: {msg}", path.display()))
}
