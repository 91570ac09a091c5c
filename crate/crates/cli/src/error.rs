use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad input files, schemas or arguments (exit 2).
    #[error("{0}")]
    Input(String),
    /// Output was written but some metrics are undefined (exit 3).
    #[error("undefined metrics: {}", .0.join(", "))]
    Undefined(Vec<String>),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Undefined(_) => 3,
        }
    }

    pub fn at(path: &Path, msg: impl std::fmt::Display) -> Self {
        CliError::Input(format!("{}: {msg}", path.display()))
    }
}

impl From<angio_core::Error> for CliError {
    fn from(e: angio_core::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

/// `Err(Undefined)` when any name was collected.
pub fn check_defined(undefined: Vec<String>) -> Result<(), CliError> {
    if undefined.is_empty() {
        Ok(())
    } else {
        Err(CliError::Undefined(undefined))
    }
}
