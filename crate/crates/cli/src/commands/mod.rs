pub mod agree;
pub mod augment;
pub mod detect;
pub mod seg;
pub mod severity;

use std::path::Path;

use crate::error::{check_defined, CliError};
use crate::json;
use crate::io;
use crate::report::RunReport;

/// Writes an output document to `path` (or stdout) and records it.
fn write_output(report: &mut RunReport, path: Option<&Path>, text: &str) -> Result<(), CliError> {
    io::emit(path, text)?;
    if let Some(p) = path {
        report.output(p, text.as_bytes());
    }
    Ok(())
}

/// Reads a JSON document and records it as an input.
fn read_input<T: serde::de::DeserializeOwned>(report: &mut RunReport, path: &Path) -> Result<T, CliError> {
    let bytes = io::read_bytes(path)?;
    report.input(path, &bytes);
    serde_json::from_slice(&bytes).map_err(|e| CliError::at(path, format!("schema violation: {e}")))
}

/// Writes a JSON document, then fails with exit 3 if it contains nulls.
fn write_json<T: serde::Serialize>(report: &mut RunReport, path: Option<&Path>, value: &T) -> Result<(), CliError> {
    write_output(report, path, &json::to_string(value)?)?;
    check_defined(json::null_paths(value)?)
}
