//! CSV report files.
//!
//! Every CSV this tool writes starts with a `#`-prefixed provenance line
//! carrying the effective configuration hash and the seeds involved, so a
//! result file can always be traced back to the exact run that produced it.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::CliError;

/// Builds the provenance comment line.
pub fn provenance_line(config_hash: &str, seeds: &[(&str, u64)]) -> String {
    let mut line = format!("# config_hash={config_hash}");
    for (name, value) in seeds {
        let _ = write!(line, " {name}={value}");
    }
    line.push('\n');
    line
}

/// Writes a CSV: provenance line, then header, then rows.
pub fn write_csv(
    path: &Path,
    provenance: &str,
    header: &str,
    rows: &[String],
) -> Result<(), CliError> {
    let mut text = String::with_capacity(provenance.len() + header.len() + rows.len() * 64);
    text.push_str(provenance);
    text.push_str(header);
    if !header.ends_with('\n') {
        text.push('\n');
    }
    for row in rows {
        text.push_str(row);
        if !row.ends_with('\n') {
            text.push('\n');
        }
    }
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}
