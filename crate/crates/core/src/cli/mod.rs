//! Command-line front end: configuration, experiment orchestration and
//! CSV/SVG output. The binary in `src/bin/invflow.rs` only parses arguments
//! and dispatches here.

pub mod config;
pub mod curves;
pub mod figures;
pub mod run;
pub mod svg;

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex64 as C64;

pub use config::Config;

use crate::error::{Error, Result};

/// Keys accepted by every command.
pub const COMMON_KEYS: &[&str] = &["out", "svg", "seed", "n_grid", "t_end"];

pub(crate) fn check_keys(cfg: &Config, specific: &[&str]) -> Result<()> {
    let allowed: Vec<&str> = COMMON_KEYS.iter().chain(specific).copied().collect();
    cfg.check_keys(&allowed)
}

pub(crate) fn write_file(dir: &Path, name: &str, contents: &str) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(name), contents)?;
    Ok(())
}

/// Rows of numbers from a comma- or whitespace-separated file. Lines that do
/// not parse (headers) and `#` comments are skipped; all data rows must have
/// the same width.
pub fn read_numeric_rows(path: &Path) -> Result<Vec<Vec<f64>>> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: std::result::Result<Vec<f64>, _> =
            line.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).map(str::parse).collect();
        let Ok(fields) = fields else { continue };
        if let Some(first) = rows.first() {
            if first.len() != fields.len() {
                return Err(Error::InvalidInput(format!(
                    "{}: row with {} columns after rows with {}",
                    path.display(),
                    fields.len(),
                    first.len()
                )));
            }
        }
        rows.push(fields);
    }
    if rows.is_empty() {
        return Err(Error::InvalidInput(format!("{}: no numeric rows", path.display())));
    }
    Ok(rows)
}

pub(crate) fn points_csv(header: &str, rows: impl Iterator<Item = Vec<f64>>) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for r in rows {
        let line: Vec<String> = r.iter().map(|v| format!("{v:.12e}")).collect();
        let _ = writeln!(out, "{}", line.join(","));
    }
    out
}

pub(crate) fn xy(z: &[C64]) -> Vec<(f64, f64)> {
    z.iter().map(|z| (z.re, z.im)).collect()
}
