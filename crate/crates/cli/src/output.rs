//! Artifact writers. All output is byte-deterministic: fixed column
//! orders, shortest-round-trip float formatting, ordered rows, and a
//! trailing newline on every file.

use std::fs;
use std::path::Path;

use bribesim_core::chain::{write_jsonl, TranscriptEvent};
use bribesim_core::econ::HeatmapCell;
use serde::Serialize;

use crate::config::RunConfig;
use crate::CliError;

/// Fixed header of every sweep CSV.
pub const CSV_HEADER: &str = "alpha,beta_or_alpha_star,value,feasible";

/// Envelope wrapping every JSON report with its schema tag and provenance.
#[derive(Debug, Serialize)]
pub struct Envelope<'a, T: Serialize> {
    /// Schema identifier, versioned independently of the crate.
    pub schema: &'static str,
    /// Seed echoed from the command line.
    pub seed: u64,
    /// The full run configuration the report was produced under.
    pub config: &'a RunConfig,
    /// The report body.
    pub report: T,
}

/// Renders sweep cells as CSV under the fixed header.
pub fn csv_from_cells(cells: &[HeatmapCell]) -> String {
    let mut text = String::with_capacity(cells.len() * 32 + CSV_HEADER.len() + 1);
    text.push_str(CSV_HEADER);
    text.push('\n');
    for cell in cells {
        text.push_str(&format!(
            "{},{},{},{}\n",
            cell.alpha, cell.beta_or_alpha_star, cell.value, cell.feasible
        ));
    }
    text
}

/// Writes a string artifact, reporting the path in errors.
pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text)
        .map_err(|e| CliError::Runtime(anyhow::anyhow!("cannot write {}: {e}", path.display())))
}

/// Writes a pretty-printed JSON report with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, envelope: &Envelope<'_, T>) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(envelope)
        .map_err(|e| CliError::Runtime(anyhow::anyhow!("cannot encode {}: {e}", path.display())))?;
    text.push('\n');
    write_text(path, &text)
}

/// Writes a chain transcript as JSON lines.
pub fn write_transcript(path: &Path, events: &[TranscriptEvent]) -> Result<(), CliError> {
    let mut buffer = Vec::new();
    write_jsonl(events, &mut buffer)
        .map_err(|e| CliError::Runtime(anyhow::anyhow!("cannot encode {}: {e}", path.display())))?;
    fs::write(path, buffer)
        .map_err(|e| CliError::Runtime(anyhow::anyhow!("cannot write {}: {e}", path.display())))
}
