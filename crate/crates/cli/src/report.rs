//! CSV output with self-describing headers.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde_json::Value;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Round-trip float formatting (17 significant digits).
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// A CSV table preceded by `#` header lines and followed by `#` summary
/// lines. Nothing in it depends on the wall clock or the worker count.
pub struct Report {
    command: String,
    config: Value,
    seed: u64,
    digest: Option<String>,
    columns: Vec<String>,
    rows: Vec<Vec<String>>,
    summary: Vec<(String, String)>,
}

impl Report {
    pub fn new(
        command: &str,
        config: Value,
        seed: u64,
        digest: Option<String>,
        columns: &[&str],
    ) -> Self {
        Self {
            command: command.to_string(),
            config,
            seed,
            digest,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            summary: Vec::new(),
        }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    pub fn summary(&mut self, key: &str, value: impl Into<String>) {
        self.summary.push((key.to_string(), value.into()));
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# fraclen {VERSION}");
        let _ = writeln!(out, "# command: {}", self.command);
        let _ = writeln!(out, "# config: {}", self.config);
        let _ = writeln!(out, "# seed: {}", self.seed);
        if let Some(d) = &self.digest {
            let _ = writeln!(out, "# curve_sha256: {d}");
        }
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let _ = writeln!(out, "{}", row.join(","));
        }
        for (k, v) in &self.summary {
            let _ = writeln!(out, "# summary {k}: {v}");
        }
        out
    }

    /// Human-readable summary block.
    pub fn render_summary(&self) -> String {
        let width = self.summary.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        let mut out = format!("{}\n", self.command);
        for (k, v) in &self.summary {
            let _ = writeln!(out, "  {k:<width$}  {v}");
        }
        out
    }
}

pub fn unix_seconds() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

pub fn meta_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".meta");
    PathBuf::from(name)
}

/// Writes the CSV and, next to it, a `.meta` file with run-specific details.
pub fn write_outputs(output: &Path, report: &Report, meta: &Value) -> Result<()> {
    std::fs::write(output, report.render())
        .with_context(|| format!("cannot write '{}'", output.display()))?;
    let meta_file = meta_path(output);
    let text = serde_json::to_string_pretty(meta).context("cannot encode run metadata")?;
    std::fs::write(&meta_file, text + "\n")
        .with_context(|| format!("cannot write '{}'", meta_file.display()))?;
    Ok(())
}
