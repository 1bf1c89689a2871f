//! Output plumbing: stdout emission, artifact files, and the run manifest.
//!
//! Every run prints its primary artifact to stdout. When an output
//! directory is configured the same bytes are written to files there, and
//! the run closes with a `manifest.json` recording the command line,
//! resolved parameters, seeds, tolerances, and the files written — enough
//! to re-run the command and diff the outputs byte for byte.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::time::Instant;

use betaxp_core::ToleranceConfig;
use serde_json::{json, Value};

/// Reals in CSV cells: scientific, 17 significant digits, '.' decimal —
/// wide enough that parsing the text recovers the exact double.
pub fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

pub struct RunContext {
    out_dir: Option<PathBuf>,
    argv: Vec<String>,
    started: Instant,
    outputs: Vec<String>,
}

impl RunContext {
    pub fn new(out_dir: Option<PathBuf>) -> io::Result<Self> {
        if let Some(dir) = &out_dir {
            fs::create_dir_all(dir)?;
        }
        Ok(RunContext {
            out_dir,
            argv: std::env::args().skip(1).collect(),
            started: Instant::now(),
            outputs: Vec::new(),
        })
    }

    fn write_artifact(&mut self, name: &str, bytes: &str) -> io::Result<()> {
        if let Some(dir) = &self.out_dir {
            fs::write(dir.join(name), bytes)?;
            self.outputs.push(name.to_string());
        }
        Ok(())
    }

    /// CSV table: header plus rows, to stdout and to `<name>.csv`.
    pub fn table(&mut self, name: &str, header: &str, rows: &[String]) -> io::Result<()> {
        let mut text = String::with_capacity(rows.len() * 32 + header.len() + 1);
        text.push_str(header);
        text.push('\n');
        for row in rows {
            text.push_str(row);
            text.push('\n');
        }
        io::stdout().write_all(text.as_bytes())?;
        self.write_artifact(&format!("{name}.csv"), &text)
    }

    /// CSV artifact that only lands in the output directory (secondary
    /// tables for commands whose stdout is a JSON report).
    pub fn side_table(&mut self, name: &str, header: &str, rows: &[String]) -> io::Result<()> {
        let mut text = String::with_capacity(rows.len() * 32 + header.len() + 1);
        text.push_str(header);
        text.push('\n');
        for row in rows {
            text.push_str(row);
            text.push('\n');
        }
        self.write_artifact(&format!("{name}.csv"), &text)
    }

    /// JSON report to stdout and to `summary.json`.
    pub fn report(&mut self, value: &Value) -> io::Result<()> {
        let text = format!("{}\n", serde_json::to_string_pretty(value)?);
        io::stdout().write_all(text.as_bytes())?;
        self.write_artifact("summary.json", &text)
    }

    /// JSON summary written to `summary.json` only (for commands whose
    /// stdout is the CSV table).
    pub fn summary(&mut self, value: &Value) -> io::Result<()> {
        let text = format!("{}\n", serde_json::to_string_pretty(value)?);
        self.write_artifact("summary.json", &text)
    }

    /// Closes the run: writes `manifest.json` when an output directory is
    /// configured. The manifest is the only artifact carrying wall-clock
    /// data, so every other output stays byte-stable across runs.
    pub fn finish(
        mut self,
        params: Value,
        seeds: &[u64],
        tol: &ToleranceConfig,
    ) -> io::Result<()> {
        if self.out_dir.is_none() {
            return Ok(());
        }
        let manifest = json!({
            "argv": self.argv,
            "params": params,
            "version": env!("CARGO_PKG_VERSION"),
            "timestamp": chrono::Utc::now().to_rfc3339(),
            "seeds": seeds,
            "tolerances": tol,
            "duration_seconds": self.started.elapsed().as_secs_f64(),
            "outputs": self.outputs,
        });
        let text = format!("{}\n", serde_json::to_string_pretty(&manifest)?);
        self.write_artifact("manifest.json", &text)
    }
}
