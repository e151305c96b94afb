//! Report envelope and output plumbing.
//!
//! Every run produces one JSON envelope plus optional CSV series.  With
//! `--out DIR` the envelope lands in `DIR/report.json`, each series in
//! `DIR/<name>.csv`, and stdout carries a one-line verdict; without `--out`
//! the envelope itself is printed to stdout.  Nothing in the output depends
//! on wall-clock time or thread count, so repeated runs are byte-identical.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;

/// Top-level JSON document wrapping a runner's report.
#[derive(Debug, Serialize)]
pub struct Envelope {
    pub tool: &'static str,
    pub version: &'static str,
    /// SHA-256 of the scenario file bytes, hex encoded.
    pub scenario_sha256: String,
    pub seed: u64,
    pub passed: bool,
    pub report: Value,
}

/// One CSV artifact: a name (file stem), a header row, and numeric rows.
#[derive(Debug, Clone)]
pub struct CsvSeries {
    pub name: String,
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvSeries {
    pub fn new(name: &str, headers: Vec<&'static str>) -> Self {
        Self { name: name.to_string(), headers, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.headers)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| format_float(*v)))?;
        }
        Ok(w.into_inner()?)
    }
}

/// Round-trippable decimal form, stable across runs and platforms.
fn format_float(v: f64) -> String {
    format!("{v:?}")
}

/// Outcome of a runner: pass flag, JSON report body, CSV artifacts.
#[derive(Debug)]
pub struct Outcome {
    pub passed: bool,
    pub report: Value,
    pub series: Vec<CsvSeries>,
}

impl Outcome {
    pub fn new(passed: bool, report: Value) -> Self {
        Self { passed, report, series: Vec::new() }
    }

    pub fn with_series(mut self, series: CsvSeries) -> Self {
        self.series.push(series);
        self
    }
}

/// Write or print the envelope and its series.
pub fn emit(kind: &str, out: Option<&Path>, envelope: &Envelope, series: &[CsvSeries]) -> Result<()> {
    let mut json = serde_json::to_string_pretty(envelope).context("serializing report")?;
    json.push('\n');
    match out {
        Some(dir) => {
            fs::create_dir_all(dir)
                .with_context(|| format!("creating output directory {}", dir.display()))?;
            let path = dir.join("report.json");
            fs::write(&path, &json)
                .with_context(|| format!("writing {}", path.display()))?;
            for s in series {
                let path = dir.join(format!("{}.csv", s.name));
                fs::write(&path, s.to_bytes()?)
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            let status = if envelope.passed { "PASS" } else { "FAIL" };
            println!("hig {kind}: {status} (report in {})", dir.display());
        }
        None => print!("{json}"),
    }
    Ok(())
}
