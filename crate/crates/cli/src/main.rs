//! `hig`: desk-scale measurements on intrinsic graphs in Heisenberg groups.
//!
//! Every subcommand reads one JSON scenario and emits one JSON report
//! (plus CSV series for sampled quantities).  Exit codes: 0 when all gates
//! pass, 1 when a measurement misses a gate, 2 on invalid input (bad
//! flags, malformed or mismatched scenarios, construction failures).

mod report;
mod reproduce;
mod runners;
mod scenario;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use sha2::{Digest, Sha256};

use report::{emit, Envelope};
use scenario::Scenario;

#[derive(Parser)]
#[command(name = "hig", version, about = "Calculus of intrinsic graphs in Heisenberg groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Scenario file (JSON).
    #[arg(long)]
    scenario: PathBuf,
    /// Directory for report.json and CSV series; JSON goes to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Gate for the scenario's tolerance-driven checks.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Worker threads; defaults to all cores.  Results do not depend on it.
    #[arg(long)]
    jobs: Option<usize>,
    /// Seed for randomized batteries.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Measure graph area over a window, optionally under dilations.
    Area(RunArgs),
    /// Diagnose a characteristic chart: admissibility, domain, inversion.
    Chars(RunArgs),
    /// First and second variation over a bump battery.
    Vary(RunArgs),
    /// Check a horizontal section as a calibration of a graph.
    Calibrate(RunArgs),
    /// Rigidity verdict for entire stationary graphs built from initial data.
    Bernstein(RunArgs),
    /// Run the pinned example battery.
    Reproduce(RunArgs),
}

impl Command {
    /// Scenario kind this subcommand accepts, plus the shared flags.
    fn split(&self) -> (&'static str, &RunArgs) {
        match self {
            Command::Area(a) => ("area", a),
            Command::Chars(a) => ("characteristics", a),
            Command::Vary(a) => ("variation", a),
            Command::Calibrate(a) => ("calibration", a),
            Command::Bernstein(a) => ("bernstein", a),
            Command::Reproduce(a) => ("reproduce", a),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = cli.command.split();
    match execute(kind, args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("hig: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn execute(kind: &'static str, args: &RunArgs) -> Result<bool> {
    if !(args.tol > 0.0) || !args.tol.is_finite() {
        bail!("--tol must be positive and finite, got {}", args.tol);
    }
    if let Some(jobs) = args.jobs {
        if jobs == 0 {
            bail!("--jobs must be at least 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .context("thread pool configuration")?;
    }

    let bytes = fs::read(&args.scenario)
        .with_context(|| format!("reading scenario {}", args.scenario.display()))?;
    let scenario_sha256 = hex(&Sha256::digest(&bytes));
    let scenario: Scenario = serde_json::from_slice(&bytes)
        .with_context(|| format!("parsing scenario {}", args.scenario.display()))?;
    if scenario.kind() != kind {
        bail!("scenario has kind '{}', but this subcommand expects '{kind}'", scenario.kind());
    }

    // CSV payloads named by a scenario resolve relative to the scenario file.
    let base = args.scenario.parent().unwrap_or_else(|| Path::new("."));
    let outcome = match &scenario {
        Scenario::Area(s) => runners::run_area(s, base, args.tol)?,
        Scenario::Characteristics(s) => runners::run_chars(s, base, args.tol)?,
        Scenario::Variation(s) => runners::run_vary(s, base, args.tol, args.seed)?,
        Scenario::Calibration(s) => runners::run_calibrate(s, base)?,
        Scenario::Bernstein(s) => runners::run_bernstein(s, base, args.tol)?,
        Scenario::Reproduce(s) => reproduce::run_reproduce(s)?,
    };

    let envelope = Envelope {
        tool: "hig",
        version: env!("CARGO_PKG_VERSION"),
        scenario_sha256,
        seed: args.seed,
        passed: outcome.passed,
        report: outcome.report,
    };
    emit(kind, args.out.as_deref(), &envelope, &outcome.series)?;
    Ok(outcome.passed)
}

fn hex(bytes: &[u8]) -> String {
    use std::fmt::Write;
    let mut s = String::with_capacity(2 * bytes.len());
    for b in bytes {
        let _ = write!(s, "{b:02x}");
    }
    s
}
