use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use tracelab::experiments::{run, Experiment, ExperimentConfig, Report};

#[derive(Parser)]
#[command(name = "tracelab", version, about = "Distribution experiments for trace functions over finite fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Record wall time in the report (makes output non-reproducible).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Density of S(t, I + x) over all shifts x.
    EquidistShift(ExperimentConfig),
    /// Density of partial sums over the intervals {1..k}, 1 <= k <= p.
    PartialIntervals(ExperimentConfig),
    /// Density of S(t, E + x) for a small set E.
    ShiftSubsets(ExperimentConfig),
    /// Partial intervals in the first coordinate, shifted sets in the others.
    PartialIntervalShifts(ExperimentConfig),
    /// Averaged variance of a family of sums against the model.
    Variance(ExperimentConfig),
    /// Random walk law on the trace of a finite group.
    Model(ExperimentConfig),
    /// Gaussian sums over a finite group, closed form and enumeration.
    GaussSum(ExperimentConfig),
    /// Re-run the experiment echoed in a report or config JSON file.
    Replay {
        path: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        workers: Option<usize>,
    },
}

fn resolve(command: Command) -> Result<(Experiment, ExperimentConfig), String> {
    Ok(match command {
        Command::EquidistShift(c) => (Experiment::EquidistShift, c),
        Command::PartialIntervals(c) => (Experiment::PartialIntervals, c),
        Command::ShiftSubsets(c) => (Experiment::ShiftSubsets, c),
        Command::PartialIntervalShifts(c) => (Experiment::PartialIntervalShifts, c),
        Command::Variance(c) => (Experiment::Variance, c),
        Command::Model(c) => (Experiment::Model, c),
        Command::GaussSum(c) => (Experiment::GaussSum, c),
        Command::Replay { path, out, workers } => {
            let text = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
            let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
            let echoed = value.get("config").unwrap_or(&value);
            let (exp, mut cfg) = ExperimentConfig::from_echo(echoed).map_err(|e| e.to_string())?;
            cfg.out = out;
            cfg.workers = workers;
            (exp, cfg)
        }
    })
}

fn emit(report: &Report, cfg: &ExperimentConfig) -> Result<(), String> {
    match &cfg.out {
        Some(dir) => {
            report.save(dir).map_err(|e| e.to_string())?;
            eprintln!("wrote {}", dir.join("report.json").display());
        }
        None => println!("{}", report.to_json().map_err(|e| e.to_string())?),
    }
    for w in report.warnings() {
        eprintln!("warning: {} not satisfied ({})", w.name, w.detail);
    }
    for v in report.summary.verdicts.iter().filter(|v| v.exact && !v.passed) {
        eprintln!("FAILED: {} ({})", v.name, v.detail);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (experiment, cfg) = match resolve(cli.command) {
        Ok(x) => x,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let start = Instant::now();
    let mut report = match run(experiment, &cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if cli.timing {
        report.timing = Some(start.elapsed().as_secs_f64());
    }
    if let Err(e) = emit(&report, &cfg) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(report.exit_code() as u8)
}
