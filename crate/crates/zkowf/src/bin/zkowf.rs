//! Command-line front end for the experiment harness.
//!
//! Each subcommand runs one experiment kind from a config file; `report`
//! re-renders an archived result. Results are pure functions of
//! `(config, seed)` and can be archived under a content-addressed
//! directory with `--out`.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use zkowf::harness::{
    archive_result, emit_report, run_experiment, ExperimentConfig, ReportFormat, Verdict,
};

#[derive(Parser)]
#[command(name = "zkowf", version, about = "Inverter-to-decider reduction experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config file.
    #[arg(long)]
    config: PathBuf,
    /// Seed for all randomness in the run.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Override `trials.n` from the config.
    #[arg(long)]
    trials: Option<u64>,
    /// Override `mode` from the config (`exact` or `sampled`).
    #[arg(long)]
    mode: Option<String>,
    /// Archive the result under `<out>/<content-address>/`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report format: `json`, `csv`, or `table`.
    #[arg(long, default_value = "table")]
    format: String,
}

#[derive(Subcommand)]
enum Command {
    /// Measure the exact error profile of a protocol.
    Measure(RunArgs),
    /// Build a candidate function and check its output shape.
    Construct(RunArgs),
    /// Run an inversion oracle against its candidate.
    Invert(RunArgs),
    /// Run a reduction and check its acceptance bounds.
    Reduce(RunArgs),
    /// Run the one-sided decider built from a reduction.
    Decide(RunArgs),
    /// Re-render an archived result.
    Report {
        /// A `result.json` produced by a run.
        #[arg(long)]
        input: PathBuf,
        /// Report format: `json`, `csv`, or `table`.
        #[arg(long, default_value = "table")]
        format: String,
    },
}

fn run(args: &RunArgs, kind: &str) -> zkowf::Result<Verdict> {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    // The subcommand decides the experiment; the config's own
    // `experiment.kind` is only a default for library callers.
    cfg.set("experiment.kind", kind);
    if let Some(t) = args.trials {
        cfg.set("trials.n", &t.to_string());
    }
    if let Some(m) = &args.mode {
        cfg.set("mode", m);
    }
    let format: ReportFormat = args.format.parse()?;
    let result = run_experiment(&cfg, args.seed)?;
    print!("{}", emit_report(&result, format)?);
    if let Some(out) = &args.out {
        let dir = archive_result(out, &result)?;
        eprintln!("archived: {}", dir.display());
    }
    Ok(result.verdict)
}

fn report(input: &PathBuf, format: &str) -> zkowf::Result<Verdict> {
    let format: ReportFormat = format.parse()?;
    let text = std::fs::read_to_string(input)?;
    let result: zkowf::harness::ExperimentResult = serde_json::from_str(&text)
        .map_err(|e| zkowf::Error::Parse { line: 0, msg: e.to_string() })?;
    print!("{}", emit_report(&result, format)?);
    Ok(result.verdict)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Measure(a) => run(a, "measure"),
        Command::Construct(a) => run(a, "construct"),
        Command::Invert(a) => run(a, "invert"),
        Command::Reduce(a) => run(a, "reduce"),
        Command::Decide(a) => run(a, "decide"),
        Command::Report { input, format } => report(input, format),
    };
    match outcome {
        Ok(Verdict::BoundHolds) => ExitCode::SUCCESS,
        Ok(Verdict::Inconclusive) => ExitCode::from(2),
        Ok(Verdict::BoundViolated) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
