//! Experiment CLI: deterministic sweeps, front comparisons, fairness runs,
//! adversarial contrasts and hypervolume reports.
//!
//! Exit codes: 0 success, 1 configuration/validation error, 2 runtime error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use paretofit::experiments::{
    self, emit_outputs, load_config, ExperimentKind, RunOutput, THREADS_ENV,
};
use paretofit::Result;

#[derive(Parser)]
#[command(
    name = "paretofit",
    about = "Pareto-set estimation experiments for multi-objective learning",
    long_about = None,
    after_help = format!("Set {THREADS_ENV} to bound worker threads (default: all cores).")
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// JSON experiment configuration (strict: unknown keys are errors).
    #[arg(long)]
    config: PathBuf,
    /// Output directory for results.csv, summary.json and front.svg.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Sparsity-by-unlabeled sweep of the two-stage excess loss.
    SynthSweep(RunArgs),
    /// Compare estimated Pareto fronts of all methods on one instance.
    FrontCompare(RunArgs),
    /// Fairness-risk trade-off on synthetic or CSV data.
    FairnessRun(RunArgs),
    /// Two-stage vs best-penalty direct regularization on worst-case
    /// covariances.
    AdversarialContrast(RunArgs),
    /// Exact and Monte-Carlo hypervolume of estimated fronts.
    HvReport(RunArgs),
}

fn run(args: &RunArgs, kind: ExperimentKind) -> (Option<Result<RunOutput>>, Option<String>) {
    // Split config/validation failures (exit 1) from runtime ones (exit 2).
    macro_rules! load_and_run {
        ($ty:ty, $validate:expr, $runner:expr) => {{
            let cfg: $ty = match load_config(&args.config, kind) {
                Ok(c) => c,
                Err(e) => return (None, Some(e.to_string())),
            };
            #[allow(clippy::redundant_closure_call)]
            if let Err(e) = $validate(&cfg) {
                return (None, Some(e.to_string()));
            }
            (Some($runner(&cfg)), None)
        }};
    }
    match kind {
        ExperimentKind::SynthSweep => load_and_run!(
            experiments::SynthSweepConfig,
            |c: &experiments::SynthSweepConfig| c.validate(),
            experiments::run_synth_sweep
        ),
        ExperimentKind::FrontCompare => load_and_run!(
            experiments::FrontCompareConfig,
            |c: &experiments::FrontCompareConfig| c.validate(),
            experiments::run_front_compare
        ),
        ExperimentKind::FairnessRun => load_and_run!(
            experiments::FairnessConfig,
            |c: &experiments::FairnessConfig| c.validate(),
            experiments::run_fairness
        ),
        ExperimentKind::AdversarialContrast => load_and_run!(
            experiments::AdversarialConfig,
            |c: &experiments::AdversarialConfig| c.validate(),
            experiments::run_adversarial_contrast
        ),
        ExperimentKind::HvReport => load_and_run!(
            experiments::HvReportConfig,
            |c: &experiments::HvReportConfig| c.validate(),
            experiments::run_hv_report
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (args, kind) = match &cli.command {
        Command::SynthSweep(a) => (a, ExperimentKind::SynthSweep),
        Command::FrontCompare(a) => (a, ExperimentKind::FrontCompare),
        Command::FairnessRun(a) => (a, ExperimentKind::FairnessRun),
        Command::AdversarialContrast(a) => (a, ExperimentKind::AdversarialContrast),
        Command::HvReport(a) => (a, ExperimentKind::HvReport),
    };
    let (outcome, config_error) = run(args, kind);
    if let Some(msg) = config_error {
        eprintln!("configuration error: {msg}");
        return ExitCode::from(1);
    }
    let output = match outcome.expect("runner outcome") {
        Ok(o) => o,
        Err(e) => {
            eprintln!("runtime error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = emit_outputs(&output, &args.out) {
        eprintln!("runtime error: {e}");
        return ExitCode::from(2);
    }
    println!(
        "{}: {} rows -> {}",
        output.experiment,
        output.rows.len(),
        args.out.display()
    );
    ExitCode::SUCCESS
}
