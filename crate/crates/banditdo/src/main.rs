//! Command-line front end for the experiment harness.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use banditdo::harness::{preset, run_experiment, ExperimentConfig, RunOutcome, PRESET_NAMES};
use banditdo::{plot, Result};

/// Output directory override, consulted only when `--out` is absent.
const OUT_ENV: &str = "BANDITDO_OUT";

/// Fraction of failed replications above which `run` exits nonzero.
const FAILURE_THRESHOLD: f64 = 0.20;

#[derive(Parser)]
#[command(name = "banditdo", version, about = "Bandit data-driven optimization experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a built-in preset or a config file.
    Run(RunArgs),
    /// Render an aggregate CSV as an SVG chart.
    Plot(PlotArgs),
    /// List the built-in preset names.
    Presets,
}

#[derive(Args)]
struct RunArgs {
    /// Built-in preset name (see `presets`).
    #[arg(long, conflicts_with = "config", required_unless_present = "config")]
    preset: Option<String>,

    /// Experiment config JSON; a manifest written by a previous run also
    /// works.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Master seed override.
    #[arg(long)]
    seed: Option<u64>,

    /// Replication count override.
    #[arg(long)]
    reps: Option<usize>,

    /// Output directory override.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Worker thread count for replication-level parallelism.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct PlotArgs {
    /// Aggregate CSV produced by `run`.
    #[arg(long = "in")]
    input: PathBuf,

    /// Output SVG path.
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(if err.is_config_error() { 1 } else { 2 })
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Run(args) => run(args),
        Command::Plot(args) => {
            plot::plot_file(&args.input, &args.out)?;
            println!("wrote {}", args.out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Presets => {
            for name in PRESET_NAMES {
                println!("{name}");
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn run(args: RunArgs) -> Result<ExitCode> {
    let mut config = match (&args.preset, &args.config) {
        (Some(name), None) => preset(name)?,
        (None, Some(path)) => ExperimentConfig::load(path)?,
        _ => unreachable!("clap enforces exactly one config source"),
    };
    if let Some(seed) = args.seed {
        config.master_seed = seed;
    }
    if let Some(reps) = args.reps {
        config.replications = reps;
    }
    if let Some(out) = args.out {
        config.output_dir = Some(out);
    } else if let Some(dir) = std::env::var_os(OUT_ENV).filter(|v| !v.is_empty()) {
        config.output_dir = Some(PathBuf::from(dir));
    }
    if let Some(workers) = args.workers {
        config.workers = Some(workers);
    }

    let outcome = run_experiment(&config)?;
    report(&config, &outcome);
    if outcome.failed_fraction() > FAILURE_THRESHOLD {
        eprintln!(
            "error: {} of {} replications failed",
            outcome.failures.len(),
            config.replications
        );
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

fn report(config: &ExperimentConfig, outcome: &RunOutcome) {
    println!(
        "{}: {} replications, {} trace files",
        config.name,
        outcome.replications_completed,
        outcome.trace_paths.len()
    );
    println!("aggregate: {}", outcome.aggregate_path.display());
    println!("manifest: {}", outcome.manifest_path.display());
    for failure in &outcome.failures {
        eprintln!(
            "replication {} failed: {}",
            failure.replication, failure.message
        );
    }
}
