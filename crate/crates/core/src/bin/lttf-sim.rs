//! Runs a simulation sweep and writes the aggregated table.
//!
//! Exit codes: 0 on success, 1 on I/O or internal errors, 2 on a bad config,
//! 3 when every topology was infeasible under every model.

use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use lttf::experiment::{emit_results, run_experiment, write_results, ExperimentConfig, ExperimentError, OutputFormat};

#[derive(Debug, Parser)]
#[command(name = "lttf-sim", version, about = "Scheduling sweeps over random wireless deployments")]
struct Args {
    /// JSON experiment config; defaults are used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
    /// Master seed, overrides the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Largest node count solved exhaustively, overrides the config.
    #[arg(long)]
    exhaustive_guard: Option<usize>,
}

fn run(args: Args) -> Result<ExitCode, ExperimentError> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::from_path(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = args.seed {
        cfg.master_seed = seed;
    }
    if let Some(guard) = args.exhaustive_guard {
        cfg.exhaustive_guard = guard;
    }
    cfg.validate()?;

    let results = run_experiment(&cfg)?;
    match &args.out {
        Some(path) => emit_results(&results, path, args.format)?,
        None => write_results(&results, io::stdout().lock(), args.format)?,
    }
    if results.all_infeasible() {
        eprintln!("lttf-sim: every topology was infeasible");
        return Ok(ExitCode::from(3));
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(args) {
        Ok(code) => code,
        Err(e @ ExperimentError::Config(_)) => {
            eprintln!("lttf-sim: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("lttf-sim: {e}");
            ExitCode::from(1)
        }
    }
}
