//! `multiphase` command-line driver.
//!
//! Exit codes: 0 success, 1 numerical failure, 2 configuration failure.
//! `MULTIPHASE_THREADS` sets the worker count for parallel studies.

mod analyze;
mod converge;
mod error;
mod model_args;
mod simulate;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use multiphase::config::ModelFile;
use multiphase::model::{preset, preset_summary, PRESET_NAMES};

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "multiphase", version, about = "Volume-filling multiphase cross-diffusion toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the finite-volume scheme and write trajectory/diagnostics CSVs.
    Simulate(simulate::SimulateArgs),
    /// Structural checks: lattice scans, drag classification, perturbation threshold.
    Analyze(analyze::AnalyzeArgs),
    /// Classify raw drag and pressure coefficients.
    Classify(analyze::ClassifyArgs),
    /// Mesh-refinement study against a fine reference run.
    Converge(converge::ConvergeArgs),
    /// List the built-in models.
    Presets {
        /// Print the full definition of one preset.
        #[arg(long)]
        show: Option<String>,
    },
    /// Print A, K, K^-1, h_B'', G at one state.
    Matrix(analyze::MatrixArgs),
}

fn presets(show: Option<&str>) -> Result<(), CliError> {
    match show {
        None => {
            for name in PRESET_NAMES {
                println!("{name:<22} {}", preset_summary(name).unwrap_or(""));
            }
        }
        Some(name) => {
            let spec = preset(name)?;
            println!("{}", preset_summary(spec.name.as_str()).unwrap_or(""));
            println!("{spec}");
            println!();
            print!("{}", ModelFile::from_spec(&spec).to_toml());
        }
    }
    Ok(())
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("MULTIPHASE_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .map_err(|_| CliError::config(format!("MULTIPHASE_THREADS must be a positive integer (got `{v}`)")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(CliError::config)
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    match cli.command {
        Command::Simulate(a) => simulate::simulate(&a),
        Command::Analyze(a) => analyze::analyze(&a),
        Command::Classify(a) => analyze::classify(&a),
        Command::Converge(a) => converge::converge(&a),
        Command::Presets { show } => presets(show.as_deref()),
        Command::Matrix(a) => analyze::matrix(&a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
