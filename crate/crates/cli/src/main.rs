//! Batch front-end: `semiwave <analyze|radiation|reduce|simulate|compare>`
//! wiring a JSON run configuration to the library.
//!
//! Exit codes: 0 success, 2 configuration error, 3 runtime assertion
//! failure, 4 missing inputs.

mod commands;
mod config;

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "semiwave", version, about = "Semilinear wave-system laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, clap::Args)]
struct CommonArgs {
    /// Run configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the config's `outputs`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: logical cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Override a config field, e.g. --set grid.h=0.5 (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Null-condition check, Alinhac verification, spectral classification.
    Analyze(CommonArgs),
    /// Radiation fields and the translation-representation isometry.
    Radiation(CommonArgs),
    /// Integrate the reduced characteristic system.
    Reduce(CommonArgs),
    /// Run the 3D finite-difference solver.
    Simulate(CommonArgs),
    /// Compare a finished run against the asymptotic predictions.
    Compare(CommonArgs),
}

/// Error carrying the process exit code.
pub enum CmdError {
    Config(String),
    Runtime(String),
    MissingInputs(String),
}

impl CmdError {
    fn code(&self) -> u8 {
        match self {
            CmdError::Config(_) => 2,
            CmdError::Runtime(_) => 3,
            CmdError::MissingInputs(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CmdError::Config(m) | CmdError::Runtime(m) | CmdError::MissingInputs(m) => m,
        }
    }
}

impl From<config::ConfigError> for CmdError {
    fn from(e: config::ConfigError) -> Self {
        CmdError::Config(e.to_string())
    }
}

impl From<std::io::Error> for CmdError {
    fn from(e: std::io::Error) -> Self {
        CmdError::Runtime(format!("i/o error: {e}"))
    }
}

fn run(args: &CommonArgs, body: impl FnOnce(&config::RunConfig) -> Result<(), CmdError>) -> ExitCode {
    if let Some(threads) = args.threads {
        // Ignore failure: the global pool may already exist in tests.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    let cfg = match config::load_config(&args.config, args.out.as_deref(), &args.sets) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = std::fs::create_dir_all(&cfg.out_dir) {
        eprintln!("cannot create output directory: {e}");
        return ExitCode::from(3);
    }
    match body(&cfg) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Analyze(a) => run(a, commands::analyze::run),
        Command::Radiation(a) => run(a, commands::radiation::run),
        Command::Reduce(a) => run(a, commands::reduce::run),
        Command::Simulate(a) => run(a, commands::simulate::run),
        Command::Compare(a) => run(a, commands::compare::run),
    }
}
