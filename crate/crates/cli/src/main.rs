//! Experiment runner for the photonic quantum-GAN simulator.
//!
//! Subcommands reproduce the three experiments (state learning,
//! distribution loading, compressed-image generation) plus heater
//! calibration and an invariant self test. Every command is
//! deterministic for a fixed `--seed`: repeated runs emit byte-identical
//! CSVs.
//!
//! Exit codes: 0 success, 2 usage error, 3 runtime or training failure.

mod commands;
mod config;
mod manifest;
mod output;
mod pgm;
mod svg;

use clap::{Parser, Subcommand};

/// Photonic two-qubit chip simulator and quantum-GAN experiment runner.
#[derive(Parser)]
#[command(name = "photonic-qgan", version, about)]
struct Cli {
    /// JSON config file; command-line flags override its values.
    #[arg(long, global = true)]
    config: Option<std::path::PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train the fully quantum GAN to learn a single-qubit state.
    LearnState(commands::learn_state::Args),
    /// Load a classical distribution with the WGAN-GP loop.
    LoadDistribution(commands::load_distribution::Args),
    /// Train the hybrid generator on compressed digit images.
    GenImages(commands::gen_images::Args),
    /// Fit the heater calibration model to a measured fringe.
    Calibrate(commands::calibrate::Args),
    /// Run the invariant suite and exit non-zero on any failure.
    Selftest,
}

/// Errors that map to the usage exit code (2) rather than the runtime
/// code (3).
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for UsageError {}

fn main() {
    let cli = Cli::parse();
    let file_config = match config::load(cli.config.as_deref()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(2);
        }
    };
    let result = match cli.command {
        Command::LearnState(args) => commands::learn_state::run(args, &file_config),
        Command::LoadDistribution(args) => commands::load_distribution::run(args, &file_config),
        Command::GenImages(args) => commands::gen_images::run(args, &file_config),
        Command::Calibrate(args) => commands::calibrate::run(args, &file_config),
        Command::Selftest => commands::selftest::run(),
    };
    if let Err(e) = result {
        eprintln!("error: {e:#}");
        let code = if e.is::<UsageError>() { 2 } else { 3 };
        std::process::exit(code);
    }
}
