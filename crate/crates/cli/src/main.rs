//! `dtqc`: simulate bichromatically kicked Rydberg-blockaded chains and
//! analyze the quasi-crystalline response in time.
//!
//! Exit codes: 0 success, 2 validation (parameters, config, input schema),
//! 3 i/o, 4 numerical failure.

mod commands;
mod config;
mod error;
mod output;
mod presets;
mod svg;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "dtqc",
    version,
    about = "Kicked Rydberg-chain simulator: time evolution, spectra, phase diagrams",
    after_help = "Exit codes: 0 success, 2 validation error, 3 i/o error, 4 numerical error."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve a driven chain and write observable time series as CSV
    Evolve(commands::evolve::EvolveArgs),
    /// Fourier spectrum with labeled peaks and lifetimes (CSV + JSON, optional SVG)
    Spectrum(commands::spectrum::SpectrumArgs),
    /// (θ, f_L) phase-diagram sweep with long-lifetime classification
    Phasediag(commands::phasediag::PhasediagArgs),
    /// Basis-overlap trajectory heatmap with a column-map JSON
    Heatmap(commands::heatmap::HeatmapArgs),
}

fn main() {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Evolve(args) => commands::evolve::run(args),
        Command::Spectrum(args) => commands::spectrum::run_command(args),
        Command::Phasediag(args) => commands::phasediag::run_command(args),
        Command::Heatmap(args) => commands::heatmap::run_command(args),
    };
    if let Err(error) = result {
        eprintln!("error: {error}");
        std::process::exit(error.exit_code());
    }
}
