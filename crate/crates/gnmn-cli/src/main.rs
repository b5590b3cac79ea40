//! Command-line front end: scenario simulation, degree distributions,
//! census sampling, and empirical-vs-model comparison.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

/// Exit codes by failure class.
const EXIT_CONFIG: u8 = 2;
const EXIT_INGEST: u8 = 3;
const EXIT_RUNTIME: u8 = 4;

#[derive(Parser)]
#[command(
    name = "gnmn-cli",
    version,
    about = "Distance-modulated epidemics on geometric networks of mobile nodes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample census populations and allocate migrated cohorts.
    Sample {
        /// Population CSV (region,total_population,migrated_population).
        #[arg(long)]
        population: PathBuf,
        /// Standard-normal quantile.
        #[arg(long, default_value_t = 2.576)]
        z: f64,
        /// Sampling proportion.
        #[arg(long, default_value_t = 0.03)]
        p: f64,
        /// Margin of error.
        #[arg(long, default_value_t = 0.005)]
        e: f64,
        /// Output JSON report path (defaults to stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one epidemic scenario and emit trajectory, metrics, manifest.
    Simulate {
        /// Scenario config JSON.
        #[arg(long)]
        config: PathBuf,
        /// Override the config seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory.
        #[arg(long, env = "GNMN_OUT_DIR", default_value = ".")]
        out: PathBuf,
        /// Also write per-tick contact snapshots.
        #[arg(long)]
        snapshots: bool,
        /// Emit a gnuplot script next to the data.
        #[arg(long)]
        plot_script: bool,
    },
    /// Run mobility only and emit the contact-degree histogram.
    DegreeHist {
        /// Scenario config JSON.
        #[arg(long)]
        config: PathBuf,
        /// Override the config seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Histogram bin width (contact count).
        #[arg(long, default_value_t = 50)]
        bin_width: u64,
        /// Output directory.
        #[arg(long, env = "GNMN_OUT_DIR", default_value = ".")]
        out: PathBuf,
        /// Emit a gnuplot script next to the data.
        #[arg(long)]
        plot_script: bool,
    },
    /// Align an empirical R_t estimate with a simulated R_t series.
    Compare {
        /// Case CSV (date,confirmed,recovered).
        #[arg(long)]
        cases: PathBuf,
        /// Trajectory CSV from a simulate run.
        #[arg(long)]
        trajectory: PathBuf,
        /// Estimator window, days.
        #[arg(long, default_value_t = 7)]
        window: u32,
        /// Output CSV path (defaults to stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Sample {
            population,
            z,
            p,
            e,
            out,
        } => commands::sample::run(&population, z, p, e, out.as_deref()),
        Command::Simulate {
            config,
            seed,
            out,
            snapshots,
            plot_script,
        } => commands::simulate::run(&config, seed, &out, snapshots, plot_script),
        Command::DegreeHist {
            config,
            seed,
            bin_width,
            out,
            plot_script,
        } => commands::degree_hist::run(&config, seed, bin_width, &out, plot_script),
        Command::Compare {
            cases,
            trajectory,
            window,
            out,
        } => commands::compare::run(&cases, &trajectory, window, out.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(err.exit_code())
        }
    }
}

/// Error wrapper that remembers which failure class it belongs to.
#[derive(Debug)]
pub struct CliError {
    class: ErrorClass,
    source: anyhow::Error,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ErrorClass {
    Config,
    Ingest,
    Runtime,
}

impl CliError {
    pub fn config(source: impl Into<anyhow::Error>) -> Self {
        Self {
            class: ErrorClass::Config,
            source: source.into(),
        }
    }

    pub fn ingest(source: impl Into<anyhow::Error>) -> Self {
        Self {
            class: ErrorClass::Ingest,
            source: source.into(),
        }
    }

    pub fn runtime(source: impl Into<anyhow::Error>) -> Self {
        Self {
            class: ErrorClass::Runtime,
            source: source.into(),
        }
    }

    fn exit_code(&self) -> u8 {
        match self.class {
            ErrorClass::Config => EXIT_CONFIG,
            ErrorClass::Ingest => EXIT_INGEST,
            ErrorClass::Runtime => EXIT_RUNTIME,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.source)
    }
}

impl std::error::Error for CliError {}
