use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use concap::cli::{
    self, condense_csv, run_capacity, run_condense, run_maximize, run_sweep, sweep_csv,
    ExperimentConfig,
};
use concap::cli::tables::{run_table, TableOptions};

/// Conformal capacity of disk constellations in the unit disk: boundary
/// integral equation solver plus constrained capacity maximization.
#[derive(Parser)]
#[command(name = "concap", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the capacity of the configured constellation.
    Capacity {
        #[arg(long)]
        config: PathBuf,
        /// Override the discretization size per boundary component.
        #[arg(long)]
        n: Option<usize>,
        /// Output path for the JSON record (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Maximize capacity over disk centers under the configured constraint.
    Maximize {
        #[arg(long)]
        config: PathBuf,
        /// Override the multistart seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the number of random starts.
        #[arg(long)]
        starts: Option<usize>,
        /// Override the search discretization size.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep the capacity of two equal disks over their separation.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Condense an m-disk ring into one disk of equal capacity and compare
    /// hyperbolic areas and perimeters over a radius grid.
    Condense {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a canned reference experiment and compare against embedded data.
    Table {
        /// Table id, 1 through 7.
        #[arg(long)]
        id: u8,
        #[arg(long)]
        seed: Option<u64>,
        /// Multistart count per radius set (tables 2-7).
        #[arg(long)]
        starts: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(content: &str, out: Option<&PathBuf>) -> concap::Result<()> {
    match out {
        Some(path) => cli::write_atomic(path, content),
        None => {
            println!("{content}");
            Ok(())
        }
    }
}

fn run() -> concap::Result<bool> {
    let args = Cli::parse();
    match args.command {
        Command::Capacity { config, n, out } => {
            let cfg = ExperimentConfig::from_path(&config)?;
            let record = run_capacity(&cfg, n)?;
            emit(&record.to_json()?, out.as_ref())?;
            Ok(true)
        }
        Command::Maximize { config, seed, starts, n, out } => {
            let cfg = ExperimentConfig::from_path(&config)?;
            let record = run_maximize(&cfg, seed, starts, n)?;
            emit(&record.to_json()?, out.as_ref())?;
            Ok(true)
        }
        Command::Sweep { config, n, out } => {
            let cfg = ExperimentConfig::from_path(&config)?;
            let rows = run_sweep(&cfg, n)?;
            emit(&sweep_csv(&rows), out.as_ref())?;
            Ok(true)
        }
        Command::Condense { config, n, out } => {
            let cfg = ExperimentConfig::from_path(&config)?;
            let rows = run_condense(&cfg, n)?;
            emit(&condense_csv(&rows), out.as_ref())?;
            Ok(true)
        }
        Command::Table { id, seed, starts, n, out } => {
            let opts = TableOptions {
                seed: seed.unwrap_or(7),
                starts,
                n_solver: n,
            };
            let report = run_table(id, &opts)?;
            let text = serde_json::to_string_pretty(&report)
                .map_err(|e| concap::Error::Config(format!("serialization failed: {e}")))?;
            emit(&text, out.as_ref())?;
            Ok(report.passed)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: reference comparison failed tolerance");
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
