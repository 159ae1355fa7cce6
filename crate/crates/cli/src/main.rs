//! Command-line front end for the flow-imbalance clustering pipeline.
//!
//! Four subcommands cover the experiment surface: `generate` draws block
//! model benchmarks, `cluster` runs the spectral pipeline (optionally on a
//! sparsified graph, optionally next to a baseline), `sweep` reproduces
//! the benchmark grids, and `trade` ingests trade-report CSVs into yearly
//! net-trade clusterings with a drift series.
//!
//! Every run writes a manifest with the fully resolved parameters and
//! per-stage timings into its output directory; re-running with the same
//! parameters reproduces every output byte for byte. Exit codes: 0 on
//! success, 2 for input or usage errors, 3 for numeric non-convergence.

mod commands;
mod config;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

pub const THREADS_ENV: &str = "HERMFLOW_THREADS";

#[derive(Debug)]
pub enum CliError {
    /// Bad input, unusable files, invalid parameters: exit 2.
    Input(String),
    /// The eigensolver failed to converge: exit 3.
    Numeric(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "{m}"),
            CliError::Numeric(m) => write!(f, "{m}"),
        }
    }
}

impl From<hermflow_core::Error> for CliError {
    fn from(e: hermflow_core::Error) -> Self {
        use hermflow_core::Error as E;
        match e {
            E::NoConvergence { .. } | E::BottomNotConverged { .. } => {
                CliError::Numeric(e.to_string())
            }
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Parser)]
#[command(name = "hermflow", version, about = "Cluster directed graphs by flow imbalance")]
struct Cli {
    /// key=value defaults consulted for any flag not given explicitly.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a directed stochastic block model benchmark.
    Generate(commands::generate::GenerateArgs),
    /// Cluster a graph from an edge-list file.
    Cluster(commands::cluster::ClusterArgs),
    /// Run a benchmark grid over (p, eta) for all methods.
    Sweep(commands::sweep::SweepArgs),
    /// Ingest trade CSVs into per-year clusterings and a drift series.
    Trade(commands::trade::TradeArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match cli.config.as_deref().map(config::load).transpose() {
        Ok(c) => c.unwrap_or_default(),
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Ok(threads) = std::env::var(THREADS_ENV) {
        if let Ok(threads) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
        }
    }
    let result = match cli.command {
        Command::Generate(args) => commands::generate::run(args, &config),
        Command::Cluster(args) => commands::cluster::run(args, &config),
        Command::Sweep(args) => commands::sweep::run(args, &config),
        Command::Trade(args) => commands::trade::run(args, &config),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(CliError::Numeric(m)) => {
            eprintln!("error (numeric): {m}");
            ExitCode::from(3)
        }
    }
}
