use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

/// Fit, sample and audit edge-independent random graph models.
#[derive(Parser, Debug)]
#[command(name = "eigraph", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Load an edge list, keep its largest connected component and write
    /// the normalized edge list and id map.
    Ingest {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = ".")]
        output_dir: PathBuf,
    },
    /// Build an edge-probability matrix from a graph.
    Fit(FitArgs),
    /// Draw graphs from an edge-probability matrix.
    Sample {
        /// Matrix in triplet format, as written by `fit`.
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = ".")]
        output_dir: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        samples: usize,
    },
    /// Compare a graph against a reference on the same node set.
    Stats {
        #[arg(long)]
        reference: PathBuf,
        #[arg(long)]
        input: PathBuf,
    },
    /// Evaluate models over knob grids and summarize statistics vs overlap.
    Sweep(SweepArgs),
    /// Check the overlap bounds on random or Erdős–Rényi matrices.
    Verify(VerifyArgs),
    /// Check the low-rank softmax embedding on random bounded-degree graphs.
    CellVerify(CellVerifyArgs),
}

#[derive(Args, Debug)]
struct FitArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = ".")]
    output_dir: PathBuf,
    #[arg(long, value_enum, default_value_t = ModelArg::Ccop)]
    model: ModelArg,
    /// Mixing weight for linear and ccop.
    #[arg(long)]
    omega: Option<f64>,
    /// Number of highest-degree nodes fixed by hdop.
    #[arg(long)]
    h: Option<usize>,
    /// Rank for tsvd.
    #[arg(long)]
    rank: Option<usize>,
    #[arg(long, default_value_t = 1e-6)]
    epsilon: f64,
    #[arg(long, default_value_t = 100)]
    max_iter: usize,
    /// Take full Newton steps without backtracking.
    #[arg(long)]
    no_damping: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    Linear,
    Ccop,
    Hdop,
    Tsvd,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides `input` in the config.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    workers: Option<usize>,
    /// Also write sweep.svg.
    #[arg(long)]
    plot: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Theorem {
    Tri,
    Kcycle,
    Cc,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    theorem: Theorem,
    #[arg(long, default_value_t = 20)]
    n: usize,
    /// Use `P_ij = γ` instead of random matrices (required for `cc`).
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long, default_value_t = 4)]
    k: usize,
    /// Matrices to check, or samples to average for `cc`.
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Allowed distance of the mean clustering from γ for `cc`.
    #[arg(long, default_value_t = 0.02)]
    tolerance: f64,
}

#[derive(Args, Debug)]
struct CellVerifyArgs {
    #[arg(long, default_value_t = 12)]
    n: usize,
    #[arg(long, default_value_t = 3)]
    max_degree: usize,
    #[arg(long, default_value_t = 1e4)]
    scale: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    #[arg(long, default_value_t = eigraph::cell::DEFAULT_EPS_ROOTS)]
    eps_roots: f64,
}

/// Errors split by exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Failed(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError::Failed(e.into())
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Failed(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
