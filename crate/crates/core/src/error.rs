use thiserror::Error;

use crate::odds_product::FitReport;

/// Errors produced by this crate.
#[derive(Error, Debug)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("graph has no edges")]
    EmptyGraph,

    #[error("node id {id} out of range for a graph on {n} nodes")]
    NodeOutOfRange { id: usize, n: usize },

    #[error("dense matrix on {n} nodes exceeds the cap of {cap}")]
    Capacity { n: usize, cap: usize },

    #[error("entry ({i}, {j}) = {value} is not a probability")]
    InvalidProbability { i: usize, j: usize, value: f64 },

    #[error("matrix is not symmetric at ({i}, {j})")]
    Asymmetric { i: usize, j: usize },

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("overlap is undefined for a matrix with zero volume")]
    ZeroVolume,

    #[error("{name} = {value} is outside its valid range {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("degree sequence is infeasible: {0}")]
    InfeasibleDegrees(String),

    #[error("Newton iteration did not converge after {} iterations (residual {:.3e})",
        .report.iterations, .report.residual_history.last().copied().unwrap_or(f64::NAN))]
    NonConvergence { report: Box<FitReport> },

    #[error("linear solve failed: {0}")]
    Solver(String),

    #[error("graph is disconnected; take the largest connected component first")]
    Disconnected,

    #[error("node {0} is isolated")]
    IsolatedNode(usize),

    #[error("transition matrix is reducible")]
    Reducible,

    #[error("power iteration did not converge in {0} iterations")]
    PowerIteration(usize),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
