//! Edge-independent random graph models and the limits they face.
//!
//! An edge-independent model is a symmetric matrix `P` of edge
//! probabilities. This crate builds such models from an observed graph
//! (odds-product fits, convex combinations, degree fixing, truncated SVD),
//! samples from them, measures graph statistics, and checks the bounds that
//! tie triangle and cycle density to the overlap between samples.

pub mod bounds;
pub mod cell;
pub mod error;
pub mod graph;
pub mod models;
pub mod odds_product;
pub mod prob;
pub mod rng;
pub mod stats;
pub mod sweep;
pub mod synth;

pub use error::{Error, Result};
pub use graph::{Graph, NodeIdMap};
pub use models::{ModelKind, ModelSpec};
pub use odds_product::{fit_odds_product, FitOptions, FitReport, LogitVector, OddsProductFit};
pub use prob::ProbMatrix;
pub use stats::StatsRecord;
