//! Browser bindings for three small interactive views of `eigraph`.
//!
//! Every function returns a JSON string so the page needs no bindings
//! beyond `JSON.parse`.

use eigraph::bounds::er_triangle_report;
use eigraph::cell::{vandermonde_embedding, verify_embedding, DEFAULT_EPS_ROOTS, MAX_EMBEDDING_N};
use eigraph::graph::largest_connected_component;
use eigraph::models::ModelKind;
use eigraph::odds_product::FitOptions;
use eigraph::sweep::{run_sweep, ExperimentConfig, ModelGrid};
use eigraph::synth::{bounded_degree_graph, random_geometric_graph};
use eigraph::Graph;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Nodes in the built-in demo graph before taking its largest component.
pub const DEMO_NODES: usize = 80;

type DemoResult = Result<String, String>;

fn msg(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn js(r: DemoResult) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e))
}

/// Expected triangles of `ER(n, γ)` against the overlap bound.
pub fn er_triangle_ratio_json(n: usize, gamma: f64) -> DemoResult {
    let r = er_triangle_report(n, gamma).map_err(msg)?;
    Ok(json!({ "n": n, "gamma": gamma, "lhs": r.lhs, "rhs": r.rhs, "ratio": r.ratio }).to_string())
}

/// Clustered graph used by [`overlap_sweep`].
pub fn demo_graph(seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    largest_connected_component(&random_geometric_graph(DEMO_NODES, 0.16, &mut rng)).0
}

/// Overlap and mean triangle count / clustering for `points` evenly spaced
/// values of ω of the `linear` or `ccop` model on the demo graph.
pub fn overlap_sweep_json(model: &str, points: usize, samples: usize, seed: u64) -> DemoResult {
    let kind: ModelKind = model.parse().map_err(msg)?;
    if !matches!(kind, ModelKind::Linear | ModelKind::Ccop) {
        return Err("the demo sweeps linear or ccop".into());
    }
    if !(2..=41).contains(&points) || !(1..=20).contains(&samples) {
        return Err("points must be in 2..=41 and samples in 1..=20".into());
    }
    let g = demo_graph(7);
    let cfg = ExperimentConfig {
        models: vec![ModelGrid {
            kind,
            knobs: (0..points).map(|i| i as f64 / (points - 1) as f64).collect(),
            fit: FitOptions::default(),
        }],
        samples,
        seed,
        overlap_trials: 1,
        ..ExperimentConfig::default()
    };
    let rows = run_sweep(&g, &cfg).map_err(msg)?;
    let (_, reference_triangles) = eigraph::stats::triangle_counts(&g);
    let pts: Vec<_> = rows
        .iter()
        .filter(|r| r.is_ok())
        .map(|r| {
            json!({
                "omega": r.knob,
                "overlap": r.overlap_expected,
                "triangles": r.mean[5],
                "clustering": r.mean[6],
            })
        })
        .collect();
    Ok(json!({
        "model": kind.name(),
        "nodes": g.n(),
        "edges": g.m(),
        "reference_triangles": reference_triangles,
        "reference_clustering": eigraph::stats::global_clustering(&g),
        "points": pts,
    })
    .to_string())
}

/// Softmax error and numerical rank of the polynomial embedding on a
/// random graph with bounded degree.
pub fn embedding_error_json(n: usize, max_degree: usize, scale: f64, seed: u64) -> DemoResult {
    if !(2..=MAX_EMBEDDING_N).contains(&n) || max_degree == 0 {
        return Err("n must be in 2..=20 and max_degree at least 1".into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = bounded_degree_graph(n, max_degree, 0.6, &mut rng);
    if g.m() == 0 {
        return Err("the random graph has no edges; try another seed".into());
    }
    let w = vandermonde_embedding(&g, DEFAULT_EPS_ROOTS, scale).map_err(msg)?;
    let check = verify_embedding(&g, &w).map_err(msg)?;
    Ok(json!({
        "n": g.n(),
        "max_degree": g.max_degree(),
        "rank_bound": w.rank_bound,
        "numerical_rank": check.numerical_rank,
        "max_error": check.max_error,
    })
    .to_string())
}

#[wasm_bindgen]
pub fn er_triangle_ratio(n: usize, gamma: f64) -> Result<String, JsError> {
    js(er_triangle_ratio_json(n, gamma))
}

#[wasm_bindgen]
pub fn overlap_sweep(model: &str, points: usize, samples: usize, seed: u64) -> Result<String, JsError> {
    js(overlap_sweep_json(model, points, samples, seed))
}

#[wasm_bindgen]
pub fn embedding_error(n: usize, max_degree: usize, scale: f64, seed: u64) -> Result<String, JsError> {
    js(embedding_error_json(n, max_degree, scale, seed))
}
