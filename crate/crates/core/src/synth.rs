//! Random inputs for tests, benchmarks and the verification commands.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Zeta};

use crate::graph::Graph;
use crate::prob::ProbMatrix;

/// Symmetric matrix with zero diagonal and entries uniform on `[0, max_entry]`.
pub fn random_prob_matrix<R: Rng>(n: usize, max_entry: f64, rng: &mut R) -> ProbMatrix {
    let max_entry = max_entry.clamp(0.0, 1.0);
    ProbMatrix::from_fn(n, |_, _| max_entry * rng.random::<f64>()).expect("entries lie in [0, 1]")
}

/// Like [`random_prob_matrix`] but each pair is nonzero only with
/// probability `density`.
pub fn sparse_random_prob_matrix<R: Rng>(n: usize, density: f64, rng: &mut R) -> ProbMatrix {
    let density = density.clamp(0.0, 1.0);
    ProbMatrix::from_fn(n, |_, _| {
        if rng.random_bool(density) {
            rng.random::<f64>()
        } else {
            0.0
        }
    })
    .expect("entries lie in [0, 1]")
}

/// `G(n, p)`.
pub fn gnp<R: Rng>(n: usize, p: f64, rng: &mut R) -> Graph {
    let p = p.clamp(0.0, 1.0);
    let edges: Vec<_> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .filter(|_| rng.random_bool(p))
        .collect();
    Graph::from_edges(n, edges).expect("ids in range")
}

/// Random graph with maximum degree at most `max_degree` and no isolated
/// nodes. Pairs are visited in random order and each is kept with
/// probability `keep` while both endpoints have spare degree; isolated nodes
/// are dropped afterwards, so the result may have fewer than `n` nodes.
pub fn bounded_degree_graph<R: Rng>(n: usize, max_degree: usize, keep: f64, rng: &mut R) -> Graph {
    let mut pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect();
    pairs.shuffle(rng);
    let mut deg = vec![0usize; n];
    let mut edges = Vec::new();
    for (u, v) in pairs {
        if deg[u] < max_degree && deg[v] < max_degree && rng.random_bool(keep.clamp(0.0, 1.0)) {
            deg[u] += 1;
            deg[v] += 1;
            edges.push((u, v));
        }
    }
    let g = Graph::from_edges(n, edges).expect("ids in range");
    let keep: Vec<usize> = (0..n).filter(|&u| g.degree(u) > 0).collect();
    g.induced_subgraph(&keep)
}

/// Configuration-style power-law graph: degrees drawn from a zeta law with
/// the given exponent (capped at `n − 1`), stubs matched uniformly at
/// random, then self-loops and multi-edges discarded.
pub fn powerlaw_configuration_graph<R: Rng>(n: usize, exponent: f64, rng: &mut R) -> Graph {
    let zeta = Zeta::new(exponent).expect("exponent > 1");
    let cap = n.saturating_sub(1).max(1) as f64;
    let mut degrees: Vec<usize> = (0..n).map(|_| zeta.sample(rng).min(cap) as usize).collect();
    if degrees.iter().sum::<usize>() % 2 == 1 {
        degrees[0] += 1;
    }
    let mut stubs: Vec<usize> = degrees
        .iter()
        .enumerate()
        .flat_map(|(u, &d)| std::iter::repeat_n(u, d))
        .collect();
    stubs.shuffle(rng);
    let edges: Vec<_> = stubs.chunks_exact(2).map(|c| (c[0], c[1])).collect();
    Graph::from_edges(n, edges).expect("ids in range")
}

/// Random geometric graph on the unit torus: nodes at uniform positions,
/// joined when their wrap-around distance is below `radius`. Clustered and
/// triangle-rich, unlike the other generators here.
pub fn random_geometric_graph<R: Rng>(n: usize, radius: f64, rng: &mut R) -> Graph {
    let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.random(), rng.random())).collect();
    let wrap = |d: f64| d.min(1.0 - d);
    let r2 = radius * radius;
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let dx = wrap((pts[i].0 - pts[j].0).abs());
            let dy = wrap((pts[i].1 - pts[j].1).abs());
            if dx * dx + dy * dy < r2 {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edges(n, edges).expect("ids in range")
}
