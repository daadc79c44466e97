//! Graph statistics used to compare generated graphs with a reference.
//!
//! Statistics that are undefined on a particular graph (no wedges, zero
//! degree variance, no power-law tail, a single node) come back as `None`
//! and are written as `nan`; they are never replaced by zero.

use std::collections::VecDeque;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{largest_connected_component, Graph};

/// Smallest tail accepted by the power-law fit.
pub const MIN_TAIL: usize = 10;

/// Per-node triangle counts and the total `Δ(G) = Σ t_i / 3`.
pub fn triangle_counts(g: &Graph) -> (Vec<u64>, u64) {
    let mut t = vec![0u64; g.n()];
    let mut total = 0;
    for (u, v) in g.edges() {
        // u < v < w, so every triangle is seen once
        let nu = g.neighbors(u);
        let nv = g.neighbors(v);
        let mut a = nu.partition_point(|&x| x <= v);
        let mut b = nv.partition_point(|&x| x <= v);
        while a < nu.len() && b < nv.len() {
            match nu[a].cmp(&nv[b]) {
                std::cmp::Ordering::Less => a += 1,
                std::cmp::Ordering::Greater => b += 1,
                std::cmp::Ordering::Equal => {
                    let w = nu[a];
                    t[u] += 1;
                    t[v] += 1;
                    t[w] += 1;
                    total += 1;
                    a += 1;
                    b += 1;
                }
            }
        }
    }
    (t, total)
}

/// Number of wedges (paths of length two), `Σ C(d_i, 2)`.
pub fn wedge_count(g: &Graph) -> u64 {
    g.degrees()
        .iter()
        .map(|&d| (d as u64) * (d as u64).saturating_sub(1) / 2)
        .sum()
}

/// Fraction of wedges closed into triangles, `3Δ(G) / Σ C(d_i, 2)`;
/// `None` without wedges. Equals 1 exactly when every wedge closes.
pub fn global_clustering(g: &Graph) -> Option<f64> {
    let wedges = wedge_count(g);
    if wedges == 0 {
        return None;
    }
    let (_, tri) = triangle_counts(g);
    Some(3.0 * tri as f64 / wedges as f64)
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(x: &[f64], y: &[f64]) -> Option<f64> {
    assert_eq!(x.len(), y.len(), "spearman needs equal lengths");
    pearson(&ranks(x), &ranks(y))
}

fn ranks(x: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut r = vec![0.0; x.len()];
    let mut start = 0;
    while start < idx.len() {
        let mut end = start + 1;
        while end < idx.len() && x[idx[end]] == x[idx[start]] {
            end += 1;
        }
        let avg = (start + end - 1) as f64 / 2.0 + 1.0;
        for &k in &idx[start..end] {
            r[k] = avg;
        }
        start = end;
    }
    r
}

/// Pearson correlation; `None` when either side has zero variance.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    assert_eq!(x.len(), y.len(), "pearson needs equal lengths");
    let n = x.len() as f64;
    if x.is_empty() {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Degree assortativity: Pearson correlation of endpoint degrees over both
/// orientations of every edge.
pub fn assortativity(g: &Graph) -> Option<f64> {
    if g.m() < 2 {
        return None;
    }
    let d = g.degrees();
    let (mut xs, mut ys) = (Vec::with_capacity(2 * g.m()), Vec::with_capacity(2 * g.m()));
    for (u, v) in g.edges() {
        xs.push(d[u] as f64);
        ys.push(d[v] as f64);
        xs.push(d[v] as f64);
        ys.push(d[u] as f64);
    }
    pearson(&xs, &ys)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerLawFit {
    pub alpha: f64,
    pub x_min: u64,
    /// Kolmogorov–Smirnov distance between the tail and the fitted law.
    pub ks: f64,
    pub n_tail: usize,
}

/// Discrete power-law fit to the nonzero entries of `d`.
///
/// For each candidate `x_min` (a distinct value that leaves at least
/// [`MIN_TAIL`] points and more than one distinct value in the tail) the
/// exponent is `α = 1 + N / Σ ln(d_i / (x_min − ½))`; the candidate with the
/// smallest KS distance wins, ties going to the smaller `x_min`.
pub fn powerlaw_fit(d: &[usize]) -> Option<PowerLawFit> {
    let mut xs: Vec<u64> = d.iter().filter(|&&x| x > 0).map(|&x| x as u64).collect();
    if xs.len() < MIN_TAIL {
        return None;
    }
    xs.sort_unstable();
    let mut distinct = xs.clone();
    distinct.dedup();

    let mut best: Option<PowerLawFit> = None;
    for &x_min in &distinct[..distinct.len() - 1] {
        let start = xs.partition_point(|&x| x < x_min);
        let tail = &xs[start..];
        if tail.len() < MIN_TAIL {
            break;
        }
        let shift = x_min as f64 - 0.5;
        let log_sum: f64 = tail.iter().map(|&x| (x as f64 / shift).ln()).sum();
        let alpha = 1.0 + tail.len() as f64 / log_sum;
        let ks = ks_distance(tail, x_min, alpha);
        if best.is_none_or(|b| ks < b.ks) {
            best = Some(PowerLawFit {
                alpha,
                x_min,
                ks,
                n_tail: tail.len(),
            });
        }
    }
    best
}

pub fn powerlaw_alpha(d: &[usize]) -> Option<f64> {
    powerlaw_fit(d).map(|f| f.alpha)
}

/// KS distance for a sorted tail against `P(X ≥ x) = ((x − ½)/(x_min − ½))^{1−α}`.
fn ks_distance(tail: &[u64], x_min: u64, alpha: f64) -> f64 {
    let n = tail.len() as f64;
    let shift = x_min as f64 - 0.5;
    let cdf = |x: f64| 1.0 - ((x + 0.5) / shift).powf(1.0 - alpha);
    let mut ks: f64 = 0.0;
    let mut k = 0;
    while k < tail.len() {
        let x = tail[k];
        let mut end = k;
        while end < tail.len() && tail[end] == x {
            end += 1;
        }
        // empirical CDF before x (at x - 1) and at x
        let before = k as f64 / n;
        let at = end as f64 / n;
        if x > x_min {
            ks = ks.max((before - cdf((x - 1) as f64)).abs());
        }
        ks = ks.max((at - cdf(x as f64)).abs());
        k = end;
    }
    ks
}

/// BFS distances from `source`; unreachable nodes hold `usize::MAX`.
pub fn bfs_distances(g: &Graph, source: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; g.n()];
    let mut queue = VecDeque::new();
    dist[source] = 0;
    queue.push_back(source);
    while let Some(u) = queue.pop_front() {
        for &v in g.neighbors(u) {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    dist
}

/// Mean shortest-path length over all unordered node pairs of a connected
/// graph. `None` for a single node.
pub fn char_path_length(g: &Graph) -> Result<Option<f64>> {
    let n = g.n();
    if n < 2 {
        return Ok(None);
    }
    let sums: Vec<Option<u64>> = (0..n)
        .into_par_iter()
        .map(|s| {
            let dist = bfs_distances(g, s);
            let mut acc = 0u64;
            for &d in &dist {
                if d == usize::MAX {
                    return None;
                }
                acc += d as u64;
            }
            Some(acc)
        })
        .collect();
    let mut total = 0u64;
    for s in sums {
        total += s.ok_or(Error::Disconnected)?;
    }
    // ordered pairs on both sides
    Ok(Some(total as f64 / (n * (n - 1)) as f64))
}

/// The eight comparison statistics for one generated graph.
#[derive(Clone, Debug, PartialEq)]
pub struct StatsRecord {
    pub degree_pearson: Option<f64>,
    pub max_degree: usize,
    pub powerlaw_alpha: Option<f64>,
    pub assortativity: Option<f64>,
    pub triangle_pearson: Option<f64>,
    pub triangle_count: u64,
    pub clustering_coeff: Option<f64>,
    pub char_path_length: Option<f64>,
}

impl StatsRecord {
    pub const COLUMNS: [&'static str; 8] = [
        "degree_pearson",
        "max_degree",
        "powerlaw_alpha",
        "assortativity",
        "triangle_pearson",
        "triangle_count",
        "clustering_coeff",
        "char_path_length",
    ];

    pub fn csv_header() -> String {
        Self::COLUMNS.join(",")
    }

    /// Values in column order, `None` where undefined.
    pub fn values(&self) -> [Option<f64>; 8] {
        [
            self.degree_pearson,
            Some(self.max_degree as f64),
            self.powerlaw_alpha,
            self.assortativity,
            self.triangle_pearson,
            Some(self.triangle_count as f64),
            self.clustering_coeff,
            self.char_path_length,
        ]
    }

    pub fn to_csv_row(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.values().iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            match (k, v) {
                (1 | 5, Some(x)) => {
                    let _ = write!(out, "{}", *x as u64);
                }
                (_, Some(x)) => {
                    let _ = write!(out, "{x:.10}");
                }
                (_, None) => out.push_str("nan"),
            }
        }
        out
    }
}

/// Statistics of `sample` against `reference` on the same node set. The
/// correlations are node-aligned. The path length is taken over the
/// sample's largest connected component since samples need not be
/// connected.
pub fn compare(reference: &Graph, sample: &Graph) -> Result<StatsRecord> {
    if reference.n() != sample.n() {
        return Err(Error::DimensionMismatch(reference.n(), sample.n()));
    }
    let to_f = |v: &[usize]| v.iter().map(|&x| x as f64).collect::<Vec<_>>();
    let (ref_t, _) = triangle_counts(reference);
    let (smp_t, smp_total) = triangle_counts(sample);
    let ref_d = reference.degrees();
    let smp_d = sample.degrees();
    let tf = |v: &[u64]| v.iter().map(|&x| x as f64).collect::<Vec<_>>();
    let (lcc, _) = largest_connected_component(sample);
    Ok(StatsRecord {
        degree_pearson: pearson(&to_f(&ref_d), &to_f(&smp_d)),
        max_degree: sample.max_degree(),
        powerlaw_alpha: powerlaw_alpha(&smp_d),
        assortativity: assortativity(sample),
        triangle_pearson: pearson(&tf(&ref_t), &tf(&smp_t)),
        triangle_count: smp_total,
        clustering_coeff: global_clustering(sample),
        char_path_length: char_path_length(&lcc)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Zeta};

    fn graph(n: usize, edges: &[(usize, usize)]) -> Graph {
        Graph::from_edges(n, edges.iter().copied()).unwrap()
    }

    fn complete(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))).unwrap()
    }

    fn cycle(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    fn random_graph(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Graph {
        let edges: Vec<_> = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .filter(|_| rng.random_bool(p))
            .collect();
        Graph::from_edges(n, edges).unwrap()
    }

    #[test]
    fn triangle_examples() {
        assert_eq!(triangle_counts(&complete(3)), (vec![1, 1, 1], 1));
        assert_eq!(triangle_counts(&complete(4)), (vec![3, 3, 3, 3], 4));
        assert_eq!(triangle_counts(&cycle(5)).1, 0);
    }

    #[test]
    fn triangles_match_triple_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..100 {
            let n = rng.random_range(1..=8);
            let g = random_graph(n, rng.random_range(0.0..1.0), &mut rng);
            let mut t = vec![0u64; n];
            let mut total = 0;
            for i in 0..n {
                for j in (i + 1)..n {
                    for k in (j + 1)..n {
                        if g.has_edge(i, j) && g.has_edge(j, k) && g.has_edge(i, k) {
                            t[i] += 1;
                            t[j] += 1;
                            t[k] += 1;
                            total += 1;
                        }
                    }
                }
            }
            let (tc, tot) = triangle_counts(&g);
            assert_eq!((tc.clone(), tot), (t, total));
            assert_eq!(3 * tot, tc.iter().sum::<u64>());
        }
    }

    #[test]
    fn clustering_examples() {
        assert_eq!(global_clustering(&complete(3)), Some(1.0));
        assert_eq!(global_clustering(&graph(3, &[(0, 1), (1, 2)])), Some(0.0));
        let k4_minus = graph(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)]);
        assert_eq!(global_clustering(&k4_minus), Some(0.75));
        assert_eq!(global_clustering(&graph(4, &[(0, 1), (2, 3)])), None);
        for n in 3..=6 {
            assert_eq!(global_clustering(&complete(n)), Some(1.0));
        }
    }

    #[test]
    fn spearman_examples() {
        let x = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(spearman(&x, &[10.0, 20.0, 25.0, 100.0]), Some(1.0));
        assert_eq!(spearman(&x, &[4.0, 3.0, 2.0, 1.0]), Some(-1.0));
        assert_eq!(ranks(&[3.0, 1.0, 3.0, 2.0]), vec![3.5, 1.0, 3.5, 2.0]);
        assert_eq!(spearman(&x, &[1.0; 4]), None);
    }

    #[test]
    fn assortativity_examples() {
        let star = graph(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]);
        assert!((assortativity(&star).unwrap() + 1.0).abs() < 1e-12);
        assert_eq!(assortativity(&cycle(4)), None);
        let p4 = graph(4, &[(0, 1), (1, 2), (2, 3)]);
        assert!((assortativity(&p4).unwrap() + 0.5).abs() < 1e-12);
    }

    #[test]
    fn path_length_examples() {
        let p3 = graph(3, &[(0, 1), (1, 2)]);
        assert!((char_path_length(&p3).unwrap().unwrap() - 4.0 / 3.0).abs() < 1e-12);
        assert_eq!(char_path_length(&complete(7)).unwrap(), Some(1.0));
        assert!((char_path_length(&cycle(6)).unwrap().unwrap() - 1.8).abs() < 1e-12);
        assert!(matches!(
            char_path_length(&graph(4, &[(0, 1), (2, 3)])),
            Err(Error::Disconnected)
        ));
        assert_eq!(char_path_length(&Graph::empty(1)).unwrap(), None);
    }

    #[test]
    fn path_length_matches_floyd_warshall() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..20 {
            let n = rng.random_range(2..=30);
            let g = largest_connected_component(&random_graph(n, 0.15, &mut rng)).0;
            if g.n() < 2 {
                continue;
            }
            let n = g.n();
            let inf = usize::MAX / 4;
            let mut d = vec![vec![inf; n]; n];
            for i in 0..n {
                d[i][i] = 0;
                for &j in g.neighbors(i) {
                    d[i][j] = 1;
                }
            }
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        d[i][j] = d[i][j].min(d[i][k] + d[k][j]);
                    }
                }
            }
            let total: usize = (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).map(|(i, j)| d[i][j]).sum();
            let want = total as f64 / (n * (n - 1) / 2) as f64;
            assert!((char_path_length(&g).unwrap().unwrap() - want).abs() < 1e-12);
        }
    }

    #[test]
    fn powerlaw_recovers_zeta_exponent() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let zeta = Zeta::new(2.5).unwrap();
        let d: Vec<usize> = (0..5000).map(|_| zeta.sample(&mut rng) as usize).collect();
        let fit = powerlaw_fit(&d).unwrap();
        assert!((2.3..=2.7).contains(&fit.alpha), "{fit:?}");
    }

    #[test]
    fn powerlaw_degenerate_and_light_tails() {
        assert_eq!(powerlaw_fit(&[4; 50]), None);
        assert_eq!(powerlaw_fit(&[1, 2, 3]), None);
        // geometric tail: steep fit, KS distance still reported
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let geo = rand_distr::Geometric::new(0.5).unwrap();
        let d: Vec<usize> = (0..2000).map(|_| 1 + geo.sample(&mut rng) as usize).collect();
        let fit = powerlaw_fit(&d).unwrap();
        assert!(fit.alpha > 3.0, "{fit:?}");
        assert!(fit.ks.is_finite() && fit.ks >= 0.0);
    }

    #[test]
    fn compare_with_self_and_empty() {
        let g = graph(6, &[(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (4, 5), (3, 5), (0, 3)]);
        let rec = compare(&g, &g).unwrap();
        assert_eq!(rec.degree_pearson, Some(1.0));
        assert_eq!(rec.triangle_pearson, Some(1.0));
        assert_eq!(rec.triangle_count, 3);
        assert_eq!(rec.max_degree, 4);
        assert_eq!(rec.clustering_coeff, global_clustering(&g));
        assert_eq!(rec.char_path_length, char_path_length(&g).unwrap());
        assert_eq!(rec.assortativity, assortativity(&g));

        let empty = compare(&g, &Graph::empty(6)).unwrap();
        assert_eq!(empty.degree_pearson, None);
        assert_eq!(empty.triangle_pearson, None);
        assert_eq!(empty.triangle_count, 0);
        assert_eq!(empty.char_path_length, None);
        let row = empty.to_csv_row();
        assert!(row.starts_with("nan,0,nan,nan,nan,0,nan,nan"), "{row}");

        assert!(compare(&g, &Graph::empty(5)).is_err());
        assert_eq!(StatsRecord::csv_header().split(',').count(), 8);
    }
}
