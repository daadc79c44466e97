//! Edge-independent models.
//!
//! A [`ProbMatrix`] holds a symmetric matrix of edge probabilities with a
//! zero diagonal. Sampling includes each pair `i < j` independently with
//! probability `P[i][j]`, so the model is fully described by the matrix:
//! its volume is the expected edge count and its overlap is the expected
//! fraction of edges two independent samples share.

use std::fmt::Write as _;

use log::warn;
use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng;

/// Largest `k` accepted by [`ProbMatrix::expected_kcycles_trace`].
pub const MAX_TRACE_K: usize = 8;
/// Size limits of the exhaustive cycle enumeration.
pub const MAX_EXACT_N: usize = 14;
pub const MAX_EXACT_K: usize = 6;

#[derive(Clone, Debug, PartialEq)]
pub struct ProbMatrix {
    p: DMatrix<f64>,
}

impl ProbMatrix {
    pub fn zeros(n: usize) -> Self {
        ProbMatrix {
            p: DMatrix::zeros(n, n),
        }
    }

    /// Builds a matrix from `f(i, j)` evaluated on `i < j` and mirrored, so
    /// the result is symmetric by construction.
    pub fn from_fn<F>(n: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(usize, usize) -> f64,
    {
        let mut p = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in (i + 1)..n {
                let value = f(i, j);
                check_prob(i, j, value)?;
                p[(i, j)] = value;
                p[(j, i)] = value;
            }
        }
        Ok(ProbMatrix { p })
    }

    /// Validates a dense matrix. A nonzero diagonal is zeroed with a warning.
    pub fn from_matrix(mut p: DMatrix<f64>) -> Result<Self> {
        if p.nrows() != p.ncols() {
            return Err(Error::DimensionMismatch(p.nrows(), p.ncols()));
        }
        let n = p.nrows();
        let mut diagonal_zeroed = false;
        for i in 0..n {
            if p[(i, i)] != 0.0 {
                diagonal_zeroed = true;
                p[(i, i)] = 0.0;
            }
            for j in (i + 1)..n {
                check_prob(i, j, p[(i, j)])?;
                if p[(i, j)] != p[(j, i)] {
                    return Err(Error::Asymmetric { i, j });
                }
            }
        }
        if diagonal_zeroed {
            warn!("probability matrix had a nonzero diagonal; zeroed");
        }
        Ok(ProbMatrix { p })
    }

    pub(crate) fn from_graph(g: &Graph) -> Self {
        let n = g.n();
        let mut p = DMatrix::zeros(n, n);
        for (u, v) in g.edges() {
            p[(u, v)] = 1.0;
            p[(v, u)] = 1.0;
        }
        ProbMatrix { p }
    }

    /// Erdős–Rényi matrix: `gamma` on every off-diagonal pair.
    pub fn erdos_renyi(n: usize, gamma: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::OutOfRange {
                name: "gamma",
                value: gamma,
                range: "[0, 1]",
            });
        }
        Self::from_fn(n, |_, _| gamma)
    }

    pub fn n(&self) -> usize {
        self.p.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.p[(i, j)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.p
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.p
    }

    /// Expected degrees `P·1`.
    pub fn row_sums(&self) -> Vec<f64> {
        self.p.row_iter().map(|r| r.sum()).collect()
    }

    /// Expected edge count, `Σ_{i<j} P_ij`.
    pub fn volume(&self) -> f64 {
        self.upper_sum(|x| x)
    }

    /// Squared Frobenius norm.
    pub fn frobenius_sq(&self) -> f64 {
        self.p.iter().map(|x| x * x).sum()
    }

    /// Closed-form overlap `Σ_{i<j} P_ij² / Σ_{i<j} P_ij`.
    pub fn overlap(&self) -> Result<f64> {
        let volume = self.volume();
        if volume <= 0.0 {
            return Err(Error::ZeroVolume);
        }
        Ok(self.upper_sum(|x| x * x) / volume)
    }

    fn upper_sum(&self, f: impl Fn(f64) -> f64) -> f64 {
        let n = self.n();
        // column-major storage: the strict upper triangle of column j is rows 0..j
        (0..n)
            .map(|j| self.p.column(j).rows(0, j).iter().map(|&x| f(x)).sum::<f64>())
            .sum()
    }

    /// Draws `G ~ G(P)`. Pair `(i, j)` is kept iff its counter-based uniform
    /// draw keyed by `(seed, i, j)` is below `P_ij`.
    pub fn sample(&self, seed: u64) -> Graph {
        let n = self.n();
        let rows: Vec<Vec<usize>> = (0..n)
            .into_par_iter()
            .map(|i| {
                ((i + 1)..n)
                    .filter(|&j| rng::pair_uniform(seed, i, j) < self.p[(i, j)])
                    .collect()
            })
            .collect();
        let edges = rows
            .into_iter()
            .enumerate()
            .flat_map(|(i, row)| row.into_iter().map(move |j| (i, j)));
        Graph::from_edges(n, edges).expect("sampled ids are in range")
    }

    /// Monte-Carlo overlap: mean of `|E(G1) ∩ E(G2)| / V(P)` over `trials`
    /// independent pairs of samples.
    pub fn empirical_overlap(&self, seed: u64, trials: usize) -> Result<f64> {
        if trials == 0 {
            return Err(Error::OutOfRange {
                name: "trials",
                value: 0.0,
                range: ">= 1",
            });
        }
        let volume = self.volume();
        if volume <= 0.0 {
            return Err(Error::ZeroVolume);
        }
        let n = self.n();
        let total: usize = (0..trials)
            .map(|t| {
                let s1 = rng::derive_seed(seed, 2 * t as u64);
                let s2 = rng::derive_seed(seed, 2 * t as u64 + 1);
                (0..n)
                    .into_par_iter()
                    .map(|i| {
                        ((i + 1)..n)
                            .filter(|&j| {
                                let p = self.p[(i, j)];
                                rng::pair_uniform(s1, i, j) < p && rng::pair_uniform(s2, i, j) < p
                            })
                            .count()
                    })
                    .sum::<usize>()
            })
            .sum();
        Ok(total as f64 / (trials as f64 * volume))
    }

    /// Standard error of [`empirical_overlap`](Self::empirical_overlap) with
    /// `trials` pairs: each shared-edge indicator is Bernoulli(`P_ij²`).
    pub fn overlap_standard_error(&self, trials: usize) -> f64 {
        let volume = self.volume();
        let var = self.upper_sum(|p| p * p * (1.0 - p * p));
        (var / trials.max(1) as f64).sqrt() / volume
    }

    /// `tr(P³) / 6`, exact for a zero diagonal.
    pub fn expected_triangles(&self) -> f64 {
        trace_power(&self.p, 3) / 6.0
    }

    /// `tr(P^k) / (2k)`: counts closed walks, so it bounds the expected
    /// number of k-cycles from above (and equals it for `k = 3`).
    pub fn expected_kcycles_trace(&self, k: usize) -> Result<f64> {
        if !(3..=MAX_TRACE_K).contains(&k) {
            return Err(Error::OutOfRange {
                name: "k",
                value: k as f64,
                range: "[3, 8]",
            });
        }
        Ok(trace_power(&self.p, k) / (2 * k) as f64)
    }

    /// Exact expected number of k-cycles by enumerating every cycle through
    /// distinct nodes. Only for `n <= 14`, `3 <= k <= 6`.
    pub fn expected_kcycles_exact(&self, k: usize) -> Result<f64> {
        if !(3..=MAX_EXACT_K).contains(&k) {
            return Err(Error::OutOfRange {
                name: "k",
                value: k as f64,
                range: "[3, 6]",
            });
        }
        if self.n() > MAX_EXACT_N {
            return Err(Error::OutOfRange {
                name: "n",
                value: self.n() as f64,
                range: "<= 14",
            });
        }
        // each cycle is enumerated once per direction from its smallest node
        let mut total = 0.0;
        let mut used = vec![false; self.n()];
        for start in 0..self.n() {
            used[start] = true;
            total += self.extend_cycle(start, start, 1, k, 1.0, &mut used);
            used[start] = false;
        }
        Ok(total / 2.0)
    }

    fn extend_cycle(
        &self,
        start: usize,
        last: usize,
        len: usize,
        k: usize,
        weight: f64,
        used: &mut [bool],
    ) -> f64 {
        if len == k {
            return weight * self.p[(last, start)];
        }
        let mut acc = 0.0;
        for next in (start + 1)..self.n() {
            let p = self.p[(last, next)];
            if used[next] || p == 0.0 {
                continue;
            }
            used[next] = true;
            acc += self.extend_cycle(start, next, len + 1, k, weight * p, used);
            used[next] = false;
        }
        acc
    }

    /// Entrywise `(1 - ω)·self + ω·a`.
    pub fn convex_combine(&self, a: &ProbMatrix, omega: f64) -> Result<ProbMatrix> {
        if !(0.0..=1.0).contains(&omega) {
            return Err(Error::OutOfRange {
                name: "omega",
                value: omega,
                range: "[0, 1]",
            });
        }
        if self.n() != a.n() {
            return Err(Error::DimensionMismatch(self.n(), a.n()));
        }
        let p = self.p.zip_map(&a.p, |x, y| {
            if omega == 0.0 {
                x
            } else if omega == 1.0 {
                y
            } else {
                ((1.0 - omega) * x + omega * y).clamp(0.0, 1.0)
            }
        });
        Ok(ProbMatrix { p })
    }

    /// Text triplet format: `n=<n>`, then `i j p` for every `i < j` with
    /// `p > 0`, printed with 17 significant digits.
    pub fn to_triplets(&self) -> String {
        let n = self.n();
        let mut out = format!("n={n}\n");
        for i in 0..n {
            for j in (i + 1)..n {
                let p = self.p[(i, j)];
                if p > 0.0 {
                    let _ = writeln!(out, "{i} {j} {p:.16e}");
                }
            }
        }
        out
    }

    pub fn from_triplets(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(k, l)| (k + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (line, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "missing n=<n> header".into(),
        })?;
        let n: usize = header
            .strip_prefix("n=")
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| Error::Parse {
                line,
                msg: format!("expected n=<n>, got {header:?}"),
            })?;
        let mut p = DMatrix::zeros(n, n);
        for (line, text) in lines {
            let bad = |msg: String| Error::Parse { line, msg };
            let fields: Vec<&str> = text.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(bad("expected `i j p`".into()));
            }
            let i: usize = fields[0].parse().map_err(|_| bad("invalid row index".into()))?;
            let j: usize = fields[1].parse().map_err(|_| bad("invalid column index".into()))?;
            let v: f64 = fields[2].parse().map_err(|_| bad("invalid probability".into()))?;
            if i >= j || j >= n {
                return Err(bad(format!("pair ({i}, {j}) must satisfy i < j < n")));
            }
            if !(0.0..=1.0).contains(&v) {
                return Err(bad(format!("probability {v} outside [0, 1]")));
            }
            if p[(i, j)] != 0.0 {
                return Err(bad(format!("duplicate pair ({i}, {j})")));
            }
            p[(i, j)] = v;
            p[(j, i)] = v;
        }
        Ok(ProbMatrix { p })
    }
}

fn check_prob(i: usize, j: usize, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::InvalidProbability { i, j, value })
    }
}

/// `tr(M^k)` for symmetric `M`, via `⟨M^⌈k/2⌉, M^⌊k/2⌋⟩_F`.
pub(crate) fn trace_power(m: &DMatrix<f64>, k: usize) -> f64 {
    match k {
        0 => m.nrows() as f64,
        1 => m.trace(),
        _ => {
            let lo = k / 2;
            let mut low = m.clone();
            for _ in 1..lo {
                low = &low * m;
            }
            let high = if k % 2 == 0 { low.clone() } else { &low * m };
            low.dot(&high)
        }
    }
}
