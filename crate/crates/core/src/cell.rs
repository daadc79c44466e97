//! Memorization in the low-rank softmax (CELL) generator.
//!
//! CELL fits logits `W`, takes `P* = softmax_rows(W)`, weights rows by the
//! stationary distribution `π` of `P*` and symmetrizes with an entrywise
//! max. Without a rank constraint the optimum is `P* = D⁻¹A`, which
//! reproduces the input graph exactly. A polynomial construction shows the
//! same optimum is approached with rank `2Δ + 1`, where `Δ` is the maximum
//! degree. This module builds both objects and measures how close they get.

use log::warn;
use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::prob::ProbMatrix;

/// Largest graph accepted by [`vandermonde_embedding`].
pub const MAX_EMBEDDING_N: usize = 20;
pub const DEFAULT_EPS_ROOTS: f64 = 1e-4;
/// Relative singular-value threshold for numerical rank.
pub const RANK_TOL: f64 = 1e-8;

const POWER_MAX_ITER: usize = 100_000;
const POWER_TOL: f64 = 1e-12;

/// Logit matrix with a certified upper bound on its rank.
#[derive(Clone, Debug, PartialEq)]
pub struct LogitMatrix {
    pub w: DMatrix<f64>,
    pub rank_bound: usize,
}

/// Softmax of every row, with the row maximum subtracted first.
pub fn rowwise_softmax(w: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = w.clone();
    for mut row in out.row_iter_mut() {
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        row.apply(|x| *x = (*x - max).exp());
        let sum = row.sum();
        row /= sum;
    }
    out
}

/// `D⁻¹A`: row `i` puts `1/d_i` on every neighbor of `i`.
pub fn unconstrained_optimum(a: &Graph) -> Result<DMatrix<f64>> {
    let n = a.n();
    let mut out = DMatrix::zeros(n, n);
    for i in 0..n {
        let d = a.degree(i);
        if d == 0 {
            return Err(Error::IsolatedNode(i));
        }
        for &j in a.neighbors(i) {
            out[(i, j)] = 1.0 / d as f64;
        }
    }
    Ok(out)
}

/// `Σ_ij A_ij · ln S_ij` for a row-stochastic `S`.
pub fn cell_log_likelihood(a: &Graph, s: &DMatrix<f64>) -> f64 {
    a.edges()
        .map(|(u, v)| s[(u, v)].ln() + s[(v, u)].ln())
        .sum()
}

/// Logits reproducing `D⁻¹A` directly: `ln(1/d_i)` on edges, `-1e6` elsewhere.
pub fn optimum_logits(a: &Graph) -> Result<LogitMatrix> {
    let target = unconstrained_optimum(a)?;
    let w = target.map(|x| if x > 0.0 { x.ln() } else { -1e6 });
    Ok(LogitMatrix {
        w,
        rank_bound: a.n(),
    })
}

#[derive(Clone, Debug)]
pub struct CellSymmetrized {
    pub p: ProbMatrix,
    /// Stationary distribution of `P*`, summing to 1.
    pub stationary: DVector<f64>,
}

/// `P = max(diag(π)P*, (diag(π)P*)ᵀ)` for a row-stochastic, irreducible `P*`.
///
/// `π` is normalized to sum 1, which already keeps every entry of
/// `diag(π)P*` in `[0, 1]`. The diagonal of the result is zeroed.
pub fn cell_symmetrize(pstar: &DMatrix<f64>) -> Result<CellSymmetrized> {
    let n = pstar.nrows();
    if n != pstar.ncols() {
        return Err(Error::DimensionMismatch(n, pstar.ncols()));
    }
    if !is_irreducible(pstar) {
        return Err(Error::Reducible);
    }
    let pi = stationary_distribution(pstar)?;
    let mut m = pstar.clone();
    for i in 0..n {
        m.row_mut(i).scale_mut(pi[i]);
    }
    let mut clipped = false;
    let sym = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            return 0.0;
        }
        let v = m[(i, j)].max(m[(j, i)]);
        if v > 1.0 {
            clipped = true;
        }
        v.clamp(0.0, 1.0)
    });
    if clipped {
        warn!("symmetrized CELL matrix had entries above 1; clipped");
    }
    Ok(CellSymmetrized {
        p: ProbMatrix::from_matrix(sym)?,
        stationary: pi,
    })
}

/// Strong connectivity of the support of `P*`.
fn is_irreducible(pstar: &DMatrix<f64>) -> bool {
    let n = pstar.nrows();
    if n == 0 {
        return false;
    }
    let reach = |forward: bool| {
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for v in 0..n {
                let w = if forward { pstar[(u, v)] } else { pstar[(v, u)] };
                if w > 0.0 && !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen.into_iter().all(|s| s)
    };
    reach(true) && reach(false)
}

/// Left Perron vector of `P*` by power iteration on the lazy chain
/// `(I + P*)/2`, which has the same stationary distribution and is
/// aperiodic even when `P*` is not.
pub fn stationary_distribution(pstar: &DMatrix<f64>) -> Result<DVector<f64>> {
    let n = pstar.nrows();
    let pt = pstar.transpose();
    let mut pi = DVector::from_element(n, 1.0 / n as f64);
    for _ in 0..POWER_MAX_ITER {
        let mut next = (&pt * &pi + &pi) * 0.5;
        let total = next.sum();
        next /= total;
        let change = (&next - &pi).amax();
        pi = next;
        if change <= POWER_TOL {
            return Ok(pi);
        }
    }
    Err(Error::PowerIteration(POWER_MAX_ITER))
}

/// Rank-`(2Δ + 1)` logits whose row softmax approaches `D⁻¹A`.
///
/// With nodes at positions `t = 1..n`, row `i` evaluates
/// `p_i(t) = −ε⁻² ∏_j (t − t_j − ε w_j)(t − t_j + ε w_j)` over the neighbor
/// positions `t_j` of `i`, with `w_j = 1 / ∏_{l≠j} (t_j − t_l)`. Each `p_i`
/// has degree `2 d_i ≤ 2Δ`, tends to 1 at every neighbor as `ε → 0`, and is
/// at most about `−ε⁻²` everywhere else. The product is evaluated directly
/// (never expanded into monomials), which is why `n` is capped at 20.
pub fn vandermonde_embedding(a: &Graph, eps_roots: f64, scale: f64) -> Result<LogitMatrix> {
    let n = a.n();
    if n > MAX_EMBEDDING_N {
        return Err(Error::OutOfRange {
            name: "n",
            value: n as f64,
            range: "<= 20",
        });
    }
    if !(eps_roots > 0.0 && eps_roots < 1.0) {
        return Err(Error::OutOfRange {
            name: "eps_roots",
            value: eps_roots,
            range: "(0, 1)",
        });
    }
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::OutOfRange {
            name: "scale",
            value: scale,
            range: "(0, inf)",
        });
    }
    let mut w = DMatrix::zeros(n, n);
    for i in 0..n {
        let nbrs = a.neighbors(i);
        if nbrs.is_empty() {
            return Err(Error::IsolatedNode(i));
        }
        let pos: Vec<f64> = nbrs.iter().map(|&j| (j + 1) as f64).collect();
        let offsets: Vec<f64> = pos
            .iter()
            .enumerate()
            .map(|(k, &tk)| {
                let denom: f64 = pos
                    .iter()
                    .enumerate()
                    .filter(|&(l, _)| l != k)
                    .map(|(_, &tl)| tk - tl)
                    .product();
                eps_roots / denom
            })
            .collect();
        for col in 0..n {
            let t = (col + 1) as f64;
            let prod: f64 = pos
                .iter()
                .zip(&offsets)
                .map(|(&tj, &off)| (t - tj - off) * (t - tj + off))
                .product();
            let value = -scale * prod / (eps_roots * eps_roots);
            if !value.is_finite() {
                return Err(Error::Numerical(format!(
                    "polynomial value overflowed at ({i}, {col})"
                )));
            }
            w[(i, col)] = value;
        }
    }
    Ok(LogitMatrix {
        w,
        rank_bound: 2 * a.max_degree() + 1,
    })
}

/// Number of singular values above `rel_tol · σ_max`.
pub fn numerical_rank(m: &DMatrix<f64>, rel_tol: f64) -> usize {
    let sv = m.singular_values();
    let max = sv.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * max).count()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EmbeddingCheck {
    /// `max |softmax_rows(W) − D⁻¹A|`.
    pub max_error: f64,
    pub numerical_rank: usize,
}

pub fn verify_embedding(a: &Graph, w: &LogitMatrix) -> Result<EmbeddingCheck> {
    if w.w.nrows() != a.n() || w.w.ncols() != a.n() {
        return Err(Error::DimensionMismatch(a.n(), w.w.nrows()));
    }
    let target = unconstrained_optimum(a)?;
    let got = rowwise_softmax(&w.w);
    let max_error = (&got - &target).amax();
    Ok(EmbeddingCheck {
        max_error,
        numerical_rank: numerical_rank(&w.w, RANK_TOL),
    })
}
