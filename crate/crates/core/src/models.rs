//! Overlap-tunable baseline generators.
//!
//! Every model maps an input graph to a [`ProbMatrix`] whose volume equals
//! the input's edge count; a single knob moves it between a generic model
//! (low overlap) and the input itself (overlap 1).

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::odds_product::{fit_odds_product, FitOptions};
use crate::prob::ProbMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelKind {
    /// Uniform density mixed with the adjacency matrix.
    Linear,
    /// Convex combination of the odds-product fit and the adjacency matrix.
    Ccop,
    /// Odds-product fit with all edges at the top-h degree nodes held fixed.
    Hdop,
    /// Clipped, volume-shifted rank-k truncated SVD.
    Tsvd,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [
        ModelKind::Linear,
        ModelKind::Ccop,
        ModelKind::Hdop,
        ModelKind::Tsvd,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Linear => "linear",
            ModelKind::Ccop => "ccop",
            ModelKind::Hdop => "hdop",
            ModelKind::Tsvd => "tsvd",
        }
    }

    /// Name of the knob in configs and CSV output.
    pub fn knob_name(self) -> &'static str {
        match self {
            ModelKind::Linear | ModelKind::Ccop => "omega",
            ModelKind::Hdop => "h",
            ModelKind::Tsvd => "rank",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown model {s:?}")))
    }
}

/// A model together with its knob value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelSpec {
    pub kind: ModelKind,
    /// ω for linear and ccop, h for hdop, rank for tsvd.
    pub knob: f64,
    pub fit: FitOptions,
}

impl ModelSpec {
    pub fn new(kind: ModelKind, knob: f64) -> Self {
        ModelSpec {
            kind,
            knob,
            fit: FitOptions::default(),
        }
    }

    /// Checks the knob against its range for a graph on `n` nodes.
    pub fn validate(&self, n: usize) -> Result<()> {
        let ok = match self.kind {
            ModelKind::Linear | ModelKind::Ccop => (0.0..=1.0).contains(&self.knob),
            ModelKind::Hdop => is_count(self.knob) && self.knob <= n as f64,
            ModelKind::Tsvd => is_count(self.knob) && self.knob >= 1.0 && self.knob <= n as f64,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::OutOfRange {
                name: self.kind.knob_name(),
                value: self.knob,
                range: match self.kind {
                    ModelKind::Linear | ModelKind::Ccop => "[0, 1]",
                    ModelKind::Hdop => "integer in [0, n]",
                    ModelKind::Tsvd => "integer in [1, n]",
                },
            })
        }
    }

    pub fn build(&self, a: &Graph) -> Result<ProbMatrix> {
        self.validate(a.n())?;
        match self.kind {
            ModelKind::Linear => linear_model(a, self.knob),
            ModelKind::Ccop => ccop(a, self.knob, &self.fit),
            ModelKind::Hdop => hdop(a, self.knob as usize, &self.fit),
            ModelKind::Tsvd => tsvd_model(a, self.knob as usize),
        }
    }
}

fn is_count(x: f64) -> bool {
    x >= 0.0 && x.fract() == 0.0
}

/// `(1 − ω)·q + ω·A` with `q = 2m / (n(n − 1))` on every off-diagonal pair.
pub fn linear_model(a: &Graph, omega: f64) -> Result<ProbMatrix> {
    let n = a.n();
    let q = if n > 1 {
        2.0 * a.m() as f64 / (n * (n - 1)) as f64
    } else {
        0.0
    };
    let base = ProbMatrix::from_fn(n, |_, _| q)?;
    base.convex_combine(&a.to_dense()?, omega)
}

/// Odds-product fit to the degrees of `a`, mixed with `a` by `omega`.
pub fn ccop(a: &Graph, omega: f64, fit: &FitOptions) -> Result<ProbMatrix> {
    if !(0.0..=1.0).contains(&omega) {
        return Err(Error::OutOfRange {
            name: "omega",
            value: omega,
            range: "[0, 1]",
        });
    }
    let dense = a.to_dense()?;
    if omega == 1.0 {
        return Ok(dense);
    }
    let fitted = fit_odds_product(&a.degrees(), fit)?;
    fitted.p.convex_combine(&dense, omega)
}

/// Nodes sorted by decreasing degree, ties by increasing id.
pub fn degree_order(a: &Graph) -> Vec<usize> {
    let mut order: Vec<usize> = (0..a.n()).collect();
    order.sort_by(|&u, &v| a.degree(v).cmp(&a.degree(u)).then(u.cmp(&v)));
    order
}

/// Fixes every pair touching the `h` highest-degree nodes to its adjacency
/// value and fills the rest with an odds-product fit to the residual degrees
/// of the remaining nodes.
pub fn hdop(a: &Graph, h: usize, fit: &FitOptions) -> Result<ProbMatrix> {
    let n = a.n();
    if h > n {
        return Err(Error::OutOfRange {
            name: "h",
            value: h as f64,
            range: "integer in [0, n]",
        });
    }
    let order = degree_order(a);
    let mut fixed = vec![false; n];
    for &u in &order[..h] {
        fixed[u] = true;
    }
    let rest: Vec<usize> = (0..n).filter(|&u| !fixed[u]).collect();
    let residual: Vec<usize> = rest
        .iter()
        .map(|&u| a.neighbors(u).iter().filter(|&&v| !fixed[v]).count())
        .collect();
    let sub = if residual.iter().any(|&d| d > 0) {
        Some(fit_odds_product(&residual, fit)?.p)
    } else {
        None
    };

    let mut pos = vec![usize::MAX; n];
    for (k, &u) in rest.iter().enumerate() {
        pos[u] = k;
    }
    ProbMatrix::from_fn(n, |i, j| {
        if fixed[i] || fixed[j] {
            if a.has_edge(i, j) {
                1.0
            } else {
                0.0
            }
        } else {
            sub.as_ref().map_or(0.0, |p| p.get(pos[i], pos[j]))
        }
    })
}

/// Rank-`k` truncated SVD of the adjacency matrix, shifted so the volume
/// equals `m`, clipped to `[0, 1]` with a zero diagonal.
pub fn tsvd_model(a: &Graph, k: usize) -> Result<ProbMatrix> {
    check_rank(k, a.n())?;
    let eig = Spectrum::of(a.to_dense()?.as_matrix())?;
    tsvd_from_spectrum(a, &eig, k)
}

fn check_rank(k: usize, n: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::OutOfRange {
            name: "rank",
            value: k as f64,
            range: "integer in [1, n]",
        });
    }
    Ok(())
}

fn tsvd_from_spectrum(a: &Graph, eig: &Spectrum, k: usize) -> Result<ProbMatrix> {
    check_rank(k, a.n())?;
    let low_rank = eig.low_rank(k);
    let shift = fit_volume_shift(&low_rank, a.m() as f64)?;
    ProbMatrix::from_matrix(clip_shifted(&low_rank, shift))
}

/// Eigenpairs of a symmetric matrix ordered by decreasing `|λ|`, ties by
/// index.
#[derive(Clone, Debug)]
struct Spectrum {
    values: Vec<f64>,
    vectors: DMatrix<f64>,
    order: Vec<usize>,
}

impl Spectrum {
    fn of(m: &DMatrix<f64>) -> Result<Self> {
        let eig = SymmetricEigen::try_new(m.clone(), 1e-14, 0)
            .ok_or_else(|| Error::Numerical("eigendecomposition did not converge".into()))?;
        let values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&x, &y| values[y].abs().total_cmp(&values[x].abs()).then(x.cmp(&y)));
        Ok(Spectrum {
            values,
            vectors: eig.eigenvectors,
            order,
        })
    }

    fn low_rank(&self, k: usize) -> DMatrix<f64> {
        let n = self.vectors.nrows();
        let mut low = DMatrix::zeros(n, n);
        for &c in self.order.iter().take(k) {
            let u = self.vectors.column(c);
            low.ger(self.values[c], &u, &u, 1.0);
        }
        (&low + low.transpose()) * 0.5
    }
}

/// Best rank-`k` approximation of a symmetric matrix. Its singular values
/// are the absolute eigenvalues, so the top-k eigenpairs by magnitude give
/// the truncated SVD. The result is symmetrized as `(M + Mᵀ)/2`.
pub fn truncated_svd(m: &DMatrix<f64>, k: usize) -> Result<DMatrix<f64>> {
    Ok(Spectrum::of(m)?.low_rank(k))
}

/// One model on one graph with the work shared across knob values done
/// once: the odds-product fit for ccop and the eigendecomposition for tsvd.
pub struct PreparedModel<'a> {
    graph: &'a Graph,
    kind: ModelKind,
    fit: FitOptions,
    base: Base,
}

enum Base {
    None,
    Fit(ProbMatrix),
    Spectrum(Spectrum),
}

impl<'a> PreparedModel<'a> {
    pub fn new(kind: ModelKind, graph: &'a Graph, fit: FitOptions) -> Result<Self> {
        let base = match kind {
            ModelKind::Ccop => Base::Fit(fit_odds_product(&graph.degrees(), &fit)?.p),
            ModelKind::Tsvd => Base::Spectrum(Spectrum::of(graph.to_dense()?.as_matrix())?),
            ModelKind::Linear | ModelKind::Hdop => Base::None,
        };
        Ok(PreparedModel {
            graph,
            kind,
            fit,
            base,
        })
    }

    /// Same result as [`ModelSpec::build`] for this model and knob.
    pub fn build(&self, knob: f64) -> Result<ProbMatrix> {
        let spec = ModelSpec {
            kind: self.kind,
            knob,
            fit: self.fit,
        };
        spec.validate(self.graph.n())?;
        match &self.base {
            Base::Fit(p) => p.convex_combine(&self.graph.to_dense()?, knob),
            Base::Spectrum(eig) => tsvd_from_spectrum(self.graph, eig, knob as usize),
            Base::None => spec.build(self.graph),
        }
    }
}

fn clip_shifted(l: &DMatrix<f64>, shift: f64) -> DMatrix<f64> {
    let n = l.nrows();
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            0.0
        } else {
            (l[(i, j)] + shift).clamp(0.0, 1.0)
        }
    })
}

/// Finds `σ` with `Σ_{i<j} clip(L_ij + σ, 0, 1) = target`.
///
/// The volume is continuous, nondecreasing and piecewise linear in `σ` with
/// slope equal to the number of unclipped pairs. Newton steps are taken
/// from `σ = 0` and replaced by bisection whenever they leave the bracket.
pub fn fit_volume_shift(l: &DMatrix<f64>, target: f64) -> Result<f64> {
    let n = l.nrows();
    let pairs = (n * n.saturating_sub(1) / 2) as f64;
    if !(target > 0.0 && target <= pairs) {
        return Err(Error::OutOfRange {
            name: "target_volume",
            value: target,
            range: "(0, n(n-1)/2]",
        });
    }
    let upper: Vec<f64> = (0..n)
        .flat_map(|j| (0..j).map(move |i| (i, j)))
        .map(|(i, j)| 0.5 * (l[(i, j)] + l[(j, i)]))
        .collect();
    let volume_and_slope = |s: f64| {
        let mut vol = 0.0;
        let mut slope = 0usize;
        for &x in &upper {
            let y = x + s;
            if y <= 0.0 {
            } else if y >= 1.0 {
                vol += 1.0;
            } else {
                vol += y;
                slope += 1;
            }
        }
        (vol, slope as f64)
    };

    let max = upper.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = upper.iter().copied().fold(f64::INFINITY, f64::min);
    if target == pairs {
        return Ok(1.0 - min);
    }
    // f(lo) = 0 and f(hi) = pairs
    let mut lo = -max;
    let mut hi = 1.0 - min;
    let tol = 1e-10 * target;
    let mut s = 0.0_f64.clamp(lo, hi);
    for _ in 0..200 {
        let (vol, slope) = volume_and_slope(s);
        let gap = vol - target;
        if gap.abs() <= tol {
            return Ok(s);
        }
        if gap < 0.0 {
            lo = s;
        } else {
            hi = s;
        }
        let newton = if slope > 0.0 { s - gap / slope } else { f64::NAN };
        s = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= f64::EPSILON * (1.0 + hi.abs()) {
            break;
        }
    }
    let (vol, _) = volume_and_slope(s);
    if (vol - target).abs() <= 1e-6 * target {
        Ok(s)
    } else {
        Err(Error::Numerical(format!(
            "volume shift search stalled at {vol} for target {target}"
        )))
    }
}
