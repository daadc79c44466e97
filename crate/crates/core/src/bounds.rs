//! Numerical checks of the overlap bounds for edge-independent models.
//!
//! For any valid `P` with overlap `Ov` and volume `V`:
//!
//! * expected triangles `≤ (√2/3)·Ov^{3/2}·V^{3/2}`;
//! * expected k-cycles `≤ (2^{k/2}/2k)·Ov^{k/2}·V^{k/2}`;
//! * expected global clustering is `O(Ov^{3/2}·n / V^{1/2})`, which is
//!   tight (`Θ(γ)`) for Erdős–Rényi matrices.
//!
//! The Erdős–Rényi matrix `P_ij = γ` is the tight example for all three.

use std::fmt;

use crate::error::{Error, Result};
use crate::prob::{ProbMatrix, MAX_EXACT_K, MAX_EXACT_N};
use crate::rng;
use crate::stats::global_clustering;

/// Relative slack allowed on exact comparisons.
pub const EXACT_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundMode {
    ExactTrace,
    BruteForce,
    MonteCarlo,
}

impl fmt::Display for BoundMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundMode::ExactTrace => "exact-trace",
            BoundMode::BruteForce => "brute-force",
            BoundMode::MonteCarlo => "monte-carlo",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub holds: bool,
    pub mode: BoundMode,
    /// Standard error of `lhs` in Monte-Carlo mode.
    pub std_err: Option<f64>,
    /// Value `lhs` is compared against in Monte-Carlo mode.
    pub target: Option<f64>,
}

impl BoundReport {
    pub const CSV_HEADER: &'static str = "mode,lhs,rhs,ratio,holds,std_err,target";

    fn exact(lhs: f64, rhs: f64, mode: BoundMode) -> Self {
        BoundReport {
            lhs,
            rhs,
            ratio: ratio(lhs, rhs),
            holds: lhs <= rhs * (1.0 + EXACT_SLACK),
            mode,
            std_err: None,
            target: None,
        }
    }

    pub fn to_csv_row(&self) -> String {
        let opt = |x: Option<f64>| x.map_or("nan".to_string(), |v| format!("{v:.12e}"));
        format!(
            "{},{:.12e},{:.12e},{:.12e},{},{},{}",
            self.mode,
            self.lhs,
            self.rhs,
            self.ratio,
            self.holds,
            opt(self.std_err),
            opt(self.target)
        )
    }
}

fn ratio(lhs: f64, rhs: f64) -> f64 {
    if rhs > 0.0 {
        lhs / rhs
    } else if lhs == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// `(√2/3)·(Ov·V)^{3/2}`.
pub fn triangle_bound(overlap: f64, volume: f64) -> f64 {
    std::f64::consts::SQRT_2 / 3.0 * (overlap * volume).powf(1.5)
}

/// `(2^{k/2}/2k)·(Ov·V)^{k/2}`.
pub fn kcycle_bound(overlap: f64, volume: f64, k: usize) -> f64 {
    let half = k as f64 / 2.0;
    2f64.powf(half) / (2 * k) as f64 * (overlap * volume).powf(half)
}

/// Expected triangles (by trace) against the overlap bound.
pub fn check_triangle_bound(p: &ProbMatrix) -> Result<BoundReport> {
    let rhs = triangle_bound(p.overlap()?, p.volume());
    Ok(BoundReport::exact(p.expected_triangles(), rhs, BoundMode::ExactTrace))
}

/// Expected k-cycles against the overlap bound. Small matrices use the
/// exhaustive cycle count; larger ones the closed-walk trace, which is
/// itself an upper bound on the cycle count.
pub fn check_kcycle_bound(p: &ProbMatrix, k: usize) -> Result<BoundReport> {
    if !(3..=MAX_EXACT_K).contains(&k) {
        return Err(Error::OutOfRange {
            name: "k",
            value: k as f64,
            range: "[3, 6]",
        });
    }
    let rhs = kcycle_bound(p.overlap()?, p.volume(), k);
    if p.n() <= MAX_EXACT_N {
        Ok(BoundReport::exact(p.expected_kcycles_exact(k)?, rhs, BoundMode::BruteForce))
    } else {
        Ok(BoundReport::exact(p.expected_kcycles_trace(k)?, rhs, BoundMode::ExactTrace))
    }
}

/// Erdős–Rényi matrix `P_ij = γ` for `i ≠ j`, with `γ ∈ (0, 1]`.
pub fn er_construction(n: usize, gamma: f64) -> Result<ProbMatrix> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::OutOfRange {
            name: "gamma",
            value: gamma,
            range: "(0, 1]",
        });
    }
    ProbMatrix::erdos_renyi(n, gamma)
}

fn choose(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Closed-form triangle bound report for `ER(n, γ)`:
/// `γ³·C(n,3)` against `(√2/3)·(γ²·C(n,2))^{3/2}`.
pub fn er_triangle_report(n: usize, gamma: f64) -> Result<BoundReport> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::OutOfRange {
            name: "gamma",
            value: gamma,
            range: "(0, 1]",
        });
    }
    let lhs = gamma.powi(3) * choose(n, 3);
    let rhs = triangle_bound(gamma, gamma * choose(n, 2));
    Ok(BoundReport::exact(lhs, rhs, BoundMode::ExactTrace))
}

/// Expected k-cycles of `ER(n, γ)` divided by `γ^{k/2}·V^{k/2}/k!`. The
/// tightness statement says this stays bounded by constants depending only
/// on `k`, whatever `n` and `γ`.
pub fn er_kcycle_tightness_ratio(n: usize, gamma: f64, k: usize) -> Result<f64> {
    let p = er_construction(n, gamma)?;
    let exact = p.expected_kcycles_exact(k)?;
    let k_fact: f64 = (1..=k).map(|x| x as f64).product();
    let reference = (gamma * p.volume()).powf(k as f64 / 2.0) / k_fact;
    Ok(exact / reference)
}

/// Monte-Carlo check that samples of `ER(n, γ)` have mean global
/// clustering within `tolerance` of `γ`.
///
/// `lhs` is the sample mean, `rhs` the bound expression
/// `Ov^{3/2}·n / V^{1/2}` with its unknown constant set to 1 (reported
/// only), `target` is `γ`, and `holds` means `|lhs − γ| <= tolerance`.
pub fn check_cc_tightness(
    n: usize,
    gamma: f64,
    samples: usize,
    seed: u64,
    tolerance: f64,
) -> Result<BoundReport> {
    if samples < 3 {
        return Err(Error::OutOfRange {
            name: "samples",
            value: samples as f64,
            range: ">= 3",
        });
    }
    let p = er_construction(n, gamma)?;
    let volume = p.volume();
    if volume < 2.0 * n as f64 {
        return Err(Error::OutOfRange {
            name: "volume",
            value: volume,
            range: ">= 2n",
        });
    }
    // samples without a wedge have no clustering coefficient and are skipped
    let values: Vec<f64> = (0..samples)
        .filter_map(|s| global_clustering(&p.sample(rng::derive_seed(seed, s as u64))))
        .collect();
    if values.len() < 2 {
        return Err(Error::Numerical(
            "fewer than two samples had a defined clustering coefficient".into(),
        ));
    }
    let count = values.len() as f64;
    let mean = values.iter().sum::<f64>() / count;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1.0);
    let rhs = gamma.powf(1.5) * n as f64 / volume.sqrt();
    Ok(BoundReport {
        lhs: mean,
        rhs,
        ratio: ratio(mean, rhs),
        holds: (mean - gamma).abs() <= tolerance,
        mode: BoundMode::MonteCarlo,
        std_err: Some((var / count).sqrt()),
        target: Some(gamma),
    })
}
