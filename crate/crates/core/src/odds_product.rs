//! The odds-product model: node logits `ℓ` and `P_ij = σ(ℓ_i + ℓ_j)`.
//!
//! Logits are fitted so that the expected degrees `P·1` match a target
//! degree sequence, by damped Newton–Raphson on the degree residual. The
//! diagonal is excluded everywhere (no self-loops), so the expected degree
//! of node `i` is `Σ_{k≠i} σ(ℓ_i + ℓ_k)`.

use log::debug;
use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::prob::ProbMatrix;

/// Largest number of step halvings per Newton iteration.
pub const MAX_BACKTRACK: usize = 30;
const RIDGE: f64 = 1e-12;

#[inline]
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Per-node logits. Nodes left out of a fit (target degree 0) hold
/// `-inf`, which maps to probability 0 against every finite logit.
#[derive(Clone, Debug, PartialEq)]
pub struct LogitVector(pub Vec<f64>);

impl LogitVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// `σ(ℓ_i + ℓ_j)` off the diagonal, zero on it.
    pub fn to_prob_matrix(&self) -> ProbMatrix {
        ProbMatrix::from_fn(self.len(), |i, j| sigmoid(self.0[i] + self.0[j]))
            .expect("sigmoid lies in [0, 1]")
    }
}

/// Convergence trace of a fit.
#[derive(Clone, Debug, PartialEq)]
pub struct FitReport {
    pub iterations: usize,
    /// `‖P·1 − d‖₂` before the first step and after every accepted step.
    pub residual_history: Vec<f64>,
    pub converged: bool,
    pub final_max_abs_error: f64,
    /// Set when a Newton system needed the `1e-12·I` ridge.
    pub ridge_applied: bool,
}

impl FitReport {
    /// `iteration,residual` CSV.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("iteration,residual\n");
        for (k, r) in self.residual_history.iter().enumerate() {
            out.push_str(&format!("{k},{r:.6e}\n"));
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitOptions {
    /// Stop once `‖P·1 − d‖₂ <= epsilon`.
    pub epsilon: f64,
    pub max_iter: usize,
    /// Halve the step while the residual does not decrease.
    pub damping: bool,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            epsilon: 1e-6,
            max_iter: 100,
            damping: true,
        }
    }
}

#[derive(Clone, Debug)]
pub struct OddsProductFit {
    pub logits: LogitVector,
    pub p: ProbMatrix,
    pub report: FitReport,
}

/// Expected degrees `d̂_i = Σ_{k≠i} σ(ℓ_i + ℓ_k)`.
pub fn predicted_degrees(logits: &[f64]) -> Vec<f64> {
    let n = logits.len();
    (0..n)
        .map(|i| {
            (0..n)
                .filter(|&k| k != i)
                .map(|k| sigmoid(logits[i] + logits[k]))
                .sum()
        })
        .collect()
}

/// Jacobian of the expected degrees with respect to the logits:
/// `J = B + diag(B·1)` with `B = P ∘ (1 − P)` and a zero diagonal.
pub fn degree_jacobian(p: &ProbMatrix) -> DMatrix<f64> {
    jacobian_of(p.as_matrix())
}

/// Fits logits to the degree sequence `d`.
///
/// Zero-degree nodes are removed before fitting and come back as isolated
/// rows and columns of zeros. Returns [`Error::NonConvergence`] carrying the
/// report when the residual cannot be driven below `epsilon`.
pub fn fit_odds_product(d: &[usize], opts: &FitOptions) -> Result<OddsProductFit> {
    if !(opts.epsilon > 0.0) {
        return Err(Error::OutOfRange {
            name: "epsilon",
            value: opts.epsilon,
            range: "> 0",
        });
    }
    let n = d.len();
    let active: Vec<usize> = (0..n).filter(|&i| d[i] > 0).collect();
    let target: Vec<f64> = active.iter().map(|&i| d[i] as f64).collect();
    let na = active.len();
    if let Some(&i) = active.iter().find(|&&i| d[i] > na.saturating_sub(1)) {
        return Err(Error::InfeasibleDegrees(format!(
            "node {i} has degree {} but only {} other nodes have positive degree",
            d[i],
            na.saturating_sub(1)
        )));
    }

    let (sub_logits, report) = newton(&target, opts)?;
    let mut logits = vec![f64::NEG_INFINITY; n];
    for (k, &i) in active.iter().enumerate() {
        logits[i] = sub_logits[k];
    }
    let logits = LogitVector(logits);
    let p = logits.to_prob_matrix();
    Ok(OddsProductFit { logits, p, report })
}

/// Newton–Raphson on `d̂(ℓ) − d = 0`, starting from `ℓ = 0`.
fn newton(target: &[f64], opts: &FitOptions) -> Result<(Vec<f64>, FitReport)> {
    let n = target.len();
    let d = DVector::from_column_slice(target);
    let mut logits = DVector::zeros(n);
    let mut p = logit_matrix(&logits);
    let mut residual = row_sums(&p) - &d;
    let mut norm = residual.norm();
    let mut report = FitReport {
        iterations: 0,
        residual_history: vec![norm],
        converged: false,
        final_max_abs_error: residual.amax(),
        ridge_applied: false,
    };

    while norm > opts.epsilon && report.iterations < opts.max_iter {
        let jac = jacobian_of(&p);
        let (step, ridged) = solve_spd(jac, &residual)?;
        report.ridge_applied |= ridged;

        let mut eta = 1.0;
        let mut accepted = None;
        for _ in 0..=MAX_BACKTRACK {
            let trial = &logits - &step * eta;
            let trial_p = logit_matrix(&trial);
            let trial_r = row_sums(&trial_p) - &d;
            let trial_norm = trial_r.norm();
            if !opts.damping || trial_norm < norm {
                accepted = Some((trial, trial_p, trial_r, trial_norm));
                break;
            }
            eta *= 0.5;
        }
        let Some((l, tp, r, nr)) = accepted else {
            debug!("line search failed at residual {norm:.3e}");
            report.final_max_abs_error = residual.amax();
            return Err(Error::NonConvergence {
                report: Box::new(report),
            });
        };
        logits = l;
        p = tp;
        residual = r;
        norm = nr;
        report.iterations += 1;
        report.residual_history.push(norm);
        if !norm.is_finite() {
            break;
        }
    }

    report.final_max_abs_error = residual.amax();
    report.converged = norm <= opts.epsilon;
    if !report.converged {
        return Err(Error::NonConvergence {
            report: Box::new(report),
        });
    }
    Ok((logits.as_slice().to_vec(), report))
}

fn logit_matrix(logits: &DVector<f64>) -> DMatrix<f64> {
    let n = logits.len();
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            0.0
        } else {
            sigmoid(logits[i] + logits[j])
        }
    })
}

fn row_sums(p: &DMatrix<f64>) -> DVector<f64> {
    // symmetric, so column sums are row sums and contiguous in memory
    DVector::from_iterator(p.ncols(), p.column_iter().map(|c| c.sum()))
}

fn jacobian_of(p: &DMatrix<f64>) -> DMatrix<f64> {
    let mut j = p.map(|x| x * (1.0 - x));
    for i in 0..j.ncols() {
        j[(i, i)] = j.column(i).sum();
    }
    j
}

/// Solves `J x = r`. `J` is symmetric and diagonally dominant, so Cholesky
/// normally succeeds; LU with partial pivoting and then a ridge are the
/// fallbacks for nearly saturated fits.
fn solve_spd(jac: DMatrix<f64>, r: &DVector<f64>) -> Result<(DVector<f64>, bool)> {
    if let Some(chol) = jac.clone().cholesky() {
        let x = chol.solve(r);
        if x.iter().all(|v| v.is_finite()) {
            return Ok((x, false));
        }
    }
    if let Some(x) = jac.clone().lu().solve(r) {
        if x.iter().all(|v| v.is_finite()) {
            return Ok((x, false));
        }
    }
    let n = jac.nrows();
    let ridged = jac + DMatrix::<f64>::identity(n, n) * RIDGE;
    ridged
        .lu()
        .solve(r)
        .filter(|x| x.iter().all(|v| v.is_finite()))
        .map(|x| (x, true))
        .ok_or_else(|| Error::Solver("singular Jacobian".into()))
}
