//! Overlap sweeps: build every model over its knob grid, sample from it and
//! summarize how the eight statistics move as overlap grows.

use std::fmt::Write as _;
use std::path::PathBuf;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::models::{ModelKind, ModelSpec, PreparedModel};
use crate::odds_product::FitOptions;
use crate::prob::ProbMatrix;
use crate::rng::{derive_seed, hash_bytes};
use crate::stats::{compare, StatsRecord};

pub const DEFAULT_SAMPLES: usize = 5;
pub const DEFAULT_OVERLAP_TRIALS: usize = 20;

/// One model and the knob values to evaluate it at.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelGrid {
    pub kind: ModelKind,
    pub knobs: Vec<f64>,
    pub fit: FitOptions,
}

/// Sweep settings, usually read from a `key = value` file:
///
/// ```text
/// input = citeseer.txt
/// samples = 5
/// seed = 7
///
/// [linear]
/// omega = 0, 0.5, 1
///
/// [tsvd]
/// rank = 4, 16, 64
/// ```
///
/// Top-level keys: `input`, `samples`, `seed`, `output_dir`, `plot`,
/// `workers` (0 means all cores) and `overlap_trials`. A model section holds
/// its knob list (`omega`, `h` or `rank`) and optionally `epsilon` and
/// `max_iter` for the odds-product fit.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub input: Option<PathBuf>,
    pub models: Vec<ModelGrid>,
    pub samples: usize,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub plot: bool,
    pub workers: usize,
    pub overlap_trials: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            input: None,
            models: Vec::new(),
            samples: DEFAULT_SAMPLES,
            seed: 0,
            output_dir: PathBuf::from("."),
            plot: false,
            workers: 0,
            overlap_trials: DEFAULT_OVERLAP_TRIALS,
        }
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        let mut current: Option<usize> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let err = |msg: String| Error::Parse { line: line_no, msg };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                let kind: ModelKind = name.trim().parse().map_err(|e: Error| err(e.to_string()))?;
                if cfg.models.iter().any(|m| m.kind == kind) {
                    return Err(err(format!("duplicate section [{kind}]")));
                }
                cfg.models.push(ModelGrid {
                    kind,
                    knobs: Vec::new(),
                    fit: FitOptions::default(),
                });
                current = Some(cfg.models.len() - 1);
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| err(format!("expected key = value, got {line:?}")))?;
            match current {
                None => match key {
                    "input" => cfg.input = Some(PathBuf::from(value)),
                    "samples" => cfg.samples = parse_num(value).map_err(err)?,
                    "seed" => cfg.seed = parse_num(value).map_err(err)?,
                    "output_dir" => cfg.output_dir = PathBuf::from(value),
                    "plot" => cfg.plot = parse_num(value).map_err(err)?,
                    "workers" => cfg.workers = parse_num(value).map_err(err)?,
                    "overlap_trials" => cfg.overlap_trials = parse_num(value).map_err(err)?,
                    _ => return Err(err(format!("unknown key {key:?}"))),
                },
                Some(m) => {
                    let grid = &mut cfg.models[m];
                    match key {
                        k if k == grid.kind.knob_name() => {
                            grid.knobs = value
                                .split(',')
                                .map(|v| parse_num::<f64>(v.trim()))
                                .collect::<std::result::Result<_, _>>()
                                .map_err(err)?;
                        }
                        "epsilon" => grid.fit.epsilon = parse_num(value).map_err(err)?,
                        "max_iter" => grid.fit.max_iter = parse_num(value).map_err(err)?,
                        _ => {
                            return Err(err(format!(
                                "unknown key {key:?} in [{}] (knob is {:?})",
                                grid.kind,
                                grid.kind.knob_name()
                            )))
                        }
                    }
                }
            }
        }
        if cfg.samples == 0 {
            return Err(Error::Config("samples must be at least 1".into()));
        }
        if cfg.overlap_trials == 0 {
            return Err(Error::Config("overlap_trials must be at least 1".into()));
        }
        Ok(cfg)
    }

    /// Every grid point, after checking knobs against a graph on `n` nodes.
    pub fn grid_points(&self, n: usize) -> Result<Vec<ModelSpec>> {
        let mut out = Vec::new();
        for grid in &self.models {
            if grid.knobs.is_empty() {
                return Err(Error::Config(format!("[{}] has no knob values", grid.kind)));
            }
            for &knob in &grid.knobs {
                let spec = ModelSpec {
                    kind: grid.kind,
                    knob,
                    fit: grid.fit,
                };
                spec.validate(n)?;
                out.push(spec);
            }
        }
        if out.is_empty() {
            return Err(Error::Config("no model sections".into()));
        }
        Ok(out)
    }
}

fn parse_num<T: std::str::FromStr>(s: &str) -> std::result::Result<T, String> {
    s.parse().map_err(|_| format!("cannot parse {s:?}"))
}

/// Aggregated result at one grid point.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub model: ModelKind,
    pub knob: f64,
    /// `None` on success, otherwise the reason the point failed.
    pub failure: Option<String>,
    pub volume: Option<f64>,
    pub overlap_expected: Option<f64>,
    pub overlap_empirical: Option<f64>,
    pub samples: usize,
    /// Per-statistic mean over samples, in [`StatsRecord::COLUMNS`] order.
    pub mean: [Option<f64>; 8],
    pub std: [Option<f64>; 8],
}

impl SweepRow {
    pub fn csv_header() -> String {
        let mut h = String::from(
            "model,knob,status,samples,volume,overlap_expected,overlap_empirical",
        );
        for c in StatsRecord::COLUMNS {
            let _ = write!(h, ",{c}_mean,{c}_std");
        }
        h
    }

    pub fn is_ok(&self) -> bool {
        self.failure.is_none()
    }

    pub fn to_csv_row(&self) -> String {
        let mut out = format!(
            "{},{},{},{}",
            self.model,
            self.knob,
            if self.is_ok() { "ok" } else { "failed" },
            self.samples
        );
        for v in [self.volume, self.overlap_expected, self.overlap_empirical] {
            push_num(&mut out, v);
        }
        for k in 0..8 {
            push_num(&mut out, self.mean[k]);
            push_num(&mut out, self.std[k]);
        }
        out
    }

    fn failed(spec: &ModelSpec, reason: String) -> Self {
        SweepRow {
            model: spec.kind,
            knob: spec.knob,
            failure: Some(reason),
            volume: None,
            overlap_expected: None,
            overlap_empirical: None,
            samples: 0,
            mean: [None; 8],
            std: [None; 8],
        }
    }
}

fn push_num(out: &mut String, v: Option<f64>) {
    match v {
        Some(x) if x.is_finite() => {
            let _ = write!(out, ",{x:.10}");
        }
        _ => out.push_str(",nan"),
    }
}

/// Seed for sample `index` at a grid point. Depends only on the point and
/// the base seed, so adding points leaves existing rows unchanged.
pub fn sample_seed(seed: u64, kind: ModelKind, knob: f64, index: u64) -> u64 {
    let mut key = kind.name().as_bytes().to_vec();
    key.extend_from_slice(&knob.to_bits().to_le_bytes());
    key.extend_from_slice(&index.to_le_bytes());
    seed ^ hash_bytes(&key)
}

/// Builds, samples and summarizes one grid point. Failures become a row.
pub fn run_point(
    reference: &Graph,
    spec: &ModelSpec,
    samples: usize,
    overlap_trials: usize,
    seed: u64,
) -> SweepRow {
    summarize(reference, spec, spec.build(reference), samples, overlap_trials, seed)
}

fn summarize(
    reference: &Graph,
    spec: &ModelSpec,
    built: Result<ProbMatrix>,
    samples: usize,
    overlap_trials: usize,
    seed: u64,
) -> SweepRow {
    match built.and_then(|p| try_point(reference, spec, &p, samples, overlap_trials, seed)) {
        Ok(row) => row,
        Err(e) => {
            log::warn!("{} {} = {}: {e}", spec.kind, spec.kind.knob_name(), spec.knob);
            SweepRow::failed(spec, e.to_string())
        }
    }
}

fn try_point(
    reference: &Graph,
    spec: &ModelSpec,
    p: &ProbMatrix,
    samples: usize,
    overlap_trials: usize,
    seed: u64,
) -> Result<SweepRow> {
    let overlap_seed = derive_seed(sample_seed(seed, spec.kind, spec.knob, u64::MAX), 0);
    let records = (0..samples as u64)
        .map(|i| compare(reference, &p.sample(sample_seed(seed, spec.kind, spec.knob, i))))
        .collect::<Result<Vec<_>>>()?;
    let (mean, std) = aggregate(&records);
    Ok(SweepRow {
        model: spec.kind,
        knob: spec.knob,
        failure: None,
        volume: Some(p.volume()),
        overlap_expected: Some(p.overlap()?),
        overlap_empirical: Some(p.empirical_overlap(overlap_seed, overlap_trials)?),
        samples,
        mean,
        std,
    })
}

/// Mean and sample standard deviation of each statistic over the records
/// where it is defined.
pub fn aggregate(records: &[StatsRecord]) -> ([Option<f64>; 8], [Option<f64>; 8]) {
    let mut mean = [None; 8];
    let mut std = [None; 8];
    for k in 0..8 {
        let xs: Vec<f64> = records.iter().filter_map(|r| r.values()[k]).collect();
        if xs.is_empty() {
            continue;
        }
        let n = xs.len() as f64;
        let mu = xs.iter().sum::<f64>() / n;
        let var = if xs.len() > 1 {
            xs.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        mean[k] = Some(mu);
        std[k] = Some(var.sqrt());
    }
    (mean, std)
}

/// Evaluates every grid point in parallel and returns rows sorted by
/// (model, knob). Work shared between knob values of one model is done
/// once per model.
pub fn run_sweep(reference: &Graph, cfg: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    cfg.grid_points(reference.n())?;
    let work = || {
        cfg.models
            .par_iter()
            .flat_map(|grid| {
                let prepared = PreparedModel::new(grid.kind, reference, grid.fit);
                if let Err(e) = &prepared {
                    log::warn!("preparing {}: {e}", grid.kind);
                }
                grid.knobs
                    .par_iter()
                    .map(|&knob| {
                        let spec = ModelSpec {
                            kind: grid.kind,
                            knob,
                            fit: grid.fit,
                        };
                        // without the shared work, build each point on its own so that
                        // points which do not need it (ccop at ω = 1) still succeed
                        let built = match &prepared {
                            Ok(pm) => pm.build(knob),
                            Err(_) => spec.build(reference),
                        };
                        summarize(reference, &spec, built, cfg.samples, cfg.overlap_trials, cfg.seed)
                    })
                    .collect::<Vec<_>>()
            })
            .collect::<Vec<_>>()
    };
    let mut rows = if cfg.workers > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build()
            .map_err(|e| Error::Config(e.to_string()))?
            .install(work)
    } else {
        work()
    };
    rows.sort_by(|a, b| a.model.cmp(&b.model).then(a.knob.total_cmp(&b.knob)));
    Ok(rows)
}

pub fn rows_to_csv(rows: &[SweepRow]) -> String {
    let mut out = SweepRow::csv_header();
    out.push('\n');
    for r in rows {
        out.push_str(&r.to_csv_row());
        out.push('\n');
    }
    out
}

/// Statistics of the reference against itself, used as the target line in
/// plots.
pub fn reference_record(reference: &Graph) -> Result<StatsRecord> {
    compare(reference, reference)
}

const PANEL_W: f64 = 260.0;
const PANEL_H: f64 = 200.0;
const MARGIN: f64 = 40.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

/// 2×4 grid of line charts, one per statistic, with overlap on the x-axis,
/// one polyline per model and the reference value as a dashed line.
pub fn render_svg(rows: &[SweepRow], reference: Option<&StatsRecord>) -> String {
    let width = 4.0 * (PANEL_W + MARGIN) + MARGIN;
    let height = 2.0 * (PANEL_H + MARGIN) + MARGIN + 30.0;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let ok: Vec<&SweepRow> = rows.iter().filter(|r| r.is_ok()).collect();
    let models: Vec<ModelKind> = ModelKind::ALL
        .into_iter()
        .filter(|k| ok.iter().any(|r| r.model == *k))
        .collect();

    for (k, name) in StatsRecord::COLUMNS.iter().enumerate() {
        let x0 = MARGIN + (k % 4) as f64 * (PANEL_W + MARGIN);
        let y0 = MARGIN + (k / 4) as f64 * (PANEL_H + MARGIN);
        let target = reference.and_then(|r| r.values()[k]);
        let mut ys: Vec<f64> = ok.iter().filter_map(|r| r.mean[k]).collect();
        ys.extend(target);
        let (lo, hi) = y_range(&ys);
        let px = |x: f64| x0 + x.clamp(0.0, 1.0) * PANEL_W;
        let py = |y: f64| y0 + PANEL_H - (y - lo) / (hi - lo) * PANEL_H;

        let _ = writeln!(
            s,
            r##"<rect x="{x0}" y="{y0}" width="{PANEL_W}" height="{PANEL_H}" fill="none" stroke="#888"/>"##
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">{name}</text>"#,
            x0 + PANEL_W / 2.0,
            y0 - 6.0
        );
        for (v, anchor_y) in [(lo, y0 + PANEL_H), (hi, y0 + 10.0)] {
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{anchor_y}" text-anchor="end">{}</text>"#,
                x0 - 3.0,
                tick(v)
            );
        }
        for x in [0.0, 0.5, 1.0] {
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{}" text-anchor="middle">{x}</text>"#,
                px(x),
                y0 + PANEL_H + 14.0
            );
        }
        if let Some(t) = target {
            let _ = writeln!(
                s,
                r##"<line x1="{x0}" x2="{}" y1="{y:.2}" y2="{y:.2}" stroke="#000" stroke-dasharray="4 3"/>"##,
                x0 + PANEL_W,
                y = py(t)
            );
        }
        for (mi, kind) in models.iter().enumerate() {
            let mut pts: Vec<(f64, f64)> = ok
                .iter()
                .filter(|r| r.model == *kind)
                .filter_map(|r| Some((r.overlap_expected?, r.mean[k]?)))
                .collect();
            pts.sort_by(|a, b| a.0.total_cmp(&b.0));
            if pts.is_empty() {
                continue;
            }
            let coords: Vec<String> = pts
                .iter()
                .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
                .collect();
            let _ = writeln!(
                s,
                r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.5"/>"#,
                coords.join(" "),
                COLORS[mi % COLORS.len()]
            );
        }
    }

    let ly = height - 18.0;
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{ly}" text-anchor="middle">overlap</text>"#,
        width / 2.0
    );
    for (mi, kind) in models.iter().enumerate() {
        let lx = MARGIN + mi as f64 * 90.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" x2="{}" y1="{ly}" y2="{ly}" stroke="{}" stroke-width="2"/><text x="{}" y="{}">{kind}</text>"#,
            lx + 20.0,
            COLORS[mi % COLORS.len()],
            lx + 24.0,
            ly + 4.0
        );
    }
    s.push_str("</svg>\n");
    s
}

fn y_range(ys: &[f64]) -> (f64, f64) {
    let lo = ys.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ys.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        return (lo - 0.5, hi + 0.5);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

fn tick(v: f64) -> String {
    if v.abs() >= 1000.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.3}")
    }
}
