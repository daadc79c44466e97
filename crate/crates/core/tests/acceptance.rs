//! Acceptance suite. Every criterion runs in sequence inside one test so
//! that wall-clock budgets are measured without contention; each prints a
//! single PASS/FAIL line and the test fails if any criterion fails.
//!
//! Criterion 12 reads `citeseer.txt`, `cora.txt` and `polblogs.txt` from the
//! directory named by `EIGRAPH_DATA_DIR` when it is set.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use eigraph::bounds::{check_cc_tightness, check_kcycle_bound, check_triangle_bound, er_triangle_report};
use eigraph::cell::{vandermonde_embedding, verify_embedding, DEFAULT_EPS_ROOTS};
use eigraph::graph::{largest_connected_component, preprocess};
use eigraph::models::{linear_model, ModelKind, ModelSpec};
use eigraph::odds_product::{degree_jacobian, fit_odds_product, predicted_degrees, FitOptions};
use eigraph::stats::{char_path_length, global_clustering, spearman, triangle_counts};
use eigraph::sweep::{run_sweep, ExperimentConfig, ModelGrid};
use eigraph::synth::{
    bounded_degree_graph, gnp, powerlaw_configuration_graph, random_geometric_graph, random_prob_matrix,
    sparse_random_prob_matrix,
};
use eigraph::{Graph, ProbMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

/// Random P alternating dense entries with sparse supports.
fn mixed_p(n: usize, t: usize, rng: &mut ChaCha8Rng) -> ProbMatrix {
    if t % 2 == 0 {
        let max = rng.random_range(0.05..=1.0);
        random_prob_matrix(n, max, rng)
    } else {
        sparse_random_prob_matrix(n, (3.0 / n as f64).min(1.0), rng)
    }
}

fn c1_overlap_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for t in 0..500 {
        let n = rng.random_range(2..=50);
        let p = mixed_p(n, t, &mut rng);
        let half_f = p.frobenius_sq() / 2.0;
        if half_f == 0.0 {
            continue;
        }
        let lhs = p.overlap().unwrap() * p.volume();
        worst = worst.max((lhs - half_f).abs() / half_f);
        checked += 1;
    }
    outcome(
        worst <= 1e-9 && checked >= 450,
        format!("{checked} matrices, worst relative error {worst:.2e}"),
    )
}

fn c2_triangle_bound() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut violations = 0;
    let mut checked = 0;
    let mut max_ratio: f64 = 0.0;
    for t in 0..1000 {
        let n = rng.random_range(3..=30);
        let p = mixed_p(n, t, &mut rng);
        if p.volume() == 0.0 {
            continue;
        }
        let r = check_triangle_bound(&p).unwrap();
        checked += 1;
        max_ratio = max_ratio.max(r.ratio);
        if r.lhs > r.rhs {
            violations += 1;
        }
    }
    outcome(
        violations == 0,
        format!("{checked} matrices, {violations} violations, max lhs/rhs {max_ratio:.4}"),
    )
}

fn c3_er_tightness() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (n, want) in [(100, 0.9849), (1000, 0.9985)] {
        for gamma in [0.1, 0.5, 1.0] {
            let r = er_triangle_report(n, gamma).unwrap();
            ok &= (r.ratio - want).abs() <= 1e-3;
            if gamma == 0.5 {
                parts.push(format!("n={n}: {:.6}", r.ratio));
            }
        }
    }
    outcome(ok, parts.join(", "))
}

fn c4_kcycle_bound() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut bound_viol = 0;
    let mut trace_viol = 0;
    for t in 0..200 {
        let n = rng.random_range(5..=10);
        let k = if t % 2 == 0 { 4 } else { 5 };
        let p = mixed_p(n, t / 2, &mut rng);
        if p.volume() == 0.0 {
            continue;
        }
        let r = check_kcycle_bound(&p, k).unwrap();
        let exact = p.expected_kcycles_exact(k).unwrap();
        let trace = p.expected_kcycles_trace(k).unwrap();
        if !(r.lhs <= r.rhs) {
            bound_viol += 1;
        }
        if exact > trace * (1.0 + 1e-12) + 1e-12 {
            trace_viol += 1;
        }
    }
    outcome(
        bound_viol == 0 && trace_viol == 0,
        format!("bound violations {bound_viol}, trace violations {trace_viol}"),
    )
}

fn c5_cc_band() -> Outcome {
    let a = check_cc_tightness(500, 0.1, 5, 5, 0.02).unwrap();
    let b = check_cc_tightness(200, 0.5, 5, 55, 0.03).unwrap();
    outcome(
        a.holds && b.holds,
        format!("γ=0.1: {:.4}, γ=0.5: {:.4}", a.lhs, b.lhs),
    )
}

fn c6_odds_product() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let opts = FitOptions {
        epsilon: 1e-6,
        max_iter: 50,
        damping: true,
    };
    let mut worst_err: f64 = 0.0;
    let mut worst_iter = 0;
    let mut failures = 0;
    for _ in 0..20 {
        let g = powerlaw_configuration_graph(1000, 2.5, &mut rng);
        match fit_odds_product(&g.degrees(), &opts) {
            Ok(fit) => {
                worst_err = worst_err.max(fit.report.final_max_abs_error);
                worst_iter = worst_iter.max(fit.report.iterations);
                if !fit.report.converged || fit.report.final_max_abs_error > 1e-4 {
                    failures += 1;
                }
            }
            Err(_) => failures += 1,
        }
    }

    let mut jac_err: f64 = 0.0;
    let h = 1e-6;
    for _ in 0..20 {
        let n = rng.random_range(2..=8);
        let l: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
        let p = eigraph::LogitVector(l.clone()).to_prob_matrix();
        let j = degree_jacobian(&p);
        for c in 0..n {
            let mut up = l.clone();
            let mut dn = l.clone();
            up[c] += h;
            dn[c] -= h;
            let (du, dd) = (predicted_degrees(&up), predicted_degrees(&dn));
            for r in 0..n {
                let fd = (du[r] - dd[r]) / (2.0 * h);
                jac_err = jac_err.max((fd - j[(r, c)]).abs());
            }
        }
    }
    outcome(
        failures == 0 && worst_iter <= 50 && jac_err <= 1e-5,
        format!(
            "20 fits: {failures} failures, max error {worst_err:.2e}, max iterations {worst_iter}; \
             Jacobian vs finite differences {jac_err:.2e}"
        ),
    )
}

fn test_graphs() -> Vec<(&'static str, Graph)> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let geo = largest_connected_component(&random_geometric_graph(120, 0.12, &mut rng)).0;
    let pl = largest_connected_component(&powerlaw_configuration_graph(200, 2.5, &mut rng)).0;
    let er = largest_connected_component(&gnp(80, 0.08, &mut rng)).0;
    vec![("geometric", geo), ("power-law", pl), ("gnp", er)]
}

fn knob_grid(kind: ModelKind, n: usize) -> Vec<f64> {
    match kind {
        ModelKind::Linear | ModelKind::Ccop => (0..=10).map(|i| i as f64 / 10.0).collect(),
        ModelKind::Hdop => [0, 1, 5, 20, n / 2, n].iter().map(|&h| h as f64).collect(),
        ModelKind::Tsvd => [1, 2, 8, 32, n].iter().map(|&k| k as f64).collect(),
    }
}

fn c7_volume() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut errors = Vec::new();
    let mut count = 0;
    for (name, g) in test_graphs() {
        let m = g.m() as f64;
        for kind in ModelKind::ALL {
            for knob in knob_grid(kind, g.n()) {
                match ModelSpec::new(kind, knob).build(&g) {
                    Ok(p) => {
                        worst = worst.max((p.volume() - m).abs() / m);
                        count += 1;
                    }
                    Err(e) => errors.push(format!("{name} {kind} {knob}: {e}")),
                }
            }
        }
    }
    outcome(
        errors.is_empty() && worst <= 1e-6,
        format!("{count} matrices, worst |V - m|/m {worst:.2e}; errors {errors:?}"),
    )
}

fn c8_linear_monotone() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, g) in test_graphs() {
        let ov: Vec<f64> = (0..=10)
            .map(|i| linear_model(&g, i as f64 / 10.0).unwrap().overlap().unwrap())
            .collect();
        ok &= ov.windows(2).all(|w| w[0] <= w[1]);
        parts.push(format!("{name} {:.4}..{:.4}", ov[0], ov[10]));
    }
    outcome(ok, parts.join(", "))
}

fn c9_sampler() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst_z: f64 = 0.0;
    for t in 0..10 {
        let n = rng.random_range(20..=60);
        let p = random_prob_matrix(n, if t % 2 == 0 { 1.0 } else { 0.3 }, &mut rng);
        let emp = p.empirical_overlap(1000 + t as u64, 20).unwrap();
        let z = (emp - p.overlap().unwrap()).abs() / p.overlap_standard_error(20);
        worst_z = worst_z.max(z);
    }
    outcome(worst_z <= 3.0, format!("worst deviation {worst_z:.2} standard errors"))
}

fn brute_triangles(g: &Graph) -> u64 {
    let n = g.n();
    let mut t = 0;
    for a in 0..n {
        for b in (a + 1)..n {
            for c in (b + 1)..n {
                if g.has_edge(a, b) && g.has_edge(b, c) && g.has_edge(a, c) {
                    t += 1;
                }
            }
        }
    }
    t
}

fn floyd_warshall_mean(g: &Graph) -> f64 {
    let n = g.n();
    let inf = usize::MAX / 4;
    let mut d = vec![vec![inf; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
    }
    for (u, v) in g.edges() {
        d[u][v] = 1;
        d[v][u] = 1;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    let total: usize = d.iter().flatten().sum();
    total as f64 / (n * (n - 1)) as f64
}

fn random_connected(n: usize, extra: f64, rng: &mut ChaCha8Rng) -> Graph {
    let mut edges: Vec<(usize, usize)> = (1..n).map(|v| (rng.random_range(0..v), v)).collect();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random_bool(extra) {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edges(n, edges).unwrap()
}

fn c10_stats_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut tri_bad = 0;
    for _ in 0..200 {
        let n = rng.random_range(1..=8);
        let p = rng.random_range(0.1..0.9);
        let g = gnp(n, p, &mut rng);
        if triangle_counts(&g).1 != brute_triangles(&g) {
            tri_bad += 1;
        }
    }
    let mut path_err: f64 = 0.0;
    for _ in 0..50 {
        let n = rng.random_range(2..=50);
        let g = random_connected(n, rng.random_range(0.0..0.2), &mut rng);
        let got = char_path_length(&g).unwrap().unwrap();
        path_err = path_err.max((got - floyd_warshall_mean(&g)).abs());
    }
    let k4_minus = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)]).unwrap();
    let c = global_clustering(&k4_minus);
    outcome(
        tri_bad == 0 && path_err <= 1e-12 && c == Some(0.375),
        format!(
            "triangle mismatches {tri_bad}, path length error {path_err:.1e}, \
             K4 minus an edge clustering {c:?} (expected 0.375)"
        ),
    )
}

fn c11_embedding() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut rank_ok = true;
    let mut err_ok = true;
    let mut decreasing = 0;
    let mut worst_hi: f64 = 0.0;
    let mut sample = String::new();
    for t in 0..20 {
        let n = rng.random_range(6..=12);
        let g = bounded_degree_graph(n, 3, 0.6, &mut rng);
        let hi = vandermonde_embedding(&g, DEFAULT_EPS_ROOTS, 1e4).unwrap();
        let lo = vandermonde_embedding(&g, DEFAULT_EPS_ROOTS, 1e2).unwrap();
        let chk_hi = verify_embedding(&g, &hi).unwrap();
        let chk_lo = verify_embedding(&g, &lo).unwrap();
        rank_ok &= hi.rank_bound <= 2 * g.max_degree() + 1 && chk_hi.numerical_rank <= hi.rank_bound;
        err_ok &= chk_hi.max_error <= 1e-3;
        worst_hi = worst_hi.max(chk_hi.max_error);
        if chk_hi.max_error < chk_lo.max_error {
            decreasing += 1;
        }
        if t == 0 {
            sample = format!(
                "first graph: error {:.2e} at scale 1e2, {:.2e} at 1e4",
                chk_lo.max_error, chk_hi.max_error
            );
        }
    }
    outcome(
        rank_ok && err_ok && decreasing == 20,
        format!(
            "rank within bound: {rank_ok}; worst error at 1e4 {worst_hi:.2e}; \
             error lower at 1e4 than 1e2 on {decreasing}/20 graphs ({sample})"
        ),
    )
}

fn sweep_trend(g: &Graph, seed: u64) -> (bool, String) {
    let n = g.n();
    let grid = |kind, knobs: Vec<f64>| ModelGrid {
        kind,
        knobs,
        fit: FitOptions::default(),
    };
    let cfg = ExperimentConfig {
        models: vec![
            grid(ModelKind::Linear, (0..=10).map(|i| i as f64 / 10.0).collect()),
            grid(ModelKind::Ccop, (0..=10).map(|i| i as f64 / 10.0).collect()),
            grid(
                ModelKind::Hdop,
                [0, n / 100, n / 50, n / 20, n / 10, n / 5, n / 2, n]
                    .iter()
                    .map(|&h| h as f64)
                    .collect(),
            ),
            grid(
                ModelKind::Tsvd,
                [2, 4, 8, 16, 32, 64, 128, 256]
                    .iter()
                    .filter(|&&k| k <= n)
                    .map(|&k| k as f64)
                    .collect(),
            ),
        ],
        samples: 5,
        seed,
        overlap_trials: 2,
        ..ExperimentConfig::default()
    };
    let rows = run_sweep(g, &cfg).unwrap();
    let tri = 5;
    let cc = 6;
    let mut ok = true;
    let mut parts = Vec::new();
    for kind in ModelKind::ALL {
        let pts: Vec<_> = rows.iter().filter(|r| r.model == kind && r.is_ok()).collect();
        let ov: Vec<f64> = pts.iter().map(|r| r.overlap_expected.unwrap()).collect();
        let t: Vec<f64> = pts.iter().map(|r| r.mean[tri].unwrap_or(0.0)).collect();
        let c: Vec<f64> = pts.iter().map(|r| r.mean[cc].unwrap_or(0.0)).collect();
        let rho_t = spearman(&ov, &t).unwrap_or(f64::NAN);
        let rho_c = spearman(&ov, &c).unwrap_or(f64::NAN);
        ok &= pts.len() >= 3 && rho_t > 0.8;
        parts.push(format!("{kind} ρ_tri {rho_t:.3} ρ_cc {rho_c:.3}"));
    }
    (ok, parts.join(", "))
}

fn c12_datasets() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    let dir = std::env::var_os("EIGRAPH_DATA_DIR").map(PathBuf::from);
    let table = [
        ("citeseer.txt", 2110, 7336, 1083),
        ("cora.txt", 2485, 10138, 1558),
        ("polblogs.txt", 1222, 33428, 101043),
    ];
    let mut citeseer = None;
    for (file, n, m, t) in table {
        let Some(path) = dir.as_ref().map(|d| d.join(file)).filter(|p| p.exists()) else {
            parts.push(format!("{file} skipped"));
            continue;
        };
        let (g, _) = preprocess(&std::fs::read_to_string(&path).unwrap()).unwrap();
        let got = (g.n(), g.m(), triangle_counts(&g).1);
        ok &= got == (n, m, t);
        parts.push(format!("{file} {got:?} vs {:?}", (n, m, t)));
        if file == "citeseer.txt" {
            citeseer = Some(g);
        }
    }
    let (trend_ok, trend) = match citeseer {
        Some(g) => sweep_trend(&g, 12),
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(12);
            let g = largest_connected_component(&random_geometric_graph(2100, 0.034, &mut rng)).0;
            let (ok, s) = sweep_trend(&g, 12);
            (ok, format!("synthetic clustered graph n={}: {s}", g.n()))
        }
    };
    outcome(ok && trend_ok, format!("{}; trend: {trend}", parts.join(", ")))
}

#[test]
fn acceptance() {
    let criteria: [(&str, Duration, fn() -> Outcome); 12] = [
        ("overlap·volume identity", Duration::from_secs(5), c1_overlap_identity),
        ("triangle bound on random P", Duration::from_secs(30), c2_triangle_bound),
        ("ER triangle tightness ratios", Duration::from_secs(1), c3_er_tightness),
        ("k-cycle bound, exact mode", Duration::from_secs(120), c4_kcycle_bound),
        ("ER clustering band", Duration::from_secs(30), c5_cc_band),
        ("odds-product fit and Jacobian", Duration::from_secs(120), c6_odds_product),
        ("volume preservation", Duration::from_secs(60), c7_volume),
        ("linear-model overlap monotone", Duration::from_secs(5), c8_linear_monotone),
        ("sampler consistency", Duration::from_secs(30), c9_sampler),
        ("statistics oracles", Duration::from_secs(30), c10_stats_oracles),
        ("low-rank softmax embedding", Duration::from_secs(30), c11_embedding),
        ("datasets and overlap trends", Duration::from_secs(600), c12_datasets),
    ];
    let mut failed = Vec::new();
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let took = start.elapsed();
        let in_budget = took <= *budget;
        let pass = out.pass && in_budget;
        println!(
            "[{}] {:>2} {name}: {} ({:.2?}, budget {:?}{})",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            out.detail,
            took,
            budget,
            if in_budget { "" } else { ", over budget" }
        );
        if !pass {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
