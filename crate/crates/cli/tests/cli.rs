use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn eigraph(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eigraph"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const C5: &str = "0 1\n1 2\n2 3\n3 4\n4 0\n";

#[test]
fn ingest_triangle() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "tri.txt", "# comment\n10 20\n20 30 1\n30 10\n10 10\n");
    let out = dir.path().join("out");
    let o = eigraph(&["ingest", "--input", &input, "--output-dir", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "3 nodes, 3 edges, 1 triangle");
    assert_eq!(fs::read_to_string(out.join("edges.txt")).unwrap(), "# n=3 m=3\n0 1\n0 2\n1 2\n");
    let map = fs::read_to_string(out.join("node_map.tsv")).unwrap();
    assert!(map.contains("0\t10") && map.contains("2\t30"));
}

#[test]
fn ingest_keeps_largest_component() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "g.txt", "0 1\n1 2\n2 0\n5 6\n");
    let o = eigraph(&["ingest", "--input", &input, "--output-dir", dir.path().to_str().unwrap()]);
    assert_eq!(stdout(&o).trim(), "3 nodes, 3 edges, 1 triangle");
}

#[test]
fn ingest_parse_error_has_line_number() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "bad.txt", "0 1\n1 x\n");
    let o = eigraph(&["ingest", "--input", &input, "--output-dir", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn fit_cycle_gives_uniform_half() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "c5.txt", C5);
    let out = dir.path().join("fit");
    let o = eigraph(&["fit", "--input", &input, "--output-dir", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let p = fs::read_to_string(out.join("P.txt")).unwrap();
    let mut lines = p.lines();
    assert_eq!(lines.next(), Some("n=5"));
    let entries: Vec<f64> = lines
        .map(|l| l.split_whitespace().nth(2).unwrap().parse().unwrap())
        .collect();
    assert_eq!(entries.len(), 10);
    assert!(entries.iter().all(|&x| (x - 0.5).abs() < 1e-12));
    let report = fs::read_to_string(out.join("fit_report.csv")).unwrap();
    assert!(report.starts_with("iteration,residual\n"));
}

#[test]
fn fit_other_models() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "c5.txt", C5);
    let d = dir.path().to_str().unwrap();
    for args in [
        vec!["--model", "linear", "--omega", "0.3"],
        vec!["--model", "hdop", "--h", "2"],
        vec!["--model", "tsvd", "--rank", "3"],
    ] {
        let mut all = vec!["fit", "--input", &input, "--output-dir", d];
        all.extend(args);
        let o = eigraph(&all);
        assert!(o.status.success(), "{all:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(stdout(&o).contains("volume 5.0000"));
    }
}

#[test]
fn usage_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "c5.txt", C5);
    assert_eq!(eigraph(&["fit", "--input", &input, "--model", "tsvd"]).status.code(), Some(2));
    assert_eq!(
        eigraph(&["fit", "--input", &input, "--model", "linear", "--omega", "2"]).status.code(),
        Some(2)
    );
    assert_eq!(eigraph(&["nonsense"]).status.code(), Some(2));
    assert_eq!(eigraph(&["verify", "--theorem", "cc"]).status.code(), Some(2));
}

#[test]
fn missing_file_exits_one() {
    assert_eq!(eigraph(&["ingest", "--input", "/nonexistent/x.txt"]).status.code(), Some(1));
}

#[test]
fn sample_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "c5.txt", C5);
    let fit_dir = dir.path().join("fit");
    eigraph(&["fit", "--input", &input, "--output-dir", fit_dir.to_str().unwrap()]);
    let p = fit_dir.join("P.txt");
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = eigraph(&[
            "sample",
            "--input",
            p.to_str().unwrap(),
            "--output-dir",
            out.to_str().unwrap(),
            "--seed",
            "99",
            "--samples",
            "3",
        ]);
        assert!(o.status.success());
        (0..3)
            .map(|i| fs::read(out.join(format!("sample_{i}.txt"))).unwrap())
            .collect::<Vec<_>>()
    };
    let a = run("a");
    assert_eq!(a, run("b"));
    assert_ne!(a[0], a[1]);
}

#[test]
fn stats_emits_one_row() {
    let dir = TempDir::new().unwrap();
    let r = write(dir.path(), "r.txt", "# n=4 m=5\n0 1\n0 2\n0 3\n1 2\n1 3\n");
    let o = eigraph(&["stats", "--reference", &r, "--input", &r]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("degree_pearson,max_degree"));
    let cells: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(cells.len(), 8);
    assert_eq!(cells[1], "3");
    assert_eq!(cells[5], "2");
}

#[test]
fn verify_triangle_bound_on_random_matrices() {
    let o = eigraph(&["verify", "--theorem", "tri", "--n", "15", "--trials", "100", "--seed", "4"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().last(), Some("100/100 hold"));
    assert_eq!(text.lines().count(), 102);
}

#[test]
fn verify_cc_band() {
    let o = eigraph(&[
        "verify", "--theorem", "cc", "--n", "200", "--gamma", "0.5", "--trials", "5", "--tolerance", "0.03",
    ]);
    assert!(o.status.success(), "{}", stdout(&o));
}

#[test]
fn cell_verify_rows() {
    let o = eigraph(&["cell-verify", "--n", "10", "--max-degree", "2", "--trials", "4", "--seed", "1"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,max_degree,rank_bound,numerical_rank,max_error"));
    for row in lines {
        let c: Vec<&str> = row.split(',').collect();
        let bound: usize = c[2].parse().unwrap();
        let rank: usize = c[3].parse().unwrap();
        let err: f64 = c[4].parse().unwrap();
        assert!(rank <= bound && err <= 1e-3, "{row}");
    }
}

#[test]
fn sweep_writes_identical_csv_twice() {
    let dir = TempDir::new().unwrap();
    // two triangles joined by a path, plus a chord
    let input = write(
        dir.path(),
        "g.txt",
        "0 1\n1 2\n2 0\n2 3\n3 4\n4 5\n5 6\n6 4\n6 7\n7 8\n8 0\n1 5\n",
    );
    let cfg = write(
        dir.path(),
        "sweep.cfg",
        &format!(
            "input = {input}\nsamples = 3\nseed = 1\n\n[linear]\nomega = 0, 0.5, 1\n\n[ccop]\nomega = 0, 1\n\n[tsvd]\nrank = 2, 4\n"
        ),
    );
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = eigraph(&["sweep", "--config", &cfg, "--output-dir", out.to_str().unwrap(), "--plot"]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        assert!(out.join("sweep.svg").exists());
        fs::read_to_string(out.join("sweep.csv")).unwrap()
    };
    let a = run("a");
    assert_eq!(a, run("b"));
    assert_eq!(a.lines().count(), 1 + 7);
    let overlap: Vec<f64> = a
        .lines()
        .filter(|l| l.starts_with("linear,"))
        .map(|l| l.split(',').nth(5).unwrap().parse().unwrap())
        .collect();
    assert!(overlap.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn sweep_flags_override_config() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "c5.txt", C5);
    let cfg = write(dir.path(), "s.cfg", "samples = 9\n[linear]\nomega = 0.5\n");
    let out = dir.path().join("o");
    let o = eigraph(&[
        "sweep",
        "--config",
        &cfg,
        "--input",
        &input,
        "--samples",
        "2",
        "--output-dir",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let csv = fs::read_to_string(out.join("sweep.csv")).unwrap();
    assert!(csv.lines().nth(1).unwrap().starts_with("linear,0.5,ok,2,"));
}

#[test]
fn sweep_all_failed_is_an_error() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "g.txt", "0 1\n0 2\n0 3\n1 2\n3 4\n");
    let cfg = write(
        dir.path(),
        "s.cfg",
        &format!("input = {input}\nsamples = 1\n[ccop]\nomega = 0.5\nepsilon = 1e-300\nmax_iter = 1\n"),
    );
    let out = dir.path().join("o");
    let o = eigraph(&["sweep", "--config", &cfg, "--output-dir", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let csv = fs::read_to_string(out.join("sweep.csv")).unwrap();
    assert!(csv.contains("ccop,0.5,failed"));
}
