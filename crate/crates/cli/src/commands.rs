use std::fs;
use std::path::Path;

use anyhow::{anyhow, Context};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use eigraph::bounds::{self, BoundReport};
use eigraph::cell;
use eigraph::graph::{load_edge_list, preprocess};
use eigraph::models::{ModelKind, ModelSpec};
use eigraph::odds_product::FitOptions;
use eigraph::rng::derive_seed;
use eigraph::stats::{compare, triangle_counts, StatsRecord};
use eigraph::sweep::{self, ExperimentConfig};
use eigraph::synth;
use eigraph::{fit_odds_product, Graph, ProbMatrix};

use crate::{CellVerifyArgs, CliError, Command, FitArgs, ModelArg, SweepArgs, Theorem, VerifyArgs};

type Result<T> = std::result::Result<T, CliError>;

pub fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Ingest { input, output_dir } => ingest(&input, &output_dir),
        Command::Fit(args) => fit(&args),
        Command::Sample {
            input,
            output_dir,
            seed,
            samples,
        } => sample(&input, &output_dir, seed, samples),
        Command::Stats { reference, input } => stats(&reference, &input),
        Command::Sweep(args) => run_sweep(&args),
        Command::Verify(args) => verify(&args),
        Command::CellVerify(args) => cell_verify(&args),
    }
}

fn read(path: &Path) -> Result<String> {
    Ok(fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?)
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn load_graph(path: &Path) -> Result<Graph> {
    let (g, _) = load_edge_list(&read(path)?).with_context(|| format!("parsing {}", path.display()))?;
    Ok(g)
}

fn plural(n: u64, word: &str) -> String {
    if n == 1 {
        format!("{n} {word}")
    } else {
        format!("{n} {word}s")
    }
}

fn ingest(input: &Path, out: &Path) -> Result<()> {
    let (g, map) = preprocess(&read(input)?).with_context(|| format!("parsing {}", input.display()))?;
    let (_, tri) = triangle_counts(&g);
    write(out, "edges.txt", &g.to_edge_list())?;
    write(out, "node_map.tsv", &map.to_tsv())?;
    println!(
        "{}, {}, {}",
        plural(g.n() as u64, "node"),
        plural(g.m() as u64, "edge"),
        plural(tri, "triangle")
    );
    log::info!("max degree {}", g.max_degree());
    Ok(())
}

fn model_spec(args: &FitArgs) -> Result<ModelSpec> {
    let missing = |flag: &str, model: &str| CliError::Usage(format!("--{flag} is required for --model {model}"));
    let (kind, knob) = match args.model {
        ModelArg::Linear => (ModelKind::Linear, args.omega.ok_or_else(|| missing("omega", "linear"))?),
        ModelArg::Ccop => (ModelKind::Ccop, args.omega.unwrap_or(0.0)),
        ModelArg::Hdop => (ModelKind::Hdop, args.h.ok_or_else(|| missing("h", "hdop"))? as f64),
        ModelArg::Tsvd => (ModelKind::Tsvd, args.rank.ok_or_else(|| missing("rank", "tsvd"))? as f64),
    };
    if !(args.epsilon > 0.0) || args.max_iter == 0 {
        return Err(CliError::Usage("--epsilon must be positive and --max-iter at least 1".into()));
    }
    Ok(ModelSpec {
        kind,
        knob,
        fit: FitOptions {
            epsilon: args.epsilon,
            max_iter: args.max_iter,
            damping: !args.no_damping,
        },
    })
}

fn fit(args: &FitArgs) -> Result<()> {
    let spec = model_spec(args)?;
    let g = load_graph(&args.input)?;
    spec.validate(g.n()).map_err(|e| CliError::Usage(e.to_string()))?;
    let p = if spec.kind == ModelKind::Ccop {
        let fit = fit_odds_product(&g.degrees(), &spec.fit)?;
        write(&args.output_dir, "fit_report.csv", &fit.report.to_csv())?;
        log::info!("odds-product fit converged in {} iterations", fit.report.iterations);
        fit.p.convex_combine(&g.to_dense()?, spec.knob)?
    } else {
        spec.build(&g)?
    };
    write(&args.output_dir, "P.txt", &p.to_triplets())?;
    println!(
        "{} {} = {}: volume {:.6}, overlap {:.6}",
        spec.kind,
        spec.kind.knob_name(),
        spec.knob,
        p.volume(),
        p.overlap()?
    );
    Ok(())
}

fn sample(input: &Path, out: &Path, seed: u64, samples: usize) -> Result<()> {
    if samples == 0 {
        return Err(CliError::Usage("--samples must be at least 1".into()));
    }
    let p = ProbMatrix::from_triplets(&read(input)?).with_context(|| format!("parsing {}", input.display()))?;
    for i in 0..samples {
        let g = p.sample(derive_seed(seed, i as u64));
        write(out, &format!("sample_{i}.txt"), &g.to_edge_list())?;
    }
    Ok(())
}

fn stats(reference: &Path, input: &Path) -> Result<()> {
    let r = load_graph(reference)?;
    let g = load_graph(input)?;
    let rec = compare(&r, &g)?;
    println!("{}", StatsRecord::csv_header());
    println!("{}", rec.to_csv_row());
    Ok(())
}

fn run_sweep(args: &SweepArgs) -> Result<()> {
    let mut cfg = ExperimentConfig::parse(&read(&args.config)?)
        .map_err(|e| CliError::Usage(format!("{}: {e}", args.config.display())))?;
    if let Some(input) = &args.input {
        cfg.input = Some(input.clone());
    }
    if let Some(dir) = &args.output_dir {
        cfg.output_dir = dir.clone();
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(samples) = args.samples {
        if samples == 0 {
            return Err(CliError::Usage("--samples must be at least 1".into()));
        }
        cfg.samples = samples;
    }
    if let Some(w) = args.workers {
        cfg.workers = w;
    }
    cfg.plot |= args.plot;
    let input = cfg
        .input
        .clone()
        .ok_or_else(|| CliError::Usage("no input: set `input` in the config or pass --input".into()))?;
    let (g, _) = preprocess(&read(&input)?).with_context(|| format!("parsing {}", input.display()))?;
    cfg.grid_points(g.n()).map_err(|e| CliError::Usage(e.to_string()))?;

    let rows = sweep::run_sweep(&g, &cfg)?;
    write(&cfg.output_dir, "sweep.csv", &sweep::rows_to_csv(&rows))?;
    if cfg.plot {
        let reference = sweep::reference_record(&g)?;
        write(&cfg.output_dir, "sweep.svg", &sweep::render_svg(&rows, Some(&reference)))?;
    }
    let ok = rows.iter().filter(|r| r.is_ok()).count();
    eprintln!("{ok}/{} grid points succeeded", rows.len());
    if ok == 0 {
        return Err(anyhow!("every grid point failed").into());
    }
    Ok(())
}

fn verify(args: &VerifyArgs) -> Result<()> {
    if args.trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut reports: Vec<BoundReport> = Vec::new();
    match args.theorem {
        Theorem::Tri | Theorem::Kcycle => {
            if args.theorem == Theorem::Kcycle && !(3..=6).contains(&args.k) {
                return Err(CliError::Usage("--k must be in 3..=6".into()));
            }
            if args.n < 3 {
                return Err(CliError::Usage("--n must be at least 3".into()));
            }
            for t in 0..args.trials {
                let p = match args.gamma {
                    Some(gamma) => bounds::er_construction(args.n, gamma)
                        .map_err(|e| CliError::Usage(e.to_string()))?,
                    // alternate dense and sparse regimes
                    None if t % 2 == 0 => synth::random_prob_matrix(args.n, 1.0, &mut rng),
                    None => synth::sparse_random_prob_matrix(args.n, 3.0 / args.n as f64, &mut rng),
                };
                if p.volume() == 0.0 {
                    continue;
                }
                reports.push(match args.theorem {
                    Theorem::Tri => bounds::check_triangle_bound(&p)?,
                    _ => bounds::check_kcycle_bound(&p, args.k)?,
                });
            }
        }
        Theorem::Cc => {
            let gamma = args
                .gamma
                .ok_or_else(|| CliError::Usage("--gamma is required for --theorem cc".into()))?;
            reports.push(
                bounds::check_cc_tightness(args.n, gamma, args.trials, args.seed, args.tolerance)
                    .map_err(|e| CliError::Usage(e.to_string()))?,
            );
        }
    }
    println!("{}", BoundReport::CSV_HEADER);
    for r in &reports {
        println!("{}", r.to_csv_row());
    }
    let held = reports.iter().filter(|r| r.holds).count();
    println!("{held}/{} hold", reports.len());
    if held < reports.len() {
        return Err(anyhow!("{} checks did not hold", reports.len() - held).into());
    }
    Ok(())
}

fn cell_verify(args: &CellVerifyArgs) -> Result<()> {
    if args.n < 2 || args.n > cell::MAX_EMBEDDING_N {
        return Err(CliError::Usage(format!("--n must be in 2..={}", cell::MAX_EMBEDDING_N)));
    }
    if args.max_degree == 0 {
        return Err(CliError::Usage("--max-degree must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    println!("n,max_degree,rank_bound,numerical_rank,max_error");
    for _ in 0..args.trials {
        let g = synth::bounded_degree_graph(args.n, args.max_degree, 0.6, &mut rng);
        if g.m() == 0 {
            continue;
        }
        let w = cell::vandermonde_embedding(&g, args.eps_roots, args.scale)
            .map_err(|e| CliError::Usage(e.to_string()))?;
        let check = cell::verify_embedding(&g, &w)?;
        println!(
            "{},{},{},{},{:.6e}",
            g.n(),
            g.max_degree(),
            w.rank_bound,
            check.numerical_rank,
            check.max_error
        );
    }
    Ok(())
}
