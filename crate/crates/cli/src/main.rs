//! `graph-outlier`: generate synthetic graph signals, detect outlying nodes,
//! run benchmarks and check the sampler against the exact oracle.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use graph_outlier::bench::{self, BenchConfig, BenchContext, GraphSource};
use graph_outlier::config::{load_config, render_config};
use graph_outlier::generate::{GenSpec, GraphKind};
use graph_outlier::io::{self, DetectionRecord};
use graph_outlier::oracle::{self, AgreementCheck, GridSpec, OracleFixture, AGREEMENT_TOL};
use graph_outlier::sampler::run_chain;
use graph_outlier::spectrum::LaplacianSpectrum;
use graph_outlier::Error;

#[derive(Parser, Debug)]
#[command(name = "graph-outlier", version, about = "Bayesian outlier detection on graph signals")]
struct Cli {
    /// Random seed (base seed for benchmarks).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// TOML configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory; results go to stdout when absent.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true, value_name = "K")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a random graph and a synthetic signal with ground truth.
    Generate(GenerateArgs),
    /// Posterior outlier probabilities for a graph signal.
    Detect(DetectArgs),
    /// Run a seeded benchmark and emit the summary table.
    Benchmark(BenchmarkArgs),
    /// Compare the Gibbs sampler with exact enumeration on small graphs.
    OracleCheck(OracleArgs),
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(long, value_parser = parse_kind)]
    kind: Option<GraphKind>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    snr: Option<f64>,
    /// Number of injected outliers.
    #[arg(long)]
    outliers: Option<usize>,
}

#[derive(Args, Debug)]
struct DetectArgs {
    /// Edge-list file.
    #[arg(long)]
    graph: PathBuf,
    /// Signal CSV with a `node,value` header.
    #[arg(long)]
    signal: PathBuf,
    /// Slab precision; required when the signal's MAD is zero.
    #[arg(long)]
    tau_delta: Option<f64>,
    #[arg(long)]
    n_iter: Option<usize>,
    #[arg(long)]
    n_burn: Option<usize>,
    #[arg(long)]
    threshold: Option<f64>,
}

#[derive(Args, Debug)]
struct BenchmarkArgs {
    /// Reuse one graph across all trials.
    #[arg(long)]
    fixed_graph: bool,
    /// Print the effective configuration and exit.
    #[arg(long)]
    print_config: bool,
    #[arg(long)]
    trials: Option<usize>,
}

#[derive(Args, Debug)]
struct OracleArgs {
    /// Directory of golden fixture JSON files; computed fresh when absent.
    #[arg(long, value_name = "DIR")]
    fixtures: Option<PathBuf>,
    /// Write the computed fixtures to this directory.
    #[arg(long, value_name = "DIR")]
    emit_fixtures: Option<PathBuf>,
    /// Retained Gibbs draws per fixture.
    #[arg(long, default_value_t = 20_000)]
    draws: usize,
    #[arg(long, default_value_t = 1_000)]
    burn: usize,
}

fn parse_kind(s: &str) -> Result<GraphKind, String> {
    match s {
        "erdos_renyi" | "er" => Ok(GraphKind::ErdosRenyi),
        "geometric" | "rgg" => Ok(GraphKind::Geometric),
        "knn" => Ok(GraphKind::Knn),
        _ => Err(format!("unknown graph kind {s:?}; expected erdos_renyi, geometric or knn")),
    }
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Outcome {
    if let Some(k) = cli.threads {
        if k == 0 {
            return Err(Failure::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| Failure::Runtime(e.to_string()))?;
    }
    let cfg = match &cli.config {
        Some(path) => load_config(path)?,
        None => BenchConfig::default(),
    };
    match &cli.command {
        Command::Generate(args) => generate(&cli, cfg, args),
        Command::Detect(args) => detect(&cli, cfg, args),
        Command::Benchmark(args) => benchmark(&cli, cfg, args),
        Command::OracleCheck(args) => oracle_check(&cli, cfg, args),
    }
}

fn emit(out: Option<&Path>, name: &str, text: &str) -> Outcome {
    match out {
        Some(dir) => Ok(io::write_text(text, &dir.join(name))?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn generate(cli: &Cli, mut cfg: BenchConfig, args: &GenerateArgs) -> Outcome {
    let wants_spec = args.kind.is_some()
        || args.n.is_some()
        || args.p.is_some()
        || args.radius.is_some()
        || args.k.is_some();
    if wants_spec {
        let mut spec = match &cfg.graph {
            GraphSource::Generate(spec) => spec.clone(),
            _ => GenSpec::default(),
        };
        spec.kind = args.kind.unwrap_or(spec.kind);
        spec.n = args.n.unwrap_or(spec.n);
        spec.p = args.p.unwrap_or(spec.p);
        spec.radius = args.radius.unwrap_or(spec.radius);
        spec.k = args.k.unwrap_or(spec.k);
        cfg.graph = GraphSource::Generate(spec);
    }
    cfg.synth.snr = args.snr.unwrap_or(cfg.synth.snr);
    cfg.synth.n_outliers = args.outliers.unwrap_or(cfg.synth.n_outliers);
    cfg.bench.base_seed = cli.seed.unwrap_or(cfg.bench.base_seed);
    cfg.bench.n_trials = 1;

    let (g, truth) = BenchContext::new(&cfg)?.trial_data(0)?;
    let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
    let coords = g.coords().is_some().then(|| dir.join("coords.tsv"));
    io::write_graph(&g, &dir.join("graph.tsv"), coords.as_deref())?;
    io::write_signal(&truth.y, &dir.join("signal.csv"))?;
    io::write_ground_truth(&truth, &dir.join("truth.csv"))?;
    eprintln!(
        "wrote {} nodes, {} edges, {} outliers to {}",
        g.n(),
        g.edge_count(),
        truth.n_outliers(),
        dir.display()
    );
    Ok(())
}

fn detect(cli: &Cli, cfg: BenchConfig, args: &DetectArgs) -> Outcome {
    let mut model = cfg.model;
    model.seed = cli.seed.unwrap_or(model.seed);
    model.tau_delta = args.tau_delta.or(model.tau_delta);
    model.n_iter = args.n_iter.unwrap_or(model.n_iter);
    model.n_burn = args.n_burn.unwrap_or(model.n_burn);
    model.threshold = args.threshold.unwrap_or(model.threshold);
    model
        .validate()
        .map_err(|e| Failure::Usage(e.to_string()))?;

    let g = io::read_graph(&args.graph, None)?;
    let y = io::read_signal(&args.signal)?;
    let sp = LaplacianSpectrum::of(&g)?;
    let summary = run_chain(&model, &g, &sp, &y)?;
    let record = DetectionRecord::new(&summary, &model);
    emit(cli.out.as_deref(), "detection.json", &io::to_json(&record)?)
}

fn benchmark(cli: &Cli, mut cfg: BenchConfig, args: &BenchmarkArgs) -> Outcome {
    cfg.bench.base_seed = cli.seed.unwrap_or(cfg.bench.base_seed);
    cfg.bench.n_trials = args.trials.unwrap_or(cfg.bench.n_trials);
    cfg.bench.fixed_graph |= args.fixed_graph;
    if args.print_config {
        print!("{}", render_config(&cfg)?);
        return Ok(());
    }
    cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    let record = bench::run_benchmark(&cfg, cli.threads)?;
    let csv = bench::table_csv(&record.rows);
    match cli.out.as_deref() {
        Some(dir) => {
            let stem = &cfg.bench.setting;
            io::write_text(&csv, &dir.join(format!("{stem}.csv")))?;
            io::write_json(&record, &dir.join(format!("{stem}.json")))?;
        }
        None => print!("{csv}"),
    }
    for w in &record.warnings {
        eprintln!("warning: {w}");
    }
    Ok(())
}

fn load_fixtures(dir: &Path) -> Result<Vec<OracleFixture>, Failure> {
    let entries = std::fs::read_dir(dir)
        .map_err(|e| Failure::Runtime(format!("{}: {e}", dir.display())))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Failure::Runtime(format!(
            "{}: no fixture files (*.json)",
            dir.display()
        )));
    }
    paths
        .iter()
        .map(|p| io::read_fixture(p).map_err(Failure::from))
        .collect()
}

fn report(checks: &[AgreementCheck]) -> String {
    let mut text = format!("oracle agreement (tolerance {AGREEMENT_TOL})\n");
    for c in checks {
        text.push_str(&format!(
            "{:<8} max |gibbs - oracle| = {:.4}  {}\n",
            c.name,
            c.max_abs_diff,
            if c.passed() { "pass" } else { "FAIL" }
        ));
    }
    let passed = checks.iter().filter(|c| c.passed()).count();
    text.push_str(&format!("{passed}/{} fixtures passed\n", checks.len()));
    text
}

fn oracle_check(cli: &Cli, cfg: BenchConfig, args: &OracleArgs) -> Outcome {
    if args.draws == 0 {
        return Err(Failure::Usage("--draws must be at least 1".into()));
    }
    let fixtures = match &args.fixtures {
        Some(dir) => load_fixtures(dir)?,
        None => oracle::default_fixture_inputs()
            .iter()
            .map(|input| oracle::compute_fixture(input, &GridSpec::default()))
            .collect::<graph_outlier::Result<Vec<_>>>()?,
    };
    if let Some(dir) = &args.emit_fixtures {
        for fx in &fixtures {
            io::write_json(fx, &dir.join(format!("{}.json", fx.name)))?;
        }
    }
    let seed = cli.seed.unwrap_or(cfg.model.seed);
    let checks = fixtures
        .iter()
        .map(|fx| oracle::check_agreement(fx, args.draws, args.burn, seed))
        .collect::<graph_outlier::Result<Vec<_>>>()?;
    let text = report(&checks);
    emit(cli.out.as_deref(), "oracle_report.txt", &text)?;
    if checks.iter().all(AgreementCheck::passed) {
        Ok(())
    } else {
        Err(Failure::Runtime("sampler disagrees with the oracle".into()))
    }
}
