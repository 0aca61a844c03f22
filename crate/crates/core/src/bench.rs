//! Seeded simulation benchmark comparing the Gibbs detector with local
//! median filtering.
//!
//! Trial `k` of a run with base seed `b` uses seed `b + k` for everything it
//! draws, so any trial can be replayed on its own. Graphs, signals and the
//! chain take independent ChaCha streams of that seed.

use std::path::PathBuf;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{lmf, DEFAULT_Z_THRESHOLD};
use crate::error::{Error, Result};
use crate::generate::{generate, knn_graph, unit_square, GenSpec};
use crate::graph::Graph;
use crate::io;
use crate::metrics::{auc, prf1, Prf1};
use crate::robust::{mean, sample_sd};
use crate::sampler::{run_chain, ModelConfig};
use crate::spectrum::LaplacianSpectrum;
use crate::synth::{synthesize, GroundTruth, SynthConfig};

const GRAPH_STREAM: u64 = 1;
const SIGNAL_STREAM: u64 = 2;

/// Node count of the synthetic sensor-network stand-in.
pub const US_SENSOR_NODES: usize = 218;
/// Neighbour count of the synthetic sensor-network stand-in.
pub const US_SENSOR_K: usize = 7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Proposed,
    Lmf,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Proposed => "proposed",
            Method::Lmf => "lmf",
        }
    }
}

/// Where each trial's graph comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum GraphSource {
    /// A random family, redrawn per trial unless the run fixes the graph.
    Generate(GenSpec),
    /// An edge-list file, optionally with coordinates.
    File {
        edges: PathBuf,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        coords: Option<PathBuf>,
    },
    /// A fixed 218-node 7-NN graph on seeded uniform points in the unit square.
    UsSensorSynthetic {
        #[serde(default = "default_sensor_seed")]
        layout_seed: u64,
    },
}

fn default_sensor_seed() -> u64 {
    218
}

impl Default for GraphSource {
    fn default() -> Self {
        GraphSource::Generate(GenSpec::default())
    }
}

impl GraphSource {
    pub fn us_sensor_synthetic() -> Self {
        GraphSource::UsSensorSynthetic {
            layout_seed: default_sensor_seed(),
        }
    }
}

/// Run-level options.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    /// Label for the output rows.
    pub setting: String,
    pub n_trials: usize,
    pub base_seed: u64,
    pub methods: Vec<Method>,
    /// Draw one random graph from `base_seed` and reuse it in every trial.
    pub fixed_graph: bool,
    /// Flagging cutoff on the baseline's modified z-score.
    pub lmf_z_threshold: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            setting: "er_p07_snr2".into(),
            n_trials: 100,
            base_seed: 0,
            methods: vec![Method::Proposed, Method::Lmf],
            fixed_graph: false,
            lmf_z_threshold: DEFAULT_Z_THRESHOLD,
        }
    }
}

/// One benchmark setting, as read from a config file.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BenchConfig {
    pub graph: GraphSource,
    pub synth: SynthConfig,
    pub model: ModelConfig,
    pub bench: RunConfig,
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.bench.n_trials == 0 {
            return Err(Error::InvalidConfig("bench.n_trials must be at least 1".into()));
        }
        if self.bench.methods.is_empty() {
            return Err(Error::InvalidConfig("bench.methods must not be empty".into()));
        }
        if !(self.bench.lmf_z_threshold > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "bench.lmf_z_threshold must be positive, got {}",
                self.bench.lmf_z_threshold
            )));
        }
        if let GraphSource::Generate(spec) = &self.graph {
            spec.validate()?;
        }
        self.model.validate()
    }

    pub fn trial_seed(&self, index: usize) -> u64 {
        self.bench.base_seed.wrapping_add(index as u64)
    }

    /// Whether every trial sees the same graph.
    pub fn graph_is_fixed(&self) -> bool {
        !matches!(self.graph, GraphSource::Generate(_)) || self.bench.fixed_graph
    }
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn sensor_graph(layout_seed: u64) -> Result<Graph<f64>> {
    let mut rng = stream_rng(layout_seed, GRAPH_STREAM);
    for _ in 0..GenSpec::default().max_attempts {
        let g = knn_graph(unit_square(US_SENSOR_NODES, &mut rng), US_SENSOR_K)?;
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(Error::ConnectivityNotAchieved {
        attempts: GenSpec::default().max_attempts,
    })
}

/// Builds the graph a trial with `seed` uses.
pub fn build_graph(cfg: &BenchConfig, seed: u64) -> Result<Graph<f64>> {
    match &cfg.graph {
        GraphSource::Generate(spec) => {
            let seed = if cfg.bench.fixed_graph { cfg.bench.base_seed } else { seed };
            Ok(generate(spec, &mut stream_rng(seed, GRAPH_STREAM))?.graph)
        }
        GraphSource::File { edges, coords } => io::read_graph(edges, coords.as_deref()),
        GraphSource::UsSensorSynthetic { layout_seed } => sensor_graph(*layout_seed),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MethodOutcome {
    pub method: Method,
    pub metrics: Prf1,
    /// Absent when the truth holds a single class.
    pub auc: Option<f64>,
    /// Score per node used for the AUC.
    pub scores: Vec<f64>,
    pub flagged: Vec<bool>,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub index: usize,
    pub seed: u64,
    pub truth: Vec<bool>,
    pub outcomes: Vec<MethodOutcome>,
}

impl TrialResult {
    pub fn outcome(&self, method: Method) -> Option<&MethodOutcome> {
        self.outcomes.iter().find(|o| o.method == method)
    }
}

/// Shared state for the trials of one run: the fixed graph, if any.
pub struct BenchContext<'a> {
    cfg: &'a BenchConfig,
    fixed: Option<(Graph<f64>, LaplacianSpectrum<f64>)>,
}

impl<'a> BenchContext<'a> {
    pub fn new(cfg: &'a BenchConfig) -> Result<Self> {
        cfg.validate()?;
        let fixed = if cfg.graph_is_fixed() {
            let g = build_graph(cfg, cfg.bench.base_seed)?;
            let sp = LaplacianSpectrum::of(&g)?;
            Some((g, sp))
        } else {
            None
        };
        Ok(Self { cfg, fixed })
    }

    /// The graph and synthetic observation trial `index` sees.
    pub fn trial_data(&self, index: usize) -> Result<(Graph<f64>, GroundTruth<f64>)> {
        self.with_trial_data(index, |g, _, truth| Ok((g.clone(), truth)))
    }

    fn with_trial_data<R>(
        &self,
        index: usize,
        run: impl FnOnce(&Graph<f64>, &LaplacianSpectrum<f64>, GroundTruth<f64>) -> Result<R>,
    ) -> Result<R> {
        let seed = self.cfg.trial_seed(index);
        let synth = |sp: &LaplacianSpectrum<f64>| {
            synthesize(sp, &self.cfg.synth, &mut stream_rng(seed, SIGNAL_STREAM))
        };
        match &self.fixed {
            Some((g, sp)) => run(g, sp, synth(sp)?),
            None => {
                let g = build_graph(self.cfg, seed)?;
                let sp = LaplacianSpectrum::of(&g)?;
                let truth = synth(&sp)?;
                run(&g, &sp, truth)
            }
        }
    }

    pub fn run_trial(&self, index: usize) -> Result<TrialResult> {
        self.with_trial_data(index, |g, sp, truth| self.score_trial(index, g, sp, truth))
    }

    fn score_trial(
        &self,
        index: usize,
        g: &Graph<f64>,
        sp: &LaplacianSpectrum<f64>,
        truth: GroundTruth<f64>,
    ) -> Result<TrialResult> {
        let seed = self.cfg.trial_seed(index);
        let labels = truth.outlier_mask.clone();

        let mut outcomes = Vec::with_capacity(self.cfg.bench.methods.len());
        for &method in &self.cfg.bench.methods {
            let (scores, flagged, warnings) = match method {
                Method::Proposed => {
                    let model = ModelConfig {
                        seed,
                        ..self.cfg.model.clone()
                    };
                    let s = run_chain(&model, g, sp, &truth.y)?;
                    (s.p_outlier, s.classified, s.warnings)
                }
                Method::Lmf => {
                    let r = lmf(g, &truth.y, self.cfg.bench.lmf_z_threshold)?;
                    (r.scores, r.flagged, r.warnings)
                }
            };
            let metrics = prf1(&labels, &flagged)?;
            let auc = match auc(&labels, &scores) {
                Ok(a) => Some(a),
                Err(Error::DegenerateTruth) => None,
                Err(e) => return Err(e),
            };
            outcomes.push(MethodOutcome {
                method,
                metrics,
                auc,
                scores,
                flagged,
                warnings,
            });
        }
        Ok(TrialResult {
            index,
            seed,
            truth: labels,
            outcomes,
        })
    }
}

/// Runs trial `index` of `cfg` in isolation.
pub fn run_trial(cfg: &BenchConfig, index: usize) -> Result<TrialResult> {
    BenchContext::new(cfg)?.run_trial(index)
}

/// Mean and sample standard deviation (denominator `n - 1`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanSd {
    pub mean: f64,
    pub sd: f64,
}

impl MeanSd {
    pub fn of(xs: &[f64]) -> Self {
        if xs.is_empty() {
            return Self {
                mean: f64::NAN,
                sd: f64::NAN,
            };
        }
        Self {
            mean: mean(xs),
            sd: if xs.len() > 1 { sample_sd(xs) } else { f64::NAN },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub method: Method,
    pub setting: String,
    pub f1: MeanSd,
    pub recall: MeanSd,
    pub precision: MeanSd,
    pub auc: MeanSd,
    pub n_trials: usize,
    /// Trials whose AUC was undefined.
    pub auc_excluded: usize,
}

/// Aggregates per-method rows from completed trials, in trial order.
pub fn aggregate(setting: &str, methods: &[Method], trials: &[TrialResult]) -> Vec<BenchRow> {
    methods
        .iter()
        .map(|&method| {
            let outs: Vec<&MethodOutcome> =
                trials.iter().filter_map(|t| t.outcome(method)).collect();
            let pick = |f: fn(&Prf1) -> f64| -> Vec<f64> { outs.iter().map(|o| f(&o.metrics)).collect() };
            let aucs: Vec<f64> = outs.iter().filter_map(|o| o.auc).collect();
            BenchRow {
                method,
                setting: setting.to_string(),
                f1: MeanSd::of(&pick(|m| m.f1)),
                recall: MeanSd::of(&pick(|m| m.recall)),
                precision: MeanSd::of(&pick(|m| m.precision)),
                auc: MeanSd::of(&aucs),
                n_trials: outs.len(),
                auc_excluded: outs.len() - aucs.len(),
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialFailure {
    pub index: usize,
    pub seed: u64,
    pub error: String,
}

/// Fixed choices a reader needs to interpret the numbers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchFlags {
    pub graph_redrawn_per_trial: bool,
    pub lmf_z_threshold: f64,
    pub lmf_zero_mad_fallback: String,
    pub lmf_auc_score: String,
    pub proposed_auc_score: String,
    pub zero_denominator_metric: f64,
    pub auc_tie_weight: f64,
    pub sd_denominator: String,
}

impl BenchFlags {
    fn new(cfg: &BenchConfig) -> Self {
        Self {
            graph_redrawn_per_trial: !cfg.graph_is_fixed(),
            lmf_z_threshold: cfg.bench.lmf_z_threshold,
            lmf_zero_mad_fallback: "mean_absolute_deviation".into(),
            lmf_auc_score: "abs_modified_z".into(),
            proposed_auc_score: "p_outlier".into(),
            zero_denominator_metric: 0.0,
            auc_tie_weight: 0.5,
            sd_denominator: "n_minus_1".into(),
        }
    }
}

/// Versioned record of one run: aggregate rows plus every trial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub version: u32,
    pub config: BenchConfig,
    pub flags: BenchFlags,
    pub rows: Vec<BenchRow>,
    pub trial_seeds: Vec<u64>,
    pub failures: Vec<TrialFailure>,
    pub warnings: Vec<String>,
    pub wall_clock_secs: f64,
    pub trials: Vec<TrialResult>,
}

/// Runs every trial of `cfg` on a pool of `threads` workers (all cores when
/// `None`). Results do not depend on the thread count.
pub fn run_benchmark(cfg: &BenchConfig, threads: Option<usize>) -> Result<BenchRecord> {
    let start = Instant::now();
    let ctx = BenchContext::new(cfg)?;
    let n = cfg.bench.n_trials;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(k) = threads {
        pool = pool.num_threads(k);
    }
    let pool = pool
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    let results: Vec<Result<TrialResult>> =
        pool.install(|| (0..n).into_par_iter().map(|k| ctx.run_trial(k)).collect());

    let mut trials = Vec::with_capacity(n);
    let mut failures = Vec::new();
    for (index, r) in results.into_iter().enumerate() {
        match r {
            Ok(t) => trials.push(t),
            Err(e) => {
                log::warn!("trial {index} failed: {e}");
                failures.push(TrialFailure {
                    index,
                    seed: cfg.trial_seed(index),
                    error: e.to_string(),
                });
            }
        }
    }
    if failures.len() * 10 > n {
        return Err(Error::BatchFailed {
            failed: failures.len(),
            total: n,
        });
    }

    let rows = aggregate(&cfg.bench.setting, &cfg.bench.methods, &trials);
    let mut warnings = Vec::new();
    for r in &rows {
        if r.auc_excluded > 0 {
            warnings.push(format!(
                "{}: {} trial(s) with a single-class truth excluded from AUC",
                r.method.name(),
                r.auc_excluded
            ));
        }
    }
    if !failures.is_empty() {
        warnings.push(format!("{} of {n} trial(s) failed", failures.len()));
    }
    for w in &warnings {
        log::warn!("{w}");
    }
    Ok(BenchRecord {
        version: io::RECORD_VERSION,
        config: cfg.clone(),
        flags: BenchFlags::new(cfg),
        rows,
        trial_seeds: (0..n).map(|k| cfg.trial_seed(k)).collect(),
        failures,
        warnings,
        wall_clock_secs: start.elapsed().as_secs_f64(),
        trials,
    })
}

pub const CSV_HEADER: &str = "method,setting,f1_mean,f1_sd,recall_mean,recall_sd,precision_mean,precision_sd,auc_mean,auc_sd,n_trials";

/// Renders rows as CSV with a header line.
pub fn table_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            r.method.name(),
            r.setting,
            r.f1.mean,
            r.f1.sd,
            r.recall.mean,
            r.recall.sd,
            r.precision.mean,
            r.precision.sd,
            r.auc.mean,
            r.auc.sd,
            r.n_trials
        ));
    }
    out
}
