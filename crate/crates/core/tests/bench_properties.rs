use graph_outlier::bench::{
    build_graph, run_benchmark, run_trial, table_csv, BenchConfig, BenchContext, GraphSource,
    Method, RunConfig, CSV_HEADER,
};
use graph_outlier::generate::GenSpec;
use graph_outlier::sampler::ModelConfig;
use graph_outlier::synth::SynthConfig;

fn er_config(n: usize, trials: usize) -> BenchConfig {
    BenchConfig {
        graph: GraphSource::Generate(GenSpec::erdos_renyi(n, 0.7)),
        model: ModelConfig {
            n_iter: 250,
            n_burn: 50,
            ..ModelConfig::default()
        },
        bench: RunConfig {
            n_trials: trials,
            base_seed: 17,
            ..RunConfig::default()
        },
        ..BenchConfig::default()
    }
}

#[test]
fn isolated_trial_matches_batch() {
    let cfg = er_config(30, 5);
    let batch = run_benchmark(&cfg, Some(3)).unwrap();
    for k in [0, 3, 4] {
        assert_eq!(run_trial(&cfg, k).unwrap(), batch.trials[k]);
    }
    assert_eq!(batch.trial_seeds, vec![17, 18, 19, 20, 21]);
}

#[test]
fn one_row_per_method() {
    let mut cfg = er_config(30, 3);
    for methods in [vec![Method::Lmf], vec![Method::Proposed, Method::Lmf]] {
        cfg.bench.methods = methods.clone();
        let rec = run_benchmark(&cfg, Some(2)).unwrap();
        assert_eq!(rec.rows.len(), methods.len());
        let csv = table_csv(&rec.rows);
        assert_eq!(csv.lines().count(), methods.len() + 1);
        assert_eq!(csv.lines().next().unwrap(), CSV_HEADER);
        assert!(rec.rows.iter().all(|r| r.n_trials == 3 && r.setting == "er_p07_snr2"));
    }
}

#[test]
fn er_trial_shape() {
    let cfg = er_config(100, 1);
    let ctx = BenchContext::new(&cfg).unwrap();
    let (g, truth) = ctx.trial_data(0).unwrap();
    assert_eq!(g.n(), 100);
    assert!(g.is_connected());
    let density = g.edge_count() as f64 / (100.0 * 99.0 / 2.0);
    assert!((density - 0.7).abs() < 0.05, "{density}");
    assert_eq!(truth.n_outliers(), SynthConfig::default().n_outliers);
    let t = ctx.run_trial(0).unwrap();
    for o in &t.outcomes {
        assert_eq!(o.scores.len(), 100);
        assert_eq!(o.flagged.len(), 100);
        assert!(o.auc.is_some());
    }
}

#[test]
fn graphs_are_redrawn_unless_fixed() {
    let mut cfg = er_config(30, 2);
    let a = build_graph(&cfg, cfg.trial_seed(0)).unwrap();
    let b = build_graph(&cfg, cfg.trial_seed(1)).unwrap();
    assert_ne!(a.weights(), b.weights());
    cfg.bench.fixed_graph = true;
    let a = build_graph(&cfg, cfg.trial_seed(0)).unwrap();
    let b = build_graph(&cfg, cfg.trial_seed(1)).unwrap();
    assert_eq!(a.weights(), b.weights());
}

#[test]
fn signal_differs_across_trials_on_a_fixed_graph() {
    let mut cfg = er_config(30, 2);
    cfg.bench.fixed_graph = true;
    let ctx = BenchContext::new(&cfg).unwrap();
    let (_, a) = ctx.trial_data(0).unwrap();
    let (_, b) = ctx.trial_data(1).unwrap();
    assert_ne!(a.y, b.y);
}
