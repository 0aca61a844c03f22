//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use common::*;
use graph_outlier::bench::{run_benchmark, BenchConfig, BenchRecord, BenchRow, Method};
use graph_outlier::config::load_config;
use graph_outlier::io::read_fixture;
use graph_outlier::oracle::{check_agreement, default_fixture_inputs, AGREEMENT_TOL};
use graph_outlier::sampler::geweke::geweke_test;
use graph_outlier::sampler::{run_chain, Hyperparameters, ModelConfig, PrecisionPrior};
use graph_outlier::spectrum::LaplacianSpectrum;
use graph_outlier::synth::smooth_signal;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: String) -> Verdict {
    Verdict { passed, detail }
}

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn bench(name: &str) -> BenchRecord {
    let cfg: BenchConfig = load_config(&root().join("configs").join(format!("{name}.toml"))).unwrap();
    run_benchmark(&cfg, None).unwrap()
}

fn row(rec: &BenchRecord, method: Method) -> &BenchRow {
    rec.rows.iter().find(|r| r.method == method).unwrap()
}

fn oracle_equivalence() -> Verdict {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let mut worst = 0.0f64;
    let mut parts = Vec::new();
    for input in default_fixture_inputs() {
        let fx = read_fixture(&dir.join(format!("{}.json", input.name))).unwrap();
        let check = check_agreement(&fx, 20_000, 1_000, 0).unwrap();
        worst = worst.max(check.max_abs_diff);
        parts.push(format!("{} {:.4}", check.name, check.max_abs_diff));
    }
    verdict(
        worst <= AGREEMENT_TOL && parts.len() >= 3,
        format!("max |gibbs - oracle| by fixture: {} (tol {AGREEMENT_TOL})", parts.join(", ")),
    )
}

fn geweke() -> Verdict {
    let g = path(5);
    let sp = LaplacianSpectrum::of(&g).unwrap();
    let cfg = ModelConfig {
        tau_prior: PrecisionPrior::gamma(2.0, 2.0),
        gamma_prior: PrecisionPrior::gamma(2.0, 2.0),
        constant_mode_precision: Some(1.0),
        ..ModelConfig::default()
    };
    let hyper = Hyperparameters::new(&cfg, 1.0);
    let report = geweke_test(&sp, &hyper, 100_000, 2024).unwrap();
    let parts: Vec<String> = report
        .comparisons
        .iter()
        .map(|c| format!("{} z={:+.2}", c.name, c.z()))
        .collect();
    verdict(
        report.max_abs_z() < 4.0,
        format!("{} sweeps, {} (|z| < 4)", report.sweeps, parts.join(", ")),
    )
}

fn property_sweep() -> Verdict {
    let mut worst_spec: f64 = 0.0;
    let mut worst_gft: f64 = 0.0;
    let mut worst_quad: f64 = 0.0;
    let mut worst_metric: f64 = 0.0;
    let mut worst_equiv: f64 = 0.0;
    for seed in 0..200u64 {
        let n = 2 + (seed % 12) as usize;
        let g = random_graph(n, 0.2 + 0.004 * seed as f64, seed);
        let sp = LaplacianSpectrum::of(&g).unwrap();
        let (recon, orth) = spectral_gaps(&g, &sp);
        worst_spec = worst_spec.max(recon).max(orth);
        let y = random_signal(n, seed + 1000);
        worst_gft = worst_gft.max(gft_round_trip_gap(&sp, &y));
        worst_quad = worst_quad.max(quadratic_form_gap(&g, &y));
        if n >= 3 {
            worst_equiv = worst_equiv.max(baseline_equivariance_gap(&g, &y, 3.7, -2.0));
        }
        let truth: Vec<bool> = (0..n).map(|i| (i + seed as usize).is_multiple_of(3)).collect();
        if truth.iter().any(|&t| t) && truth.iter().any(|&t| !t) {
            let scores: Vec<f64> = y.iter().map(|v| v.round()).collect();
            let predicted: Vec<bool> = y.iter().map(|&v| v > 1.0).collect();
            worst_metric = worst_metric.max(metric_identity_gap(&truth, &scores, &predicted));
        }
    }

    // E[fᵀ(L + 0.1 I)f] = n for the smooth-signal generator
    let g = random_graph(10, 0.5, 3);
    let sp = LaplacianSpectrum::of(&g).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let draws = 10_000;
    let energy: f64 = (0..draws)
        .map(|_| {
            let f = smooth_signal(&sp, 0.1, &mut rng);
            g.quadratic_form(&f).unwrap() + 0.1 * f.iter().map(|x| x * x).sum::<f64>()
        })
        .sum::<f64>()
        / draws as f64;
    let synth_gap = (energy - 10.0).abs() / 10.0;

    // mirror symmetry and determinism of the chain
    let g = path(3);
    let sp = LaplacianSpectrum::of(&g).unwrap();
    let cfg = ModelConfig {
        tau_delta: Some(0.5),
        n_iter: 21_000,
        n_burn: 1_000,
        ..ModelConfig::default()
    };
    let y = [3.0, -0.5, 3.0];
    let a = run_chain(&cfg, &g, &sp, &y).unwrap();
    let symmetry = (a.p_outlier[0] - a.p_outlier[2]).abs();
    let deterministic = a == run_chain(&cfg, &g, &sp, &y).unwrap();

    let passed = worst_spec < 1e-8
        && worst_gft < 1e-10
        && worst_quad < 1e-10
        && worst_metric < 1e-12
        && worst_equiv < 1e-7
        && synth_gap < 0.05
        && symmetry < 0.02
        && deterministic;
    verdict(
        passed,
        format!(
            "spectral {worst_spec:.1e}, gft {worst_gft:.1e}, quadratic form {worst_quad:.1e}, \
             metrics {worst_metric:.1e}, lmf equivariance {worst_equiv:.1e}, \
             synth energy {synth_gap:.3}, mirror gap {symmetry:.4}, deterministic {deterministic}"
        ),
    )
}

fn main() -> ExitCode {
    let mut failed = 0;
    let mut report = |label: &str, start: Instant, v: Verdict| {
        let tag = if v.passed { "PASS" } else { "FAIL" };
        println!("{tag} {label}: {} [{:.1}s]", v.detail, start.elapsed().as_secs_f64());
        if !v.passed {
            failed += 1;
        }
    };

    let t = Instant::now();
    report("1 oracle equivalence", t, oracle_equivalence());

    let t = Instant::now();
    report("2 geweke joint distribution", t, geweke());

    let t = Instant::now();
    let snr2 = bench("er_p07_snr2");
    let (p, l) = (row(&snr2, Method::Proposed), row(&snr2, Method::Lmf));
    report(
        "3a ER p=0.7 SNR=2 proposed F1",
        t,
        verdict(
            (p.f1.mean - 0.751).abs() <= 0.10,
            format!("mean F1 {:.3} (target 0.751 +/- 0.10)", p.f1.mean),
        ),
    );
    report(
        "3b ER p=0.7 SNR=2 proposed AUC",
        t,
        verdict(p.auc.mean >= 0.93, format!("mean AUC {:.3} (>= 0.93)", p.auc.mean)),
    );
    report(
        "3c ER p=0.7 SNR=2 LMF F1",
        t,
        verdict(
            (l.f1.mean - 0.716).abs() <= 0.10,
            format!("mean F1 {:.3} (target 0.716 +/- 0.10)", l.f1.mean),
        ),
    );

    let t = Instant::now();
    let rgg = bench("rgg_snr2");
    let p = row(&rgg, Method::Proposed);
    report(
        "4a geometric graph proposed F1",
        t,
        verdict(
            (p.f1.mean - 0.707).abs() <= 0.10,
            format!("mean F1 {:.3} (target 0.707 +/- 0.10)", p.f1.mean),
        ),
    );
    report(
        "4b geometric graph proposed precision",
        t,
        verdict(
            p.precision.mean >= 0.80,
            format!("mean precision {:.3} (>= 0.80)", p.precision.mean),
        ),
    );

    let t = Instant::now();
    let f1_at = |rec: &BenchRecord| row(rec, Method::Proposed).f1.mean;
    let (low, mid) = (f1_at(&bench("er_p07_snr1")), f1_at(&snr2));
    let high = f1_at(&bench("er_p07_snr4"));
    report(
        "5 SNR monotonicity",
        t,
        verdict(
            high >= mid - 0.02 && mid >= low - 0.02,
            format!("F1 at SNR 1/2/4: {low:.3} / {mid:.3} / {high:.3} (0.02 slack per step)"),
        ),
    );

    let t = Instant::now();
    let sensor = bench("us_sensor_snr2");
    let (p, l) = (row(&sensor, Method::Proposed), row(&sensor, Method::Lmf));
    report(
        "6 sensor stand-in",
        t,
        verdict(
            p.n_trials == 50 && p.f1.mean > l.f1.mean - 0.05 && p.auc.mean >= 0.90,
            format!(
                "{} trials, F1 proposed {:.3} vs LMF {:.3} (> LMF - 0.05), AUC {:.3} (>= 0.90)",
                p.n_trials, p.f1.mean, l.f1.mean, p.auc.mean
            ),
        ),
    );

    let t = Instant::now();
    report("7 property suites", t, property_sweep());

    if failed == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criterion line(s) failed");
        ExitCode::FAILURE
    }
}
