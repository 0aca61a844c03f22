//! Shared graph builders and reference computations for the integration tests.
#![allow(dead_code)]

use graph_outlier::baselines::{lmf, DEFAULT_Z_THRESHOLD};
use graph_outlier::graph::Graph;
use graph_outlier::metrics::{auc, prf1};
use graph_outlier::spectrum::LaplacianSpectrum;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn path(n: usize) -> Graph<f64> {
    let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1, 1.0)).collect();
    Graph::build(n, &edges).unwrap()
}

pub fn cycle(n: usize) -> Graph<f64> {
    let mut edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1, 1.0)).collect();
    edges.push((0, n - 1, 1.0));
    Graph::build(n, &edges).unwrap()
}

/// Weighted graph with each pair joined with probability `density`.
pub fn random_graph(n: usize, density: f64, seed: u64) -> Graph<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random::<f64>() < density {
                edges.push((i, j, rng.random_range(0.05..3.0)));
            }
        }
    }
    Graph::build(n, &edges).unwrap()
}

pub fn random_signal(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.random_range(-5.0..5.0)).collect()
}

/// `½ Σ_i Σ_j w_ij (y_i - y_j)²` straight from the weights.
pub fn pairwise_roughness(g: &Graph<f64>, y: &[f64]) -> f64 {
    let n = g.n();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += g.weight(i, j) * (y[i] - y[j]).powi(2);
        }
    }
    0.5 * s
}

/// Relative gap between the Laplacian quadratic form and the pairwise sum.
pub fn quadratic_form_gap(g: &Graph<f64>, y: &[f64]) -> f64 {
    let direct = pairwise_roughness(g, y);
    let form = g.quadratic_form(y).unwrap();
    (form - direct).abs() / direct.abs().max(1.0)
}

/// `(‖UΛUᵀ − L‖_max, ‖UᵀU − I‖_max)`.
pub fn spectral_gaps(g: &Graph<f64>, sp: &LaplacianSpectrum<f64>) -> (f64, f64) {
    let recon = (sp.reconstruct() - g.laplacian()).abs().max();
    let u = sp.eigenvectors();
    let orth = (u.transpose() * u - DMatrix::identity(g.n(), g.n())).abs().max();
    (recon, orth)
}

pub fn gft_round_trip_gap(sp: &LaplacianSpectrum<f64>, y: &[f64]) -> f64 {
    let back = sp.igft(sp.gft(y).unwrap().as_slice()).unwrap();
    back.iter().zip(y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

/// Count of eigenvalues at or below the spectrum's zero tolerance.
pub fn near_zero_eigenvalues(sp: &LaplacianSpectrum<f64>) -> usize {
    sp.eigenvalues().iter().filter(|&&x| x <= sp.zero_tol()).count()
}

/// ROC area by the trapezoid rule over distinct score thresholds.
pub fn trapezoid_roc_auc(truth: &[bool], scores: &[f64]) -> f64 {
    let pos = truth.iter().filter(|&&t| t).count() as f64;
    let neg = truth.len() as f64 - pos;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap());
    let (mut tp, mut fp) = (0.0, 0.0);
    let (mut prev_tpr, mut prev_fpr) = (0.0, 0.0);
    let mut area = 0.0;
    let mut k = 0;
    while k < order.len() {
        let s = scores[order[k]];
        while k < order.len() && scores[order[k]] == s {
            if truth[order[k]] {
                tp += 1.0;
            } else {
                fp += 1.0;
            }
            k += 1;
        }
        let (tpr, fpr) = (tp / pos, fp / neg);
        area += (fpr - prev_fpr) * (tpr + prev_tpr) / 2.0;
        prev_tpr = tpr;
        prev_fpr = fpr;
    }
    area
}

/// Checks the metric identities on one labelled score vector; returns the
/// largest violation.
pub fn metric_identity_gap(truth: &[bool], scores: &[f64], predicted: &[bool]) -> f64 {
    let a = auc(truth, scores).unwrap();
    let mut gap = (a - trapezoid_roc_auc(truth, scores)).abs();
    let monotone: Vec<f64> = scores.iter().map(|s| s.exp() * 3.0 + 1.0).collect();
    gap = gap.max((auc(truth, &monotone).unwrap() - a).abs());
    let mut sorted = scores.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if sorted.windows(2).all(|w| w[0] < w[1]) {
        let neg: Vec<f64> = scores.iter().map(|s| -s).collect();
        gap = gap.max((a + auc(truth, &neg).unwrap() - 1.0).abs());
    }
    let m = prf1(truth, predicted).unwrap();
    for v in [m.precision, m.recall, m.f1] {
        if !(0.0..=1.0).contains(&v) {
            gap = gap.max(1.0);
        }
    }
    if m.f1 > 2.0 * m.precision.min(m.recall) + 1e-12 {
        gap = gap.max(m.f1 - 2.0 * m.precision.min(m.recall));
    }
    gap
}

/// Largest change in baseline scores under `y → c·y + shift`, plus 1 for any
/// flag that disagrees with its score.
pub fn baseline_equivariance_gap(g: &Graph<f64>, y: &[f64], shift: f64, scale: f64) -> f64 {
    let base = lmf(g, y, DEFAULT_Z_THRESHOLD).unwrap();
    let moved: Vec<f64> = y.iter().map(|v| scale * v + shift).collect();
    let other = lmf(g, &moved, DEFAULT_Z_THRESHOLD).unwrap();
    let mut gap: f64 = 0.0;
    for (a, b) in base.scores.iter().zip(&other.scores) {
        gap = gap.max((a - b).abs() / a.abs().max(1.0));
    }
    for r in [&base, &other] {
        for (s, f) in r.scores.iter().zip(&r.flagged) {
            if *f != (*s > DEFAULT_Z_THRESHOLD) || *s < 0.0 {
                gap = gap.max(1.0);
            }
        }
    }
    gap
}
