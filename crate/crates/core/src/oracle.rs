//! Exact posterior outlier probabilities for tiny graphs.
//!
//! For every indicator pattern `s ∈ {0,1}^N` the latent signal `f`, the
//! slab magnitudes `δ` and the node probabilities `π` are integrated out in
//! closed form. With a flat prior on the null-space coordinate of `f`, that
//! coordinate integrates to a factor common to every `s`, leaving a Gaussian
//! density for the remaining spectral coordinates of `y`:
//!
//! ```text
//! ỹ_J ~ N(0, diag(1/(γλ_j) + 1/τ) + τ_δ⁻¹ U_Jᵀ D_s U_J)
//! ```
//!
//! The two precisions are then integrated numerically on a log-spaced
//! trapezoid grid, and the `2^N` weights are normalised in log space.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{check_len, Graph};
use crate::sampler::{compute_tau_delta, ModelConfig, PrecisionPrior};
use crate::scalar::{real, Real};
use crate::spectrum::LaplacianSpectrum;

/// Largest graph the enumeration accepts.
pub const MAX_NODES: usize = 6;

/// Largest probability change tolerated when the grid is refined.
pub const REFINEMENT_TOL: f64 = 1e-3;

/// Log-spaced quadrature nodes on one positive axis with trapezoid weights
/// in `ln x`, stored as logs.
#[derive(Clone, Debug, PartialEq)]
pub struct Axis<T: Real> {
    pub nodes: Vec<T>,
    pub log_weights: Vec<T>,
}

impl<T: Real> Axis<T> {
    pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Result<Self> {
        if !(lo > 0.0 && hi > lo) || count < 2 {
            return Err(Error::InvalidConfig(format!(
                "quadrature axis needs 0 < lo < hi and count >= 2, got [{lo}, {hi}] x {count}"
            )));
        }
        let (a, b) = (lo.ln(), hi.ln());
        let h = (b - a) / (count - 1) as f64;
        let nodes = (0..count).map(|k| real((a + h * k as f64).exp())).collect();
        let log_weights = (0..count)
            .map(|k| {
                let w = if k == 0 || k == count - 1 { h / 2.0 } else { h };
                real(w.ln())
            })
            .collect();
        Ok(Self { nodes, log_weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Range and resolution of the `(τ, γ)` quadrature.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            lo: 1e-8,
            hi: 1e8,
            count: 240,
        }
    }
}

impl GridSpec {
    pub fn refined(&self) -> Self {
        Self {
            count: self.count * 2,
            ..*self
        }
    }
}

/// Tensor-product grid over `(τ, γ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadGrid<T: Real> {
    pub tau: Axis<T>,
    pub gamma: Axis<T>,
}

impl<T: Real> QuadGrid<T> {
    pub fn new(spec: &GridSpec) -> Result<Self> {
        Ok(Self {
            tau: Axis::log_spaced(spec.lo, spec.hi, spec.count)?,
            gamma: Axis::log_spaced(spec.lo, spec.hi, spec.count)?,
        })
    }
}

fn log_sum_exp<T: Real>(xs: &[T]) -> T {
    let m = xs.iter().fold(T::min_value().unwrap(), |a, &b| a.max(b));
    if !m.is_finite() {
        return m;
    }
    m + xs.iter().fold(T::zero(), |a, &x| a + (x - m).exp()).ln()
}

fn ln_beta<T: Real>(a: T, b: T) -> T {
    a.ln_gamma_fn() + b.ln_gamma_fn() - (a + b).ln_gamma_fn()
}

/// In-place Cholesky of the `m × m` row-major matrix `a`; returns
/// `(ln det, bᵀ a⁻¹ b)`, or `None` if `a` is not positive definite.
fn chol_logdet_quad<T: Real>(a: &mut [T], m: usize, b: &[T], z: &mut [T]) -> Option<(T, T)> {
    for j in 0..m {
        let mut d = a[j * m + j];
        for k in 0..j {
            d -= a[j * m + k] * a[j * m + k];
        }
        if !(d > T::zero()) {
            return None;
        }
        let d = d.sqrt();
        a[j * m + j] = d;
        for i in (j + 1)..m {
            let mut v = a[i * m + j];
            for k in 0..j {
                v -= a[i * m + k] * a[j * m + k];
            }
            a[i * m + j] = v / d;
        }
    }
    let mut logdet = T::zero();
    let mut quad = T::zero();
    for i in 0..m {
        let mut v = b[i];
        for k in 0..i {
            v -= a[i * m + k] * z[k];
        }
        let lii = a[i * m + i];
        z[i] = v / lii;
        quad += z[i] * z[i];
        logdet += lii.ln();
    }
    Some((logdet * real(2.0), quad))
}

/// Oracle output for one grid resolution.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleResult<T: Real> {
    /// `P(s_i = 1 | y)` per node.
    pub probabilities: Vec<T>,
    /// Normalised posterior weight of every indicator pattern, indexed by bitmask.
    pub pattern_weights: Vec<T>,
    pub tau_delta: T,
    /// Largest probability change under grid refinement.
    pub refinement_change: T,
    pub warnings: Vec<String>,
}

struct Problem<T: Real> {
    /// Spectral coordinates of `y` kept in the Gaussian.
    y_spec: Vec<T>,
    /// Rows of `U_J`, one per node.
    rows: Vec<Vec<T>>,
    /// Prior precision per kept coordinate: `Some(λ_j)` scales with γ, `None` is the constant mode.
    lambdas: Vec<Option<T>>,
    constant_precision: T,
    tau_delta: T,
    alpha: T,
    beta: T,
    tau_prior: PrecisionPrior,
    gamma_prior: PrecisionPrior,
}

impl<T: Real> Problem<T> {
    fn dim(&self) -> usize {
        self.y_spec.len()
    }

    /// `ln ∫∫ N(ỹ_J; 0, Σ_s(τ, γ)) π(τ) π(γ) dτ dγ`.
    fn log_evidence(&self, mask: usize, grid: &QuadGrid<T>) -> T {
        let m = self.dim();
        let n = self.rows.len();
        let mut outer = vec![T::zero(); m * m];
        for i in (0..n).filter(|i| mask >> i & 1 == 1) {
            for a in 0..m {
                for b in 0..m {
                    outer[a * m + b] += self.rows[i][a] * self.rows[i][b];
                }
            }
        }
        let inv_td = T::one() / self.tau_delta;
        let half_log_2pi = real::<T>(0.5 * (2.0 * std::f64::consts::PI).ln() * m as f64);
        let mut work = vec![T::zero(); m * m];
        let mut z = vec![T::zero(); m];
        let mut terms = Vec::with_capacity(grid.tau.len() * grid.gamma.len());
        for (&tau, &lw_tau) in grid.tau.nodes.iter().zip(&grid.tau.log_weights) {
            let tau_term = lw_tau + tau.ln() + self.tau_prior.ln_density(tau);
            let inv_tau = T::one() / tau;
            for (&gamma, &lw_gamma) in grid.gamma.nodes.iter().zip(&grid.gamma.log_weights) {
                let gamma_term = lw_gamma + gamma.ln() + self.gamma_prior.ln_density(gamma);
                for k in 0..m * m {
                    work[k] = outer[k] * inv_td;
                }
                for (j, lambda) in self.lambdas.iter().enumerate() {
                    let prior_var = match lambda {
                        Some(l) => T::one() / (gamma * *l),
                        None => T::one() / self.constant_precision,
                    };
                    work[j * m + j] += prior_var + inv_tau;
                }
                let value = match chol_logdet_quad(&mut work, m, &self.y_spec, &mut z) {
                    Some((logdet, quad)) => -half_log_2pi - logdet * real(0.5) - quad * real(0.5),
                    None => T::min_value().unwrap(),
                };
                terms.push(tau_term + gamma_term + value);
            }
        }
        log_sum_exp(&terms)
    }

    fn solve(&self, grid: &QuadGrid<T>) -> (Vec<T>, Vec<T>) {
        let n = self.rows.len();
        let log_weights: Vec<T> = (0..1usize << n)
            .into_par_iter()
            .map(|mask| {
                let prior = (0..n).fold(T::zero(), |acc, i| {
                    let on = mask >> i & 1 == 1;
                    let (a, b) = if on {
                        (self.alpha + T::one(), self.beta)
                    } else {
                        (self.alpha, self.beta + T::one())
                    };
                    acc + ln_beta(a, b)
                });
                prior + self.log_evidence(mask, grid)
            })
            .collect();
        let total = log_sum_exp(&log_weights);
        let weights: Vec<T> = log_weights.iter().map(|&w| (w - total).exp()).collect();
        let probs = (0..n)
            .map(|i| {
                let on: Vec<T> = log_weights
                    .iter()
                    .enumerate()
                    .filter(|(mask, _)| mask >> i & 1 == 1)
                    .map(|(_, &w)| w)
                    .collect();
                (log_sum_exp(&on) - total).exp()
            })
            .collect();
        (probs, weights)
    }
}

/// Exact `P(s_i = 1 | y)` by enumeration over `s` and `(τ, γ)` quadrature.
///
/// The result is computed on `grid` and on its refinement; the refined
/// values are returned and the call fails if the two differ by more than
/// [`REFINEMENT_TOL`].
pub fn exact_outlier_prob<T: Real>(
    g: &Graph<T>,
    sp: &LaplacianSpectrum<T>,
    y: &[T],
    config: &ModelConfig,
    grid: &GridSpec,
) -> Result<OracleResult<T>> {
    let result = exact_outlier_prob_unchecked(g, sp, y, config, grid)?;
    if result.refinement_change.as_f64() > REFINEMENT_TOL {
        return Err(Error::GridNotConverged {
            change: result.refinement_change.as_f64(),
        });
    }
    Ok(result)
}

/// Same as [`exact_outlier_prob`] without failing on grid non-convergence.
pub fn exact_outlier_prob_unchecked<T: Real>(
    g: &Graph<T>,
    sp: &LaplacianSpectrum<T>,
    y: &[T],
    config: &ModelConfig,
    grid: &GridSpec,
) -> Result<OracleResult<T>> {
    config.validate()?;
    let n = g.n();
    if n > MAX_NODES {
        return Err(Error::OracleTooLarge { n, max: MAX_NODES });
    }
    check_len("signal", n, y.len())?;
    check_len("spectrum", n, sp.n())?;
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }

    let mut warnings = Vec::new();
    let y = perturb_degenerate(y, &mut warnings);
    let tau_delta = match config.tau_delta {
        Some(td) => real(td),
        None => compute_tau_delta(&y)?,
    };

    let coeffs = sp.gft(&y)?;
    let constant_precision: T = real(config.constant_mode_precision.unwrap_or(0.0));
    let keep: Vec<usize> = (0..n)
        .filter(|&j| j >= sp.null_dim() || constant_precision > T::zero())
        .collect();
    let problem = Problem {
        y_spec: keep.iter().map(|&j| coeffs[j]).collect(),
        rows: (0..n)
            .map(|i| keep.iter().map(|&j| sp.eigenvectors()[(i, j)]).collect())
            .collect(),
        lambdas: keep
            .iter()
            .map(|&j| (j >= sp.null_dim()).then(|| sp.eigenvalues()[j]))
            .collect(),
        constant_precision,
        tau_delta,
        alpha: real(config.alpha),
        beta: real(config.beta),
        tau_prior: config.tau_prior,
        gamma_prior: config.gamma_prior,
    };

    let (coarse, _) = problem.solve(&QuadGrid::new(grid)?);
    let (probabilities, pattern_weights) = problem.solve(&QuadGrid::new(&grid.refined())?);
    let refinement_change = coarse
        .iter()
        .zip(&probabilities)
        .fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs()));

    Ok(OracleResult {
        probabilities,
        pattern_weights,
        tau_delta,
        refinement_change,
        warnings,
    })
}

/// Nudges zero entries and a zero mean by `1e-9`, where posterior
/// propriety is not guaranteed.
fn perturb_degenerate<T: Real>(y: &[T], warnings: &mut Vec<String>) -> Vec<T> {
    let eps: T = real(1e-9);
    let mut out = y.to_vec();
    for (i, v) in out.iter_mut().enumerate() {
        if *v == T::zero() {
            *v = eps;
            warnings.push(format!("y[{i}] was exactly zero; perturbed by 1e-9"));
        }
    }
    if out.iter().fold(T::zero(), |a, &v| a + v) == T::zero() {
        for v in out.iter_mut() {
            *v += eps;
        }
        warnings.push("mean of y was exactly zero; shifted by 1e-9".into());
    }
    out
}

pub const FIXTURE_VERSION: u32 = 1;

/// A versioned oracle record: inputs and the exact probability vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleFixture {
    pub version: u32,
    pub name: String,
    pub n: usize,
    pub edges: Vec<(usize, usize, f64)>,
    pub y: Vec<f64>,
    pub alpha: f64,
    pub beta: f64,
    pub tau_delta: f64,
    pub grid: GridSpec,
    pub probabilities: Vec<f64>,
}

impl OracleFixture {
    pub fn graph(&self) -> Result<Graph<f64>> {
        Graph::build(self.n, &self.edges)
    }

    /// The model configuration the fixture was computed under.
    pub fn model_config(&self) -> ModelConfig {
        ModelConfig {
            alpha: self.alpha,
            beta: self.beta,
            tau_delta: Some(self.tau_delta),
            ..ModelConfig::default()
        }
    }
}

/// Named oracle inputs: a graph and an observed signal.
#[derive(Clone, Debug)]
pub struct FixtureInput {
    pub name: &'static str,
    pub n: usize,
    pub edges: Vec<(usize, usize, f64)>,
    pub y: Vec<f64>,
}

fn path_edges(n: usize) -> Vec<(usize, usize, f64)> {
    (0..n - 1).map(|i| (i, i + 1, 1.0)).collect()
}

/// Default agreement suite: 3- and 4-node paths and a 4-cycle, each with
/// one large value, plus a 6-node ramp whose spike the model picks up.
pub fn default_fixture_inputs() -> Vec<FixtureInput> {
    let mut cycle = path_edges(4);
    cycle.push((0, 3, 1.0));
    vec![
        FixtureInput {
            name: "path3",
            n: 3,
            edges: path_edges(3),
            y: vec![0.2, -0.1, 5.0],
        },
        FixtureInput {
            name: "path4",
            n: 4,
            edges: path_edges(4),
            y: vec![0.4, -0.3, 3.5, 0.1],
        },
        FixtureInput {
            name: "cycle4",
            n: 4,
            edges: cycle,
            y: vec![0.5, -0.4, 0.2, 4.5],
        },
        FixtureInput {
            name: "ramp6",
            n: 6,
            edges: path_edges(6),
            y: vec![0.0, 0.5, 1.0, 6.0, 2.0, 2.5],
        },
    ]
}

/// Runs the oracle on `input` with `α = 1, β = 9` and MAD-calibrated `τ_δ`.
pub fn compute_fixture(input: &FixtureInput, grid: &GridSpec) -> Result<OracleFixture> {
    let g = Graph::build(input.n, &input.edges)?;
    let sp = LaplacianSpectrum::of(&g)?;
    let cfg = ModelConfig::default();
    let result = exact_outlier_prob(&g, &sp, &input.y, &cfg, grid)?;
    Ok(OracleFixture {
        version: FIXTURE_VERSION,
        name: input.name.to_string(),
        n: input.n,
        edges: input.edges.clone(),
        y: input.y.clone(),
        alpha: cfg.alpha,
        beta: cfg.beta,
        tau_delta: result.tau_delta,
        grid: *grid,
        probabilities: result.probabilities,
    })
}

/// Largest tolerated node-wise gap between the chain and the oracle.
pub const AGREEMENT_TOL: f64 = 0.03;

/// Chain-versus-oracle comparison on one fixture.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgreementCheck {
    pub name: String,
    pub oracle: Vec<f64>,
    pub gibbs: Vec<f64>,
    pub max_abs_diff: f64,
    pub kept_draws: usize,
}

impl AgreementCheck {
    pub fn passed(&self) -> bool {
        self.max_abs_diff <= AGREEMENT_TOL
    }
}

/// Runs the Gibbs sampler on a fixture's inputs with `kept_draws` retained
/// sweeps after `burn` and compares it with the stored probabilities.
pub fn check_agreement(
    fixture: &OracleFixture,
    kept_draws: usize,
    burn: usize,
    seed: u64,
) -> Result<AgreementCheck> {
    let g = fixture.graph()?;
    let sp = LaplacianSpectrum::of(&g)?;
    let cfg = ModelConfig {
        n_iter: burn + kept_draws,
        n_burn: burn,
        seed,
        ..fixture.model_config()
    };
    let summary = crate::sampler::run_chain(&cfg, &g, &sp, &fixture.y)?;
    let max_abs_diff = summary
        .p_outlier
        .iter()
        .zip(&fixture.probabilities)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(AgreementCheck {
        name: fixture.name.clone(),
        oracle: fixture.probabilities.clone(),
        gibbs: summary.p_outlier,
        max_abs_diff,
        kept_draws,
    })
}
