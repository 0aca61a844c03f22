//! Joint-distribution test of the Gibbs updates.
//!
//! The marginal-conditional simulator draws parameters from the prior
//! directly. The successive-conditional simulator alternates a fresh data
//! draw `y | θ` with one Gibbs sweep `θ | y`. If every conditional update is
//! correct both simulators sample the same joint distribution, so the means
//! of any test function of `θ` must agree up to Monte Carlo error.
//!
//! The model's precision priors and constant-mode prior are improper, so the
//! test runs with proper stand-ins supplied through [`Hyperparameters`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::chain::{gibbs_sweep, Diagnostics};
use super::steps::ChainState;
use super::Hyperparameters;
use crate::error::{Error, Result};
use crate::scalar::{count, real, Real};
use crate::spectrum::LaplacianSpectrum;

/// Draws `θ` from the (proper) prior.
pub fn draw_prior<T: Real, R: Rng + ?Sized>(
    sp: &LaplacianSpectrum<T>,
    hyper: &Hyperparameters<T>,
    rng: &mut R,
) -> Result<ChainState<T>> {
    if !hyper.tau_prior.is_proper()
        || !hyper.gamma_prior.is_proper()
        || !(hyper.constant_mode_precision > T::zero())
    {
        return Err(Error::InvalidConfig(
            "prior draws need proper tau, gamma and constant-mode priors".into(),
        ));
    }
    let n = sp.n();
    let tau = T::gamma_variate(
        real(hyper.tau_prior.shape),
        real(hyper.tau_prior.rate),
        rng,
    );
    let gamma = T::gamma_variate(
        real(hyper.gamma_prior.shape),
        real(hyper.gamma_prior.rate),
        rng,
    );
    let lo = T::default_epsilon();
    let pi: Vec<T> = (0..n)
        .map(|_| {
            T::beta_variate(hyper.alpha, hyper.beta, rng)
                .max(lo)
                .min(T::one() - lo)
        })
        .collect();
    let s: Vec<bool> = pi.iter().map(|&p| T::unit(rng) < p).collect();
    let slab_sd = T::one() / hyper.tau_delta.sqrt();
    let delta: Vec<T> = (0..n).map(|_| T::std_normal(rng) * slab_sd).collect();
    let coeffs: Vec<T> = (0..n)
        .map(|j| {
            let precision = if j < sp.null_dim() {
                hyper.constant_mode_precision
            } else {
                gamma * sp.eigenvalues()[j]
            };
            T::std_normal(rng) / precision.sqrt()
        })
        .collect();
    let f = sp.igft(&coeffs)?.iter().copied().collect();
    Ok(ChainState {
        f,
        s,
        delta,
        pi,
        tau,
        gamma,
    })
}

/// Draws `y ~ N(f + s ⊙ δ, τ⁻¹ I)`.
pub fn draw_data<T: Real, R: Rng + ?Sized>(state: &ChainState<T>, rng: &mut R) -> Vec<T> {
    let sd = T::one() / state.tau.sqrt();
    (0..state.n())
        .map(|i| state.f[i] + state.outlier_effect(i) + sd * T::std_normal(rng))
        .collect()
}

/// Test functions compared by the harness, in report order.
pub const STATISTICS: [&str; 3] = ["sum_s", "delta_sq", "mean_pi"];

fn statistics<T: Real>(state: &ChainState<T>) -> [f64; 3] {
    let sum_s = state.s.iter().filter(|&&s| s).count() as f64;
    let delta_sq = state.delta.iter().map(|d| d.as_f64() * d.as_f64()).sum();
    let mean_pi =
        (state.pi.iter().fold(T::zero(), |a, &p| a + p) / count(state.n())).as_f64();
    [sum_s, delta_sq, mean_pi]
}

#[derive(Clone, Debug, PartialEq)]
pub struct GewekeComparison {
    pub name: &'static str,
    pub marginal_mean: f64,
    pub marginal_se: f64,
    pub successive_mean: f64,
    pub successive_se: f64,
}

impl GewekeComparison {
    /// Difference of means in units of the combined standard error.
    pub fn z(&self) -> f64 {
        (self.marginal_mean - self.successive_mean)
            / (self.marginal_se.powi(2) + self.successive_se.powi(2)).sqrt()
    }
}

#[derive(Clone, Debug)]
pub struct GewekeReport {
    pub sweeps: usize,
    pub comparisons: Vec<GewekeComparison>,
}

impl GewekeReport {
    pub fn max_abs_z(&self) -> f64 {
        self.comparisons
            .iter()
            .map(|c| c.z().abs())
            .fold(0.0, f64::max)
    }
}

fn mean_se_iid(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Batch-means standard error for an autocorrelated series.
fn mean_se_batched(xs: &[f64], batches: usize) -> (f64, f64) {
    let size = xs.len() / batches;
    let means: Vec<f64> = xs
        .chunks_exact(size)
        .take(batches)
        .map(|c| c.iter().sum::<f64>() / size as f64)
        .collect();
    let (mean, se) = mean_se_iid(&means);
    let overall = xs[..size * batches].iter().sum::<f64>() / (size * batches) as f64;
    debug_assert!((mean - overall).abs() < 1e-9 * (1.0 + overall.abs()));
    (overall, se)
}

/// Runs both simulators for `sweeps` draws each.
pub fn geweke_test<T: Real>(
    sp: &LaplacianSpectrum<T>,
    hyper: &Hyperparameters<T>,
    sweeps: usize,
    seed: u64,
) -> Result<GewekeReport> {
    const BATCHES: usize = 100;
    if sweeps < BATCHES * 10 {
        return Err(Error::InvalidConfig(format!(
            "geweke test needs at least {} sweeps",
            BATCHES * 10
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut marginal = (0..3).map(|_| Vec::with_capacity(sweeps)).collect::<Vec<_>>();
    for _ in 0..sweeps {
        let state = draw_prior(sp, hyper, &mut rng)?;
        let _y = draw_data(&state, &mut rng);
        for (k, v) in statistics(&state).into_iter().enumerate() {
            marginal[k].push(v);
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut state = draw_prior(sp, hyper, &mut rng)?;
    let mut diag = Diagnostics::default();
    let mut successive = (0..3).map(|_| Vec::with_capacity(sweeps)).collect::<Vec<_>>();
    for _ in 0..sweeps {
        let y = draw_data(&state, &mut rng);
        gibbs_sweep(sp, &y, hyper, &mut state, &mut rng, &mut diag);
        for (k, v) in statistics(&state).into_iter().enumerate() {
            successive[k].push(v);
        }
    }

    let comparisons = STATISTICS
        .iter()
        .enumerate()
        .map(|(k, &name)| {
            let (marginal_mean, marginal_se) = mean_se_iid(&marginal[k]);
            let (successive_mean, successive_se) = mean_se_batched(&successive[k], BATCHES);
            GewekeComparison {
                name,
                marginal_mean,
                marginal_se,
                successive_mean,
                successive_se,
            }
        })
        .collect();
    Ok(GewekeReport {
        sweeps,
        comparisons,
    })
}
