use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::steps::{sample_delta, sample_f, sample_gamma, sample_pi, sample_s, sample_tau, ChainState};
use super::{Hyperparameters, ModelConfig};
use crate::error::{Error, Result};
use crate::graph::{check_len, Graph};
use crate::robust::{mad, sample_variance, MAD_NORMAL_SCALE};
use crate::scalar::{count, real, Real};
use crate::spectrum::LaplacianSpectrum;

/// Slab precision `1 / (2 k² MAD(y)²)` with `k = 1/Φ⁻¹(3/4)`.
pub fn compute_tau_delta<T: Real>(y: &[T]) -> Result<T> {
    let m = mad(y).ok_or(Error::MadDegenerate)?;
    if !(m > T::zero()) {
        return Err(Error::MadDegenerate);
    }
    let k: T = real(MAD_NORMAL_SCALE);
    Ok(T::one() / (real::<T>(2.0) * k * k * m * m))
}

/// Counts of degenerate Gamma rates hit during a run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Diagnostics {
    pub tau_rate_floored: usize,
    pub gamma_rate_floored: usize,
}

impl Diagnostics {
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.tau_rate_floored > 0 {
            out.push(format!(
                "tau rate floored at RATE_FLOOR in {} sweep(s): residual was numerically zero",
                self.tau_rate_floored
            ));
        }
        if self.gamma_rate_floored > 0 {
            out.push(format!(
                "gamma rate floored at RATE_FLOOR in {} sweep(s): f was numerically constant",
                self.gamma_rate_floored
            ));
        }
        out
    }
}

/// Empirical posterior summaries over the retained draws.
#[derive(Clone, Debug, PartialEq)]
pub struct PosteriorSummary<T: Real> {
    /// Fraction of retained draws with `s_i = 1`.
    pub p_outlier: Vec<T>,
    /// `p_outlier > threshold`.
    pub classified: Vec<bool>,
    pub f_mean: Vec<T>,
    pub tau_mean: T,
    pub gamma_mean: T,
    pub n_kept: usize,
    pub tau_delta: T,
    pub threshold: T,
    pub seed: u64,
    pub warnings: Vec<String>,
}

/// One full sweep: `f`, then `s` and `δ`, then `π`, then `τ` and `γ`.
pub fn gibbs_sweep<T: Real, R: Rng + ?Sized>(
    sp: &LaplacianSpectrum<T>,
    y: &[T],
    hyper: &Hyperparameters<T>,
    state: &mut ChainState<T>,
    rng: &mut R,
    diag: &mut Diagnostics,
) {
    sample_f(state, sp, y, hyper.constant_mode_precision, rng);
    sample_s(state, y, rng);
    sample_delta(state, y, hyper.tau_delta, rng);
    sample_pi(state, hyper.alpha, hyper.beta, rng);
    if sample_tau(state, y, &hyper.tau_prior, rng) {
        diag.tau_rate_floored += 1;
    }
    if sample_gamma(state, sp, &hyper.gamma_prior, rng) {
        diag.gamma_rate_floored += 1;
    }
}

/// A configured chain over a fixed graph and observation.
#[derive(Clone, Debug)]
pub struct GibbsSampler<'a, T: Real> {
    sp: &'a LaplacianSpectrum<T>,
    y: &'a [T],
    hyper: Hyperparameters<T>,
    n_iter: usize,
    n_burn: usize,
    threshold: T,
    seed: u64,
}

impl<'a, T: Real> GibbsSampler<'a, T> {
    pub fn new(
        config: &ModelConfig,
        g: &Graph<T>,
        sp: &'a LaplacianSpectrum<T>,
        y: &'a [T],
    ) -> Result<Self> {
        config.validate()?;
        check_len("signal", g.n(), y.len())?;
        check_len("spectrum", g.n(), sp.n())?;
        if let Some(index) = y.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        if g.n() < 3 {
            return Err(Error::InvalidConfig(format!(
                "the model needs at least 3 nodes, got {}",
                g.n()
            )));
        }
        if !g.is_connected() {
            return Err(Error::Disconnected);
        }
        let tau_delta = match config.tau_delta {
            Some(td) => real(td),
            None => compute_tau_delta(y)?,
        };
        Ok(Self {
            sp,
            y,
            hyper: Hyperparameters::new(config, tau_delta),
            n_iter: config.n_iter,
            n_burn: config.n_burn,
            threshold: real(config.threshold),
            seed: config.seed,
        })
    }

    pub fn hyperparameters(&self) -> &Hyperparameters<T> {
        &self.hyper
    }

    /// `f = y`, no outliers, `π` at its prior mean, `τ = 1/Var(y)`, `γ = 1`.
    pub fn initial_state(&self) -> ChainState<T> {
        let n = self.y.len();
        let var = sample_variance(self.y);
        ChainState {
            f: self.y.to_vec(),
            s: vec![false; n],
            delta: vec![T::zero(); n],
            pi: vec![self.hyper.alpha / (self.hyper.alpha + self.hyper.beta); n],
            tau: if var > T::zero() { T::one() / var } else { T::one() },
            gamma: T::one(),
        }
    }

    pub fn run(&self) -> PosteriorSummary<T> {
        self.run_from(self.initial_state())
    }

    /// Runs `n_iter` sweeps from `state` with the configured seed.
    pub fn run_from(&self, mut state: ChainState<T>) -> PosteriorSummary<T> {
        let n = self.y.len();
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut diag = Diagnostics::default();
        let mut hits = vec![0usize; n];
        let mut f_sum = vec![T::zero(); n];
        let mut tau_sum = T::zero();
        let mut gamma_sum = T::zero();

        for it in 0..self.n_iter {
            gibbs_sweep(self.sp, self.y, &self.hyper, &mut state, &mut rng, &mut diag);
            if it < self.n_burn {
                continue;
            }
            for i in 0..n {
                hits[i] += state.s[i] as usize;
                f_sum[i] += state.f[i];
            }
            tau_sum += state.tau;
            gamma_sum += state.gamma;
        }

        let n_kept = self.n_iter - self.n_burn;
        let kept: T = count(n_kept);
        let p_outlier: Vec<T> = hits.iter().map(|&h| count::<T>(h) / kept).collect();
        let classified = p_outlier.iter().map(|&p| p > self.threshold).collect();
        let warnings = diag.warnings();
        for w in &warnings {
            log::warn!("{w}");
        }
        PosteriorSummary {
            p_outlier,
            classified,
            f_mean: f_sum.into_iter().map(|s| s / kept).collect(),
            tau_mean: tau_sum / kept,
            gamma_mean: gamma_sum / kept,
            n_kept,
            tau_delta: self.hyper.tau_delta,
            threshold: self.threshold,
            seed: self.seed,
            warnings,
        }
    }
}

/// Runs a single chain from the default initial state.
pub fn run_chain<T: Real>(
    config: &ModelConfig,
    g: &Graph<T>,
    sp: &LaplacianSpectrum<T>,
    y: &[T],
) -> Result<PosteriorSummary<T>> {
    Ok(GibbsSampler::new(config, g, sp, y)?.run())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> Graph<f64> {
        let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1, 1.0)).collect();
        Graph::build(n, &edges).unwrap()
    }

    #[test]
    fn tau_delta_from_mad() {
        let td: f64 = compute_tau_delta(&[1.0, 2.0, 3.0, 4.0, 100.0]).unwrap();
        // 1 / (2 · 1.482602218505602²)
        assert!((td - 0.227_468_211_559_786_3).abs() < 1e-12);
    }

    #[test]
    fn tau_delta_rejects_constant_signal() {
        assert!(matches!(
            compute_tau_delta(&[2.0f64; 5]),
            Err(Error::MadDegenerate)
        ));
    }

    #[test]
    fn tau_delta_scales_inverse_square() {
        let y = [0.3, -1.2, 4.0, 0.8, 2.2, -0.1];
        let scaled: Vec<f64> = y.iter().map(|v| v * 10.0).collect();
        let a: f64 = compute_tau_delta(&y).unwrap();
        let b: f64 = compute_tau_delta(&scaled).unwrap();
        assert!((a / b - 100.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_disconnected_and_tiny_graphs() {
        let g = Graph::build(4, &[(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        let sp = LaplacianSpectrum::of(&g).unwrap();
        let y = [0.1, 0.5, -0.2, 3.0];
        assert!(matches!(
            run_chain(&ModelConfig::default(), &g, &sp, &y),
            Err(Error::Disconnected)
        ));
        let g = path(2);
        let sp = LaplacianSpectrum::of(&g).unwrap();
        assert!(run_chain(&ModelConfig::default(), &g, &sp, &[0.0, 1.0]).is_err());
    }

    #[test]
    fn rejects_invalid_config() {
        let g = path(3);
        let sp = LaplacianSpectrum::of(&g).unwrap();
        let cfg = ModelConfig {
            n_burn: 10,
            n_iter: 10,
            ..ModelConfig::default()
        };
        assert!(matches!(
            run_chain(&cfg, &g, &sp, &[0.1, 0.2, 5.0]),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn deterministic_given_seed() {
        let g = path(5);
        let sp = LaplacianSpectrum::of(&g).unwrap();
        let y = [0.2, 0.1, 4.0, -0.3, 0.0];
        let cfg = ModelConfig {
            n_iter: 600,
            n_burn: 100,
            seed: 17,
            ..ModelConfig::default()
        };
        let a = run_chain(&cfg, &g, &sp, &y).unwrap();
        let b = run_chain(&cfg, &g, &sp, &y).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.n_kept, 500);
        for (p, c) in a.p_outlier.iter().zip(&a.classified) {
            assert!((0.0..=1.0).contains(p));
            assert_eq!(*c, *p > 0.5);
        }
    }

    #[test]
    fn single_precision_chain_runs() {
        let g = Graph::<f32>::build(4, &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)]).unwrap();
        let sp = LaplacianSpectrum::of(&g).unwrap();
        let y = [0.2f32, 0.1, 4.0, -0.3];
        let cfg = ModelConfig {
            n_iter: 400,
            n_burn: 100,
            ..ModelConfig::default()
        };
        let s = run_chain(&cfg, &g, &sp, &y).unwrap();
        assert!(s.p_outlier.iter().all(|p| p.is_finite()));
    }
}
