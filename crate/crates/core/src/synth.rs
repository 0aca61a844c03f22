//! Synthetic ground truth: a smooth GMRF-style signal, SNR-calibrated
//! Gaussian noise, and sparse signed outliers.

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::robust::{sample_sd, sample_variance};
use crate::scalar::{real, Real};
use crate::spectrum::LaplacianSpectrum;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    /// `Var(f) / Var(noise)`.
    pub snr: f64,
    pub n_outliers: usize,
    /// Added to the Laplacian before taking the inverse square root.
    pub ridge: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            snr: 2.0,
            n_outliers: 5,
            ridge: 0.1,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self, n: usize) -> Result<()> {
        if !(self.snr > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "synth.snr must be positive, got {}",
                self.snr
            )));
        }
        if !(self.ridge > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "synth.ridge must be positive, got {}",
                self.ridge
            )));
        }
        if self.n_outliers > n {
            return Err(Error::TooManyOutliers {
                m: self.n_outliers,
                n,
            });
        }
        Ok(())
    }
}

/// A synthetic observation with everything needed to score a detector.
///
/// `y` is assembled as `(f + noise) + mask ⊙ outlier_values`, in that order.
#[derive(Clone, Debug, PartialEq)]
pub struct GroundTruth<T: Real> {
    pub f: Vec<T>,
    pub noise: Vec<T>,
    pub y: Vec<T>,
    pub outlier_mask: Vec<bool>,
    /// Signed injected magnitude; zero where the mask is false.
    pub outlier_values: Vec<T>,
}

impl<T: Real> GroundTruth<T> {
    pub fn n_outliers(&self) -> usize {
        self.outlier_mask.iter().filter(|&&m| m).count()
    }
}

/// `f = U diag((λ_j + ridge)^{-1/2}) Uᵀ z` with `z` standard normal.
pub fn smooth_signal<T: Real, R: Rng + ?Sized>(
    sp: &LaplacianSpectrum<T>,
    ridge: T,
    rng: &mut R,
) -> Vec<T> {
    let z: Vec<T> = (0..sp.n()).map(|_| T::std_normal(rng)).collect();
    smooth_from_white(sp, ridge, &z)
}

/// Deterministic part of [`smooth_signal`] for a given white-noise vector.
pub fn smooth_from_white<T: Real>(sp: &LaplacianSpectrum<T>, ridge: T, z: &[T]) -> Vec<T> {
    let mut c = sp.gft(z).expect("white noise has graph length");
    for (j, cj) in c.iter_mut().enumerate() {
        *cj /= (sp.effective_eigenvalue(j) + ridge).sqrt();
    }
    sp.igft(c.as_slice())
        .expect("coefficients have graph length")
        .iter()
        .copied()
        .collect()
}

/// I.i.d. Gaussian noise with variance `Var(f) / snr` (sample variance of `f`).
pub fn noise_for<T: Real, R: Rng + ?Sized>(f: &[T], snr: T, rng: &mut R) -> Result<Vec<T>> {
    let var = sample_variance(f);
    if !(var > T::zero()) {
        return Err(Error::ZeroVariance);
    }
    let sd = (var / snr).sqrt();
    Ok((0..f.len()).map(|_| T::std_normal(rng) * sd).collect())
}

/// `f + noise` with noise from [`noise_for`].
pub fn add_noise<T: Real, R: Rng + ?Sized>(f: &[T], snr: T, rng: &mut R) -> Result<Vec<T>> {
    let noise = noise_for(f, snr, rng)?;
    Ok(f.iter().zip(&noise).map(|(&a, &e)| a + e).collect())
}

/// Adds `m` signed outliers to randomly chosen nodes of `noisy`.
///
/// Magnitudes are `Normal(max_i |f_i|, sd(f)/2)`, used as drawn and then
/// negated with probability one half.
pub fn inject_outliers<T: Real, R: Rng + ?Sized>(
    noisy: &[T],
    f: &[T],
    m: usize,
    rng: &mut R,
) -> Result<(Vec<T>, Vec<bool>, Vec<T>)> {
    let n = noisy.len();
    if m > n {
        return Err(Error::TooManyOutliers { m, n });
    }
    let center = f.iter().fold(T::zero(), |a, &x| a.max(x.abs()));
    let spread = sample_sd(f) * real(0.5);
    let mut mask = vec![false; n];
    let mut values = vec![T::zero(); n];
    let mut y = noisy.to_vec();
    for i in index::sample(rng, n, m).into_vec() {
        let magnitude = center + spread * T::std_normal(rng);
        let v = if rng.random::<bool>() { magnitude } else { -magnitude };
        mask[i] = true;
        values[i] = v;
        y[i] += v;
    }
    Ok((y, mask, values))
}

/// Full pipeline: smooth signal, noise, outliers.
pub fn synthesize<T: Real, R: Rng + ?Sized>(
    sp: &LaplacianSpectrum<T>,
    cfg: &SynthConfig,
    rng: &mut R,
) -> Result<GroundTruth<T>> {
    cfg.validate(sp.n())?;
    let f = smooth_signal(sp, real(cfg.ridge), rng);
    let noise = noise_for(&f, real(cfg.snr), rng)?;
    let noisy: Vec<T> = f.iter().zip(&noise).map(|(&a, &e)| a + e).collect();
    let (y, outlier_mask, outlier_values) = inject_outliers(&noisy, &f, cfg.n_outliers, rng)?;
    Ok(GroundTruth {
        f,
        noise,
        y,
        outlier_mask,
        outlier_values,
    })
}
