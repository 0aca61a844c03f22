//! Full-conditional updates. Each `sample_*` function mutates one block of
//! the chain state in place; the closed-form helpers expose the conditional
//! parameters for testing.

use nalgebra::DVector;
use rand::Rng;

use super::PrecisionPrior;
use crate::scalar::{real, Real};
use crate::spectrum::LaplacianSpectrum;

/// One Gibbs iterate.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainState<T: Real> {
    pub f: Vec<T>,
    pub s: Vec<bool>,
    pub delta: Vec<T>,
    pub pi: Vec<T>,
    pub tau: T,
    pub gamma: T,
}

impl<T: Real> ChainState<T> {
    pub fn n(&self) -> usize {
        self.f.len()
    }

    /// `s_i δ_i`.
    pub fn outlier_effect(&self, i: usize) -> T {
        if self.s[i] {
            self.delta[i]
        } else {
            T::zero()
        }
    }

    /// `y - f - s ⊙ δ`.
    pub fn residual(&self, y: &[T]) -> Vec<T> {
        (0..self.n())
            .map(|i| y[i] - self.f[i] - self.outlier_effect(i))
            .collect()
    }

    pub fn is_finite(&self) -> bool {
        self.tau.is_finite()
            && self.gamma.is_finite()
            && self.f.iter().chain(&self.delta).chain(&self.pi).all(|x| x.is_finite())
    }
}

/// Numerically stable logistic function.
#[inline]
pub fn sigmoid<T: Real>(x: T) -> T {
    if x >= T::zero() {
        T::one() / (T::one() + (-x).exp())
    } else {
        let e = x.exp();
        e / (T::one() + e)
    }
}

/// Mean and variance of spectral coordinate `j` of `f`.
///
/// `prior_precision` is `γ λ_j` for a non-null coordinate, or the
/// constant-mode precision (zero when flat) for a null one.
#[inline]
pub fn f_coordinate_posterior<T: Real>(tau: T, prior_precision: T, coeff: T) -> (T, T) {
    let precision = tau + prior_precision;
    (coeff * (tau / precision), T::one() / precision)
}

/// Log-odds of `s_i = 1` given the current `δ_i` and residual `r_i = y_i - f_i`.
#[inline]
pub fn indicator_logit<T: Real>(pi: T, tau: T, delta: T, r: T) -> T {
    let prior = pi.ln() - (T::one() - pi).ln();
    prior + tau * (delta * (r - delta * real(0.5)))
}

/// Mean and variance of `δ_i` given `s_i`.
#[inline]
pub fn delta_posterior<T: Real>(s: bool, tau: T, tau_delta: T, r: T) -> (T, T) {
    if s {
        let precision = tau_delta + tau;
        (r * (tau / precision), T::one() / precision)
    } else {
        (T::zero(), T::one() / tau_delta)
    }
}

/// Beta parameters of `π_i` given `s_i`.
#[inline]
pub fn pi_posterior<T: Real>(alpha: T, beta: T, s: bool) -> (T, T) {
    if s {
        (alpha + T::one(), beta)
    } else {
        (alpha, beta + T::one())
    }
}

/// Draw every spectral coordinate of `f` given `y_eff = y - s ⊙ δ`.
pub fn sample_f<T: Real, R: Rng + ?Sized>(
    state: &mut ChainState<T>,
    sp: &LaplacianSpectrum<T>,
    y: &[T],
    constant_mode_precision: T,
    rng: &mut R,
) {
    let n = state.n();
    let y_eff = DVector::from_iterator(n, (0..n).map(|i| y[i] - state.outlier_effect(i)));
    let mut coeffs = sp.eigenvectors().tr_mul(&y_eff);
    let null_dim = sp.null_dim();
    for (j, c) in coeffs.iter_mut().enumerate() {
        let prior = if j < null_dim {
            constant_mode_precision
        } else {
            state.gamma * sp.eigenvalues()[j]
        };
        let (mean, var) = f_coordinate_posterior(state.tau, prior, *c);
        *c = mean + var.sqrt() * T::std_normal(rng);
    }
    let f = sp.eigenvectors() * coeffs;
    state.f.copy_from_slice(f.as_slice());
}

/// Draw each indicator conditional on the current `δ`.
pub fn sample_s<T: Real, R: Rng + ?Sized>(state: &mut ChainState<T>, y: &[T], rng: &mut R) {
    for i in 0..state.n() {
        let r = y[i] - state.f[i];
        let p = sigmoid(indicator_logit(state.pi[i], state.tau, state.delta[i], r));
        state.s[i] = T::unit(rng) < p;
    }
}

/// Draw each slab magnitude conditional on the updated `s`.
pub fn sample_delta<T: Real, R: Rng + ?Sized>(
    state: &mut ChainState<T>,
    y: &[T],
    tau_delta: T,
    rng: &mut R,
) {
    for i in 0..state.n() {
        let r = y[i] - state.f[i];
        let (mean, var) = delta_posterior(state.s[i], state.tau, tau_delta, r);
        state.delta[i] = mean + var.sqrt() * T::std_normal(rng);
    }
}

/// Conjugate Beta update of each node probability.
pub fn sample_pi<T: Real, R: Rng + ?Sized>(
    state: &mut ChainState<T>,
    alpha: T,
    beta: T,
    rng: &mut R,
) {
    let lo = T::default_epsilon();
    let hi = T::one() - lo;
    for i in 0..state.n() {
        let (a, b) = pi_posterior(alpha, beta, state.s[i]);
        state.pi[i] = T::beta_variate(a, b, rng).max(lo).min(hi);
    }
}

/// Noise precision. Returns `true` when the rate was floored.
pub fn sample_tau<T: Real, R: Rng + ?Sized>(
    state: &mut ChainState<T>,
    y: &[T],
    prior: &PrecisionPrior,
    rng: &mut R,
) -> bool {
    let ss = state
        .residual(y)
        .iter()
        .fold(T::zero(), |a, &e| a + e * e);
    let scale = y.iter().fold(T::zero(), |a, &v| a + v * v);
    let ss = negligible_to_zero(ss, scale, state.n());
    let (shape, rate) = prior.posterior(state.n(), ss);
    let (value, floored) = draw_precision(shape, rate, rng);
    state.tau = value;
    floored
}

/// Smoothness precision. Returns `true` when the rate was floored.
pub fn sample_gamma<T: Real, R: Rng + ?Sized>(
    state: &mut ChainState<T>,
    sp: &LaplacianSpectrum<T>,
    prior: &PrecisionPrior,
    rng: &mut R,
) -> bool {
    let coeffs = sp.eigenvectors().tr_mul(&DVector::from_column_slice(&state.f));
    let lambda_max = sp.eigenvalues()[sp.n() - 1];
    let scale = lambda_max * coeffs.norm_squared();
    let quad = negligible_to_zero(sp.smoothness(&coeffs), scale, sp.n());
    let (shape, rate) = prior.posterior(sp.rank(), quad);
    let (value, floored) = draw_precision(shape, rate, rng);
    state.gamma = value;
    floored
}

/// Sums of squares at rounding-noise level relative to `scale` are zero.
fn negligible_to_zero<T: Real>(ss: T, scale: T, n: usize) -> T {
    let noise = T::default_epsilon() * real::<T>(n as f64);
    if ss <= noise * noise * scale {
        T::zero()
    } else {
        ss
    }
}

fn draw_precision<T: Real, R: Rng + ?Sized>(shape: T, rate: T, rng: &mut R) -> (T, bool) {
    let floor = real::<T>(T::RATE_FLOOR);
    let floored = !(rate >= floor);
    let rate = if floored { floor } else { rate };
    let cap = real::<T>(T::PRECISION_CAP);
    let draw = T::gamma_variate(shape, rate, rng);
    let value = if draw.is_finite() { draw.min(cap) } else { cap };
    (value.max(T::min_positive()), floored)
}
