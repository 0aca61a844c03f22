//! Scalar abstraction shared by every numeric routine in the crate.
//!
//! The graph, spectral, sampling and quadrature code is written once against
//! [`Real`] and instantiated for `f32` and `f64`. Random variates are drawn
//! through the trait so that generic code never has to spell out the
//! `rand_distr` bounds for each distribution.

use std::fmt::{Debug, Display};

use nalgebra::RealField;
use rand::Rng;
use rand_distr::{Beta, Distribution, Gamma, StandardNormal};

/// A real floating-point scalar usable throughout the crate.
pub trait Real: RealField + Copy + Default + Debug + Display + Send + Sync + 'static {
    /// Relative zero-eigenvalue tolerance (multiplied by the largest eigenvalue).
    const ZERO_TOL_REL: f64;
    /// Smallest rate handed to a Gamma draw before it is treated as degenerate.
    const RATE_FLOOR: f64;
    /// Largest precision value a Gamma draw is allowed to produce.
    const PRECISION_CAP: f64;

    fn as_f64(self) -> f64;

    /// Standard normal variate.
    fn std_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Uniform variate on `[0, 1)`.
    fn unit<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Gamma variate with the given shape and rate (not scale).
    fn gamma_variate<R: Rng + ?Sized>(shape: Self, rate: Self, rng: &mut R) -> Self;

    /// Beta variate.
    fn beta_variate<R: Rng + ?Sized>(a: Self, b: Self, rng: &mut R) -> Self;

    /// Natural log of the Gamma function for positive arguments.
    fn ln_gamma_fn(self) -> Self;

    /// Largest finite value.
    fn max_finite() -> Self;

    /// Smallest positive normal value.
    fn min_positive() -> Self;
}

/// Converts an `f64` literal into `T`.
#[inline]
pub fn real<T: Real>(x: f64) -> T {
    nalgebra::convert(x)
}

/// Converts a count into `T`.
#[inline]
pub fn count<T: Real>(n: usize) -> T {
    nalgebra::convert(n as f64)
}

macro_rules! impl_real {
    ($t:ty, $tol:expr, $floor:expr, $cap:expr) => {
        impl Real for $t {
            const ZERO_TOL_REL: f64 = $tol;
            const RATE_FLOOR: f64 = $floor;
            const PRECISION_CAP: f64 = $cap;

            #[inline]
            fn as_f64(self) -> f64 {
                self as f64
            }

            #[inline]
            fn std_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
                StandardNormal.sample(rng)
            }

            #[inline]
            fn unit<R: Rng + ?Sized>(rng: &mut R) -> Self {
                rng.random::<$t>()
            }

            fn gamma_variate<R: Rng + ?Sized>(shape: Self, rate: Self, rng: &mut R) -> Self {
                let dist = Gamma::new(shape, 1.0 / rate)
                    .unwrap_or_else(|e| panic!("invalid Gamma({shape}, {rate}): {e}"));
                dist.sample(rng)
            }

            fn beta_variate<R: Rng + ?Sized>(a: Self, b: Self, rng: &mut R) -> Self {
                let dist =
                    Beta::new(a, b).unwrap_or_else(|e| panic!("invalid Beta({a}, {b}): {e}"));
                dist.sample(rng)
            }

            fn ln_gamma_fn(self) -> Self {
                statrs::function::gamma::ln_gamma(self as f64) as $t
            }

            #[inline]
            fn max_finite() -> Self {
                <$t>::MAX
            }

            #[inline]
            fn min_positive() -> Self {
                <$t>::MIN_POSITIVE
            }
        }
    };
}

impl_real!(f64, 1e-9, 1e-300, 1e300);
impl_real!(f32, 1e-4, 1e-30, 1e30);
