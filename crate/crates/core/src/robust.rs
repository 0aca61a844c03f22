//! Median, MAD and sample moments.

use crate::scalar::{count, real, Real};

/// `1 / Φ⁻¹(3/4)`: scales MAD into a consistent estimate of a normal standard deviation.
pub const MAD_NORMAL_SCALE: f64 = 1.482_602_218_505_602;

/// Median; even lengths take the midpoint of the two central order statistics.
///
/// Returns `None` for an empty slice.
pub fn median<T: Real>(xs: &[T]) -> Option<T> {
    if xs.is_empty() {
        return None;
    }
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("median of non-finite values"));
    let mid = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[mid]
    } else {
        (v[mid - 1] + v[mid]) * real(0.5)
    })
}

/// `median(|x - median(x)|)`.
pub fn mad<T: Real>(xs: &[T]) -> Option<T> {
    let m = median(xs)?;
    let dev: Vec<T> = xs.iter().map(|&x| (x - m).abs()).collect();
    median(&dev)
}

pub fn mean<T: Real>(xs: &[T]) -> T {
    xs.iter().fold(T::zero(), |a, &x| a + x) / count(xs.len())
}

/// Sample variance with denominator `n - 1`; zero for fewer than two values.
pub fn sample_variance<T: Real>(xs: &[T]) -> T {
    if xs.len() < 2 {
        return T::zero();
    }
    let m = mean(xs);
    xs.iter().fold(T::zero(), |a, &x| a + (x - m) * (x - m)) / count(xs.len() - 1)
}

pub fn sample_sd<T: Real>(xs: &[T]) -> T {
    sample_variance(xs).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_conventions() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0, 1.0, 3.0, 2.0]), Some(2.5));
        assert_eq!(median::<f64>(&[]), None);
    }

    #[test]
    fn mad_of_example() {
        assert_eq!(mad(&[1.0, 2.0, 3.0, 4.0, 100.0]), Some(1.0));
        assert_eq!(mad(&[7.0; 4]), Some(0.0));
    }

    #[test]
    fn scale_constant_matches_normal_quantile() {
        use statrs::distribution::{ContinuousCDF, Normal};
        let q = Normal::new(0.0, 1.0).unwrap().inverse_cdf(0.75);
        assert!((MAD_NORMAL_SCALE - 1.0 / q).abs() < 1e-9);
    }

    #[test]
    fn sample_variance_uses_n_minus_one() {
        assert_eq!(sample_variance(&[1.0, 3.0]), 2.0);
        assert_eq!(sample_variance(&[5.0]), 0.0);
    }
}
