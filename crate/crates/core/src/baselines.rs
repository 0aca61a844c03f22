//! Local median filtering: neighbourhood-median smoothing followed by
//! modified z-scores of the residuals.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::graph::{check_len, Graph};
use crate::robust::{mad, mean, median};
use crate::scalar::{real, Real};

/// Scale of the modified z-score, `Φ⁻¹(3/4)`.
pub const MODIFIED_Z_SCALE: f64 = 0.6745;

/// Mean absolute deviation to standard deviation factor for a normal, `√(π/2)`.
pub const MEAN_AD_SCALE: f64 = 1.253_314;

/// Default flagging cutoff on `|M_i|`.
pub const DEFAULT_Z_THRESHOLD: f64 = 3.5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaselineResult<T: Real> {
    /// `|M_i|` per node.
    pub scores: Vec<T>,
    pub flagged: Vec<bool>,
    /// Neighbourhood medians; empty when only residuals were scored.
    pub fitted: Vec<T>,
    pub warnings: Vec<String>,
}

/// Median of each node's value together with its neighbours' values.
pub fn local_median_fit<T: Real>(g: &Graph<T>, y: &[T]) -> Result<Vec<T>> {
    check_len("signal", g.n(), y.len())?;
    Ok((0..g.n())
        .map(|i| {
            let mut hood: Vec<T> = g.neighbors(i).into_iter().map(|j| y[j]).collect();
            hood.push(y[i]);
            median(&hood).expect("neighbourhood contains the node itself")
        })
        .collect())
}

/// Scores residuals with the modified z-score `0.6745 (x - median) / MAD`
/// and flags those above `z_threshold`.
///
/// When the MAD is zero the mean absolute deviation takes its place,
/// `(x - median) / (1.2533 MeanAD)`. If that is zero too every residual
/// equals the median and nothing is flagged.
pub fn mad_detect<T: Real>(residuals: &[T], z_threshold: T) -> BaselineResult<T> {
    let n = residuals.len();
    let mut warnings = Vec::new();
    let Some(center) = median(residuals) else {
        return BaselineResult {
            scores: Vec::new(),
            flagged: Vec::new(),
            fitted: Vec::new(),
            warnings,
        };
    };
    let spread = mad(residuals).expect("nonempty");
    let dev: Vec<T> = residuals.iter().map(|&x| (x - center).abs()).collect();

    let scores: Vec<T> = if spread > T::zero() {
        let k = real::<T>(MODIFIED_Z_SCALE) / spread;
        dev.iter().map(|&d| d * k).collect()
    } else {
        let mean_ad = mean(&dev);
        if mean_ad > T::zero() {
            warnings.push("residual MAD is zero; scored with the mean absolute deviation".into());
            let k = T::one() / (real::<T>(MEAN_AD_SCALE) * mean_ad);
            dev.iter().map(|&d| d * k).collect()
        } else {
            warnings.push("all residuals equal; nothing flagged".into());
            vec![T::zero(); n]
        }
    };
    let flagged = scores.iter().map(|&s| s > z_threshold).collect();
    BaselineResult {
        scores,
        flagged,
        fitted: Vec::new(),
        warnings,
    }
}

/// Full local median filtering detector.
pub fn lmf<T: Real>(g: &Graph<T>, y: &[T], z_threshold: T) -> Result<BaselineResult<T>> {
    let fitted = local_median_fit(g, y)?;
    let residuals: Vec<T> = y.iter().zip(&fitted).map(|(&a, &b)| a - b).collect();
    let mut out = mad_detect(&residuals, z_threshold);
    out.fitted = fitted;
    Ok(out)
}
