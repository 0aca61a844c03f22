//! Precision, recall, F1 and ROC AUC for binary outlier labels.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::check_len;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Prf1 {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Precision, recall and F1. Any ratio with an empty denominator is 0.
pub fn prf1(truth: &[bool], predicted: &[bool]) -> Result<Prf1> {
    check_len("predicted labels", truth.len(), predicted.len())?;
    let (mut tp, mut fp, mut fn_) = (0usize, 0usize, 0usize);
    for (&t, &p) in truth.iter().zip(predicted) {
        match (t, p) {
            (true, true) => tp += 1,
            (false, true) => fp += 1,
            (true, false) => fn_ += 1,
            (false, false) => {}
        }
    }
    let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fn_);
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    Ok(Prf1 {
        precision,
        recall,
        f1,
    })
}

/// Mann–Whitney estimate of `P(score_pos > score_neg)`, ties counted half.
pub fn auc(truth: &[bool], scores: &[f64]) -> Result<f64> {
    check_len("scores", truth.len(), scores.len())?;
    if let Some(index) = scores.iter().position(|s| !s.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    let pos: Vec<f64> = truth.iter().zip(scores).filter(|(t, _)| **t).map(|(_, &s)| s).collect();
    let neg: Vec<f64> = truth.iter().zip(scores).filter(|(t, _)| !**t).map(|(_, &s)| s).collect();
    if pos.is_empty() || neg.is_empty() {
        return Err(Error::DegenerateTruth);
    }
    let mut wins = 0.0;
    for &p in &pos {
        for &q in &neg {
            wins += if p > q {
                1.0
            } else if p == q {
                0.5
            } else {
                0.0
            };
        }
    }
    Ok(wins / (pos.len() * neg.len()) as f64)
}
