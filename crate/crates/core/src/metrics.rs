//! Scoring metrics.

use alloc::vec;
use alloc::vec::Vec;

use crate::dataset::binary_labels;
use crate::error::{Error, Result};
use crate::numeric::abs;

/// ROC AUC via the Mann-Whitney statistic with average ranks for ties.
pub fn auc(scores: &[f64], labels: &[f64]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::LengthMismatch {
            op: "auc",
            expected: labels.len(),
            actual: scores.len(),
        });
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::NonFinite("auc scores"));
    }
    let y = binary_labels(labels)?;
    let n_pos = y.iter().filter(|&&v| v == 1).count();
    let n_neg = y.len() - n_pos;
    if n_pos == 0 {
        return Err(Error::MissingClass(1));
    }
    if n_neg == 0 {
        return Err(Error::MissingClass(0));
    }
    let ranks = average_ranks(scores);
    // Ranks are multiples of 0.5, so this sum is exact for any realistic n.
    let pos_rank_sum: f64 = ranks
        .iter()
        .zip(&y)
        .filter(|(_, &l)| l == 1)
        .map(|(r, _)| r)
        .sum();
    let (p, q) = (n_pos as f64, n_neg as f64);
    Ok((pos_rank_sum - p * (p + 1.0) / 2.0) / (p * q))
}

/// 1-based ranks; tied values share the mean of their positions.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && values[idx[j + 1]] == values[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

fn check_pair(op: &'static str, predicted: &[f64], actual: &[f64]) -> Result<()> {
    if predicted.len() != actual.len() {
        return Err(Error::LengthMismatch {
            op,
            expected: actual.len(),
            actual: predicted.len(),
        });
    }
    if actual.is_empty() {
        return Err(Error::Empty(op));
    }
    Ok(())
}

/// Symmetric MAPE in percent, denominator `(|A| + |F|) / 2`. A term where
/// both are zero contributes 0. Bounded by 200.
pub fn smape(predicted: &[f64], actual: &[f64]) -> Result<f64> {
    check_pair("smape", predicted, actual)?;
    let total: f64 = predicted
        .iter()
        .zip(actual)
        .map(|(f, a)| {
            let d = (abs(*a) + abs(*f)) / 2.0;
            if d == 0.0 {
                0.0
            } else {
                abs(f - a) / d
            }
        })
        .sum();
    Ok(100.0 * total / actual.len() as f64)
}

/// Mean absolute percentage error in percent, or as a fraction when
/// `fraction` is set.
pub fn mape(predicted: &[f64], actual: &[f64], fraction: bool) -> Result<f64> {
    check_pair("mape", predicted, actual)?;
    let zeros: Vec<usize> = actual
        .iter()
        .enumerate()
        .filter(|(_, a)| **a == 0.0)
        .map(|(i, _)| i)
        .collect();
    if !zeros.is_empty() {
        return Err(Error::ZeroActual(zeros));
    }
    let total: f64 = predicted
        .iter()
        .zip(actual)
        .map(|(f, a)| abs(f - a) / abs(*a))
        .sum();
    let pct = 100.0 * total / actual.len() as f64;
    Ok(if fraction { pct / 100.0 } else { pct })
}

/// Which metric a cross-validation scores with, and which direction is
/// better.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "snake_case")
)]
pub enum MetricKind {
    Auc,
    Smape,
    Mape,
    /// MAPE reported as a fraction.
    MapeFraction,
}

impl MetricKind {
    pub fn evaluate(self, predicted: &[f64], actual: &[f64]) -> Result<f64> {
        match self {
            MetricKind::Auc => auc(predicted, actual),
            MetricKind::Smape => smape(predicted, actual),
            MetricKind::Mape => mape(predicted, actual, false),
            MetricKind::MapeFraction => mape(predicted, actual, true),
        }
    }

    pub fn higher_is_better(self) -> bool {
        self == MetricKind::Auc
    }

    pub fn name(self) -> &'static str {
        match self {
            MetricKind::Auc => "auc",
            MetricKind::Smape => "smape",
            MetricKind::Mape => "mape",
            MetricKind::MapeFraction => "mape_fraction",
        }
    }
}
