//! Connection-weight feature importance.
//!
//! [`ega`] handles an arbitrary stack of weight matrices whose chain starts
//! and ends at the input width:
//!
//! ```text
//! N^l[i][j] = |W^l[i][j]| / sum_i |W^l[i][j]|      column normalization
//! CW        = N^1 N^2 ... N^L                      n x n, column-stochastic
//! rc_i      = sum_j CW[i][j]
//! score_i   = 100 rc_i / sum_k rc_k
//! ```
//!
//! [`garson`] is the original one-hidden-layer partitioning. Both ignore
//! signs and biases. Sums that feed a score are order-independent so that
//! permuting the inputs permutes the scores bit for bit.

use alloc::vec::Vec;
use core::ops::Deref;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::numeric::{abs, stable_sum};

/// What to do with a weight column whose absolute sum is zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "snake_case")
)]
pub enum DeadColumnPolicy {
    #[default]
    Error,
    /// Spread the column uniformly, `1 / rows` per entry.
    Uniform,
}

/// Nonnegative matrix whose columns each sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedWeightMatrix(Matrix);

impl NormalizedWeightMatrix {
    pub fn into_inner(self) -> Matrix {
        self.0
    }
}

impl Deref for NormalizedWeightMatrix {
    type Target = Matrix;
    fn deref(&self) -> &Matrix {
        &self.0
    }
}

/// Column-normalizes `|w|`. `layer` only labels errors.
pub fn normalize_columns(
    w: &Matrix,
    layer: usize,
    policy: DeadColumnPolicy,
) -> Result<NormalizedWeightMatrix> {
    let (rows, cols) = (w.rows(), w.cols());
    let mut out = Matrix::zeros(rows, cols);
    let mut col = Vec::with_capacity(rows);
    for j in 0..cols {
        col.clear();
        col.extend((0..rows).map(|i| abs(w.get(i, j))));
        let total = stable_sum(&col);
        if total == 0.0 {
            match policy {
                DeadColumnPolicy::Error => return Err(Error::ZeroColumn { layer, column: j }),
                DeadColumnPolicy::Uniform => {
                    for i in 0..rows {
                        out.data_mut()[i * cols + j] = 1.0 / rows as f64;
                    }
                    continue;
                }
            }
        }
        for (i, v) in col.iter().enumerate() {
            out.data_mut()[i * cols + j] = v / total;
        }
    }
    Ok(NormalizedWeightMatrix(out))
}

/// Left-to-right product of the normalized chain.
pub fn cumulative_weights(normalized: &[NormalizedWeightMatrix]) -> Result<Matrix> {
    let first = normalized.first().ok_or(Error::Empty("weight list"))?;
    let mut cw = first.0.clone();
    for (l, m) in normalized.iter().enumerate().skip(1) {
        cw = cw.matmul(m).map_err(|e| Error::Layer {
            layer: l,
            source: alloc::boxed::Box::new(e),
        })?;
    }
    if cw.rows() != cw.cols() {
        return Err(Error::ShapeMismatch {
            op: "cumulative weights must be square",
            left: first.shape(),
            right: normalized.last().unwrap().shape(),
        });
    }
    Ok(cw)
}

/// Row sums of `cw`.
pub fn relative_contribution(cw: &Matrix) -> Result<Vec<f64>> {
    if cw.rows() != cw.cols() {
        return Err(Error::ShapeMismatch {
            op: "relative_contribution needs a square matrix",
            left: cw.shape(),
            right: cw.shape(),
        });
    }
    Ok(cw.iter_rows().map(stable_sum).collect())
}

/// Per-feature scores in percent with a descending ranking.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ImportanceVector {
    pub scores: Vec<f64>,
    /// Feature indices by descending score, ties by ascending index.
    pub ranking: Vec<usize>,
}

impl ImportanceVector {
    /// Wraps precomputed percentages and derives the ranking.
    pub fn from_scores(scores: Vec<f64>) -> Self {
        let ranking = rank_descending(&scores);
        ImportanceVector { scores, ranking }
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    /// 1-based rank of every feature.
    pub fn ranks(&self) -> Vec<usize> {
        let mut r = alloc::vec![0; self.scores.len()];
        for (pos, &i) in self.ranking.iter().enumerate() {
            r[i] = pos + 1;
        }
        r
    }
}

/// Indices by descending value, ties by ascending index.
pub fn rank_descending(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    idx
}

/// `100 rc_i / sum(rc)`.
pub fn relative_importance(rc: &[f64]) -> Result<ImportanceVector> {
    if rc.is_empty() {
        return Err(Error::Empty("relative contribution"));
    }
    if rc.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::invalid(
            "relative contributions must be finite and >= 0",
        ));
    }
    let total = stable_sum(rc);
    if total <= 0.0 {
        return Err(Error::invalid("relative contributions sum to zero"));
    }
    Ok(ImportanceVector::from_scores(
        rc.iter().map(|v| 100.0 * v / total).collect(),
    ))
}

/// Extended Garson importance of a shape-chained weight list.
pub fn ega(weights: &[Matrix]) -> Result<ImportanceVector> {
    ega_with(weights, DeadColumnPolicy::Error)
}

pub fn ega_with(weights: &[Matrix], policy: DeadColumnPolicy) -> Result<ImportanceVector> {
    let normalized = weights
        .iter()
        .enumerate()
        .map(|(l, w)| normalize_columns(w, l, policy))
        .collect::<Result<Vec<_>>>()?;
    let cw = cumulative_weights(&normalized)?;
    relative_importance(&relative_contribution(&cw)?)
}

/// Garson importance of a one-hidden-layer network.
///
/// `w_ih` is inputs x hidden, `w_ho` hidden x outputs. The share of input
/// `i` in hidden unit `j` is weighted by `sum_o |w_jo|`; shares are summed
/// over hidden units and converted to percent.
pub fn garson(w_ih: &Matrix, w_ho: &Matrix) -> Result<ImportanceVector> {
    if w_ih.cols() != w_ho.rows() {
        return Err(Error::ShapeMismatch {
            op: "garson",
            left: w_ih.shape(),
            right: w_ho.shape(),
        });
    }
    let share = normalize_columns(w_ih, 0, DeadColumnPolicy::Error)?;
    let out_weight: Vec<f64> = w_ho
        .iter_rows()
        .map(|r| stable_sum(&r.iter().map(|v| abs(*v)).collect::<Vec<_>>()))
        .collect();
    let rc: Vec<f64> = share
        .iter_rows()
        .map(|r| {
            let terms: Vec<f64> = r.iter().zip(&out_weight).map(|(s, o)| s * o).collect();
            stable_sum(&terms)
        })
        .collect();
    relative_importance(&rc)
}

/// The first `k` ranked features and their summed percentage.
pub fn top_k(importance: &ImportanceVector, k: usize) -> Result<(Vec<usize>, f64)> {
    let n = importance.len();
    if k == 0 || k > n {
        return Err(Error::invalid(alloc::format!("k = {k} outside 1..={n}")));
    }
    let idx = importance.ranking[..k].to_vec();
    let total = idx.iter().map(|&i| importance.scores[i]).sum();
    Ok((idx, total))
}
