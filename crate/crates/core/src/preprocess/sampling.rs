//! Class rebalancing: SMOTE and random over/under-sampling.

use alloc::format;
use alloc::vec::Vec;

use crate::dataset::{ColumnKind, Dataset};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng::RngStream;

pub const DEFAULT_SMOTE_K: usize = 5;

/// Synthesizes `n_synthetic` rows on segments between minority samples and
/// one of their `k` nearest minority neighbours.
///
/// Each synthetic row is `x + λ (x_nn - x)` for a uniformly drawn minority
/// row `x`, a uniformly drawn neighbour among its `k` nearest (Euclidean,
/// ties broken by lower row index) and `λ ~ U[0, 1)`. Returns `None` when
/// `n_synthetic` is zero.
pub fn smote(
    minority: &Matrix,
    k: usize,
    n_synthetic: usize,
    rng: &mut RngStream,
) -> Result<Option<Matrix>> {
    let m = minority.rows();
    if k == 0 {
        return Err(Error::invalid("SMOTE needs k >= 1"));
    }
    if m <= k {
        return Err(Error::invalid(format!(
            "SMOTE needs more than k={k} minority rows, got {m}"
        )));
    }
    if n_synthetic == 0 {
        return Ok(None);
    }
    let neighbours = nearest_neighbours(minority, k);
    let d = minority.cols();
    let mut out = Vec::with_capacity(n_synthetic * d);
    for _ in 0..n_synthetic {
        let i = rng.below(m);
        let nn = neighbours[i * k + rng.below(k)];
        let lambda = rng.uniform();
        let (x, y) = (minority.row(i), minority.row(nn));
        out.extend(x.iter().zip(y).map(|(a, b)| a + lambda * (b - a)));
    }
    Matrix::new(n_synthetic, d, out).map(Some)
}

fn nearest_neighbours(x: &Matrix, k: usize) -> Vec<usize> {
    let m = x.rows();
    let mut out = Vec::with_capacity(m * k);
    let mut dist: Vec<(f64, usize)> = Vec::with_capacity(m);
    for i in 0..m {
        dist.clear();
        let xi = x.row(i);
        for j in (0..m).filter(|&j| j != i) {
            let d: f64 = xi
                .iter()
                .zip(x.row(j))
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            dist.push((d, j));
        }
        dist.select_nth_unstable_by(k - 1, |a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut best: Vec<(f64, usize)> = dist[..k].to_vec();
        best.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        out.extend(best.iter().map(|p| p.1));
    }
    out
}

fn class_indices(data: &Dataset) -> Result<[Vec<usize>; 2]> {
    let labels = data.class_labels()?;
    let mut idx = [Vec::new(), Vec::new()];
    for (i, &l) in labels.iter().enumerate() {
        idx[l as usize].push(i);
    }
    for (c, v) in idx.iter().enumerate() {
        if v.is_empty() {
            return Err(Error::MissingClass(c as u8));
        }
    }
    Ok(idx)
}

/// Appends SMOTE rows to the minority class until both classes are equal.
pub fn smote_balance(data: &Dataset, k: usize, rng: &mut RngStream) -> Result<Dataset> {
    if data
        .schema()
        .iter()
        .any(|c| matches!(c.kind, ColumnKind::Categorical { .. }))
    {
        return Err(Error::invalid(
            "SMOTE needs numeric features; one-hot encode first",
        ));
    }
    let idx = class_indices(data)?;
    let (minor, major) = if idx[1].len() < idx[0].len() {
        (1, 0)
    } else {
        (0, 1)
    };
    let need = idx[major].len() - idx[minor].len();
    let minority = data.features().select_rows(&idx[minor])?;
    let Some(synthetic) = smote(&minority, k, need, rng)? else {
        return Ok(data.clone());
    };
    let features = data.features().vstack(&synthetic)?;
    let mut target = data.target().to_vec();
    target.extend(core::iter::repeat_n(minor as f64, need));
    Dataset::new(
        features,
        data.schema().to_vec(),
        target,
        data.target_name().map(Into::into),
    )
}

/// Random over-sampling (with replacement) of the class below its target
/// share combined with under-sampling (without replacement) of the class
/// above it, keeping the row count and reaching a positive fraction within
/// one sample of `target_pos_fraction`.
///
/// Rows are returned grouped by class (negatives first) in draw order.
pub fn random_over_under(
    data: &Dataset,
    target_pos_fraction: f64,
    rng: &mut RngStream,
) -> Result<Dataset> {
    if !(target_pos_fraction > 0.0 && target_pos_fraction < 1.0) {
        return Err(Error::invalid("target positive fraction must be in (0, 1)"));
    }
    let idx = class_indices(data)?;
    let total = data.n_samples();
    let n_pos = libm::round(target_pos_fraction * total as f64) as usize;
    let n_pos = n_pos.clamp(1, total - 1);
    let wanted = [total - n_pos, n_pos];
    let mut rows = Vec::with_capacity(total);
    for c in 0..2 {
        rows.extend(resample_class(&idx[c], wanted[c], rng));
    }
    data.select_rows(&rows)
}

fn resample_class(members: &[usize], wanted: usize, rng: &mut RngStream) -> Vec<usize> {
    if wanted == members.len() {
        members.to_vec()
    } else if wanted < members.len() {
        let mut pool = members.to_vec();
        rng.shuffle(&mut pool);
        pool.truncate(wanted);
        pool
    } else {
        let mut out = members.to_vec();
        out.extend((0..wanted - members.len()).map(|_| members[rng.below(members.len())]));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn collinear_pair() {
        let x = Matrix::from_rows(&[[0.0, 0.0], [1.0, 1.0]]).unwrap();
        let s = smote(&x, 1, 200, &mut RngStream::new(1)).unwrap().unwrap();
        for r in s.iter_rows() {
            assert_eq!(r[0], r[1]);
            assert!((0.0..=1.0).contains(&r[0]));
        }
    }

    #[test]
    fn errors_and_empty() {
        let x = Matrix::from_rows(&[[0.0], [1.0]]).unwrap();
        assert!(smote(&x, 2, 3, &mut RngStream::new(1)).is_err());
        assert!(smote(&x, 0, 3, &mut RngStream::new(1)).is_err());
        assert!(smote(&x, 1, 0, &mut RngStream::new(1)).unwrap().is_none());
    }

    #[test]
    fn seeded_smote_is_deterministic() {
        let x = Matrix::from_fn(10, 3, |i, j| (i * 3 + j) as f64 * 0.37 % 1.3);
        let a = smote(&x, 5, 50, &mut RngStream::new(42)).unwrap();
        let b = smote(&x, 5, 50, &mut RngStream::new(42)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn nearest_neighbour_ties_prefer_low_index() {
        let x = Matrix::from_rows(&[[0.0], [1.0], [-1.0], [5.0]]).unwrap();
        assert_eq!(&nearest_neighbours(&x, 2)[..2], &[1, 2]);
    }

    fn imbalanced(neg: usize, pos: usize) -> Dataset {
        let n = neg + pos;
        let x = Matrix::from_fn(n, 1, |i, _| i as f64);
        let y = (0..n).map(|i| if i < neg { 0.0 } else { 1.0 }).collect();
        Dataset::from_numeric(x, y).unwrap()
    }

    #[test]
    fn over_under_hits_ratio() {
        let d = imbalanced(100, 10);
        let out = random_over_under(&d, 0.4545, &mut RngStream::new(3)).unwrap();
        let pos = out.target().iter().filter(|&&v| v == 1.0).count() as f64;
        let frac = pos / out.n_samples() as f64;
        assert!((frac - 0.4545).abs() * out.n_samples() as f64 <= 1.0);
    }

    #[test]
    fn balanced_stays_balanced() {
        let d = imbalanced(20, 20);
        let out = random_over_under(&d, 0.5, &mut RngStream::new(3)).unwrap();
        let mut rows: Vec<f64> = out.features().column(0);
        rows.sort_by(f64::total_cmp);
        assert_eq!(rows, d.features().column(0));
    }

    #[test]
    fn missing_class_is_error() {
        let d = Dataset::from_numeric(Matrix::zeros(3, 1), vec![0.0; 3]).unwrap();
        assert_eq!(
            random_over_under(&d, 0.5, &mut RngStream::new(0)).unwrap_err(),
            Error::MissingClass(1)
        );
    }

    #[test]
    fn smote_balance_equalizes() {
        let d = imbalanced(30, 8);
        let out = smote_balance(&d, 5, &mut RngStream::new(5)).unwrap();
        let pos = out.target().iter().filter(|&&v| v == 1.0).count();
        assert_eq!(pos, 30);
        assert_eq!(out.n_samples(), 60);
    }
}
