use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::numeric::{mean, sample_variance, sqrt};

/// Per-column mean and sample standard deviation fitted on training rows.
///
/// Columns passed through (constant columns with the pass-through flag) are
/// stored with mean 0 and std 1 so that applying the stats leaves them as is.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StandardizeStats {
    pub columns: Vec<usize>,
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

impl StandardizeStats {
    pub fn apply(&self, data: &Matrix) -> Result<Matrix> {
        let mut out = data.clone();
        for ((&j, &m), &s) in self.columns.iter().zip(&self.means).zip(&self.stds) {
            if j >= data.cols() {
                return Err(Error::invalid(format!("column {j} out of range")));
            }
            for i in 0..data.rows() {
                out.set(i, j, (data.get(i, j) - m) / s)?;
            }
        }
        Ok(out)
    }

    pub fn inverse(&self, data: &Matrix) -> Result<Matrix> {
        let mut out = data.clone();
        for ((&j, &m), &s) in self.columns.iter().zip(&self.means).zip(&self.stds) {
            for i in 0..data.rows() {
                out.set(i, j, data.get(i, j) * s + m)?;
            }
        }
        Ok(out)
    }
}

/// Z-scores the selected columns (divisor `n - 1`).
///
/// A zero-variance column is an error unless `passthrough_constant` is set,
/// in which case it is left unchanged.
pub fn standardize(
    data: &Matrix,
    columns: &[usize],
    passthrough_constant: bool,
) -> Result<(Matrix, StandardizeStats)> {
    let stats = fit(data, columns, passthrough_constant, |j| {
        format!("column {j}")
    })?;
    Ok((stats.apply(data)?, stats))
}

/// Dataset-level standardization; `columns = None` selects every numeric column.
pub fn standardize_dataset(
    data: &Dataset,
    columns: Option<&[String]>,
    passthrough_constant: bool,
) -> Result<(Dataset, StandardizeStats)> {
    let idx = select_columns(data, columns)?;
    let stats = fit(data.features(), &idx, passthrough_constant, |j| {
        data.schema()[j].name.clone()
    })?;
    let out = data.with_features(stats.apply(data.features())?)?;
    Ok((out, stats))
}

pub(crate) fn select_columns(data: &Dataset, columns: Option<&[String]>) -> Result<Vec<usize>> {
    match columns {
        None => Ok(data
            .schema()
            .iter()
            .enumerate()
            .filter(|(_, c)| c.is_numeric())
            .map(|(j, _)| j)
            .collect()),
        Some(names) => names
            .iter()
            .map(|n| {
                let j = data.column_index(n)?;
                if data.schema()[j].is_numeric() {
                    Ok(j)
                } else {
                    Err(Error::invalid(format!("column `{n}` is not numeric")))
                }
            })
            .collect(),
    }
}

fn fit(
    data: &Matrix,
    columns: &[usize],
    passthrough_constant: bool,
    name: impl Fn(usize) -> String,
) -> Result<StandardizeStats> {
    if data.rows() < 2 {
        return Err(Error::invalid("standardize needs at least 2 rows"));
    }
    let mut stats = StandardizeStats {
        columns: columns.to_vec(),
        means: Vec::with_capacity(columns.len()),
        stds: Vec::with_capacity(columns.len()),
    };
    for &j in columns {
        if j >= data.cols() {
            return Err(Error::invalid(format!("column {j} out of range")));
        }
        let col = data.column(j);
        let m = mean(&col);
        let s = sqrt(sample_variance(&col));
        if s > 0.0 && s.is_finite() {
            stats.means.push(m);
            stats.stds.push(s);
        } else if passthrough_constant {
            stats.means.push(0.0);
            stats.stds.push(1.0);
        } else {
            return Err(Error::ZeroVariance(name(j)));
        }
    }
    Ok(stats)
}

/// Per-column affine map onto `[0, 1]`, fitted on training rows.
///
/// Values outside the fitted range are clamped. Constant columns map to 0.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MinMaxScaler {
    pub mins: Vec<f64>,
    pub maxs: Vec<f64>,
}

impl MinMaxScaler {
    pub fn fit(data: &Matrix) -> Self {
        let mut mins = data.row(0).to_vec();
        let mut maxs = mins.clone();
        for r in data.iter_rows() {
            for (j, &v) in r.iter().enumerate() {
                mins[j] = mins[j].min(v);
                maxs[j] = maxs[j].max(v);
            }
        }
        MinMaxScaler { mins, maxs }
    }

    pub fn apply(&self, data: &Matrix) -> Result<Matrix> {
        if data.cols() != self.mins.len() {
            return Err(Error::LengthMismatch {
                op: "MinMaxScaler::apply",
                expected: self.mins.len(),
                actual: data.cols(),
            });
        }
        Ok(Matrix::from_fn(data.rows(), data.cols(), |i, j| {
            let range = self.maxs[j] - self.mins[j];
            if range > 0.0 {
                ((data.get(i, j) - self.mins[j]) / range).clamp(0.0, 1.0)
            } else {
                0.0
            }
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn col(values: &[f64]) -> Matrix {
        Matrix::new(values.len(), 1, values.to_vec()).unwrap()
    }

    #[test]
    fn one_two_three() {
        let (out, stats) = standardize(&col(&[1.0, 2.0, 3.0]), &[0], false).unwrap();
        assert_eq!(out.as_slice(), &[-1.0, 0.0, 1.0]);
        assert_eq!(stats.means, vec![2.0]);
        assert_eq!(stats.stds, vec![1.0]);
    }

    #[test]
    fn idempotent() {
        let (once, _) = standardize(&col(&[3.0, 7.5, -1.0, 4.25]), &[0], false).unwrap();
        let (twice, _) = standardize(&once, &[0], false).unwrap();
        for (a, b) in once.as_slice().iter().zip(twice.as_slice()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn constant_column() {
        let m = col(&[5.0, 5.0, 5.0]);
        assert_eq!(
            standardize(&m, &[0], false).unwrap_err(),
            Error::ZeroVariance("column 0".into())
        );
        let (out, _) = standardize(&m, &[0], true).unwrap();
        assert_eq!(out, m);
    }

    #[test]
    fn inverse_recovers_input() {
        let m = Matrix::from_rows(&[[1.0, 10.0], [2.5, -3.0], [4.0, 8.0]]).unwrap();
        let (z, stats) = standardize(&m, &[0, 1], false).unwrap();
        let back = stats.inverse(&z).unwrap();
        for (a, b) in back.as_slice().iter().zip(m.as_slice()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn min_max_clamps() {
        let train = col(&[0.0, 2.0, 4.0]);
        let s = MinMaxScaler::fit(&train);
        let out = s.apply(&col(&[1.0, 8.0, -3.0])).unwrap();
        assert_eq!(out.as_slice(), &[0.25, 1.0, 0.0]);
    }
}
