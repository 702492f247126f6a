//! Least squares, ridge and lasso.
//!
//! All three centre the data so the intercept is never penalized. Ridge
//! solves `(Xc'Xc + lambda I) b = Xc'yc`. Lasso runs cyclic coordinate
//! descent on population-standardized columns for
//! `(1 / 2n) |yc - Xs b|^2 + lambda |b|_1` and maps the coefficients back to
//! the original scale; constant columns get coefficient 0.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{gram, xt_y, Cholesky};
use crate::matrix::Matrix;
use crate::numeric::{abs, mean, sqrt};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "snake_case")
)]
pub enum LinearKind {
    Linear,
    Ridge,
    Lasso,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LinearModel {
    pub intercept: f64,
    pub coefficients: Vec<f64>,
}

impl LinearModel {
    pub fn predict_row(&self, x: &[f64]) -> f64 {
        self.intercept
            + x.iter()
                .zip(&self.coefficients)
                .map(|(a, b)| a * b)
                .sum::<f64>()
    }
}

/// Fit diagnostics: sweeps used (lasso only), convergence and the jitter
/// added to a singular system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFitInfo {
    pub iterations: usize,
    pub converged: bool,
    pub jitter: f64,
}

pub const LASSO_TOL: f64 = 1e-7;
pub const LASSO_MAX_SWEEPS: usize = 10_000;

pub fn fit_linear_family(
    x: &Matrix,
    y: &[f64],
    kind: LinearKind,
    lambda: f64,
) -> Result<(LinearModel, LinearFitInfo)> {
    if y.len() != x.rows() {
        return Err(Error::LengthMismatch {
            op: "fit_linear_family",
            expected: x.rows(),
            actual: y.len(),
        });
    }
    if x.rows() < 2 {
        return Err(Error::invalid("need at least 2 samples"));
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::invalid("lambda must be finite and >= 0"));
    }
    let (xc, means) = centre(x);
    let y_mean = mean(y);
    let yc: Vec<f64> = y.iter().map(|v| v - y_mean).collect();
    let (coef, info) = match kind {
        LinearKind::Linear => solve_normal(&xc, &yc, 0.0)?,
        LinearKind::Ridge => solve_normal(&xc, &yc, lambda)?,
        LinearKind::Lasso => lasso(&xc, &yc, lambda),
    };
    let intercept = y_mean - means.iter().zip(&coef).map(|(m, b)| m * b).sum::<f64>();
    if !intercept.is_finite() || coef.iter().any(|c| !c.is_finite()) {
        return Err(Error::NonFinite("linear fit"));
    }
    Ok((
        LinearModel {
            intercept,
            coefficients: coef,
        },
        info,
    ))
}

fn centre(x: &Matrix) -> (Matrix, Vec<f64>) {
    let means: Vec<f64> = (0..x.cols()).map(|j| mean(&x.column(j))).collect();
    let xc = Matrix::from_fn(x.rows(), x.cols(), |i, j| x.get(i, j) - means[j]);
    (xc, means)
}

fn solve_normal(xc: &Matrix, yc: &[f64], lambda: f64) -> Result<(Vec<f64>, LinearFitInfo)> {
    let mut g = gram(xc);
    for i in 0..g.cols() {
        let v = g.get(i, i) + lambda;
        g.set(i, i, v)?;
    }
    let (chol, jitter) = Cholesky::with_jitter(&g, 1e-12, 1e-2)?;
    Ok((
        chol.solve(&xt_y(xc, yc)),
        LinearFitInfo {
            iterations: 1,
            converged: true,
            jitter,
        },
    ))
}

/// Columns of `xc` scaled to unit population standard deviation, with the
/// scale used (0 for constant columns, which are zeroed).
pub(crate) fn standardize_centred(xc: &Matrix) -> (Matrix, Vec<f64>) {
    let n = xc.rows() as f64;
    let scales: Vec<f64> = (0..xc.cols())
        .map(|j| sqrt(xc.column(j).iter().map(|v| v * v).sum::<f64>() / n))
        .collect();
    let xs = Matrix::from_fn(xc.rows(), xc.cols(), |i, j| {
        if scales[j] > 0.0 {
            xc.get(i, j) / scales[j]
        } else {
            0.0
        }
    });
    (xs, scales)
}

/// `(1 / 2n) |y - X b|^2 + lambda |b|_1`.
pub fn lasso_objective(x: &Matrix, y: &[f64], b: &[f64], lambda: f64) -> f64 {
    let n = x.rows() as f64;
    let rss: f64 = x
        .iter_rows()
        .zip(y)
        .map(|(r, yi)| {
            let e = yi - r.iter().zip(b).map(|(a, c)| a * c).sum::<f64>();
            e * e
        })
        .sum();
    rss / (2.0 * n) + lambda * b.iter().map(|v| abs(*v)).sum::<f64>()
}

/// Smallest lambda for which the standardized lasso solution is all zero.
pub fn lasso_lambda_max(x: &Matrix, y: &[f64]) -> f64 {
    let (xc, _) = centre(x);
    let (xs, _) = standardize_centred(&xc);
    let ym = mean(y);
    let yc: Vec<f64> = y.iter().map(|v| v - ym).collect();
    let n = x.rows() as f64;
    xt_y(&xs, &yc)
        .iter()
        .map(|v| abs(*v) / n)
        .fold(0.0, f64::max)
}

/// Coordinate descent on the standardized design. Returns coefficients for
/// the centred (unscaled) design.
fn lasso(xc: &Matrix, yc: &[f64], lambda: f64) -> (Vec<f64>, LinearFitInfo) {
    let (xs, scales) = standardize_centred(xc);
    let (b, iterations, converged) = lasso_cd(&xs, yc, lambda);
    let coef = b
        .iter()
        .zip(&scales)
        .map(|(v, s)| if *s > 0.0 { v / s } else { 0.0 })
        .collect();
    (
        coef,
        LinearFitInfo {
            iterations,
            converged,
            jitter: 0.0,
        },
    )
}

/// Cyclic coordinate descent for `(1/2n)|y - X b|^2 + lambda |b|_1`, stopping
/// when no coefficient moves by more than `LASSO_TOL`.
pub(crate) fn lasso_cd(x: &Matrix, y: &[f64], lambda: f64) -> (Vec<f64>, usize, bool) {
    let (n, p) = (x.rows(), x.cols());
    let nf = n as f64;
    let cols: Vec<Vec<f64>> = (0..p).map(|j| x.column(j)).collect();
    let col_sq: Vec<f64> = cols
        .iter()
        .map(|c| c.iter().map(|v| v * v).sum::<f64>() / nf)
        .collect();
    let mut b = vec![0.0; p];
    let mut resid = y.to_vec();
    for sweep in 1..=LASSO_MAX_SWEEPS {
        let mut max_delta: f64 = 0.0;
        for j in 0..p {
            if col_sq[j] == 0.0 {
                continue;
            }
            let rho: f64 =
                cols[j].iter().zip(&resid).map(|(a, r)| a * r).sum::<f64>() / nf + col_sq[j] * b[j];
            let new = soft_threshold(rho, lambda) / col_sq[j];
            let d = new - b[j];
            if d != 0.0 {
                for (r, a) in resid.iter_mut().zip(&cols[j]) {
                    *r -= d * a;
                }
                b[j] = new;
            }
            max_delta = max_delta.max(abs(d));
        }
        if max_delta < LASSO_TOL {
            return (b, sweep, true);
        }
    }
    (b, LASSO_MAX_SWEEPS, false)
}

fn soft_threshold(z: f64, g: f64) -> f64 {
    if z > g {
        z - g
    } else if z < -g {
        z + g
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line() -> (Matrix, Vec<f64>) {
        let x = Matrix::from_fn(10, 1, |i, _| i as f64 * 0.3 - 1.0);
        let y = x.column(0).iter().map(|v| 2.0 * v).collect();
        (x, y)
    }

    #[test]
    fn exact_fit() {
        let (x, y) = line();
        let (m, _) = fit_linear_family(&x, &y, LinearKind::Linear, 0.0).unwrap();
        assert!((m.coefficients[0] - 2.0).abs() < 1e-9);
        assert!(m.intercept.abs() < 1e-9);
        for (r, yi) in x.iter_rows().zip(&y) {
            assert!((m.predict_row(r) - yi).abs() < 1e-9);
        }
    }

    #[test]
    fn ridge_zero_is_ols() {
        let x = Matrix::from_fn(30, 3, |i, j| ((i * (j + 3)) % 7) as f64 - (j as f64));
        let y: Vec<f64> = (0..30).map(|i| (i % 5) as f64 + 0.1 * i as f64).collect();
        let (a, _) = fit_linear_family(&x, &y, LinearKind::Linear, 0.0).unwrap();
        let (b, _) = fit_linear_family(&x, &y, LinearKind::Ridge, 0.0).unwrap();
        for (p, q) in a.coefficients.iter().zip(&b.coefficients) {
            assert!((p - q).abs() < 1e-8);
        }
    }

    #[test]
    fn lasso_above_lambda_max_is_zero() {
        let x = Matrix::from_fn(40, 3, |i, j| ((i * (j + 2)) % 9) as f64);
        let y: Vec<f64> = (0..40).map(|i| x.get(i, 0) - 0.5 * x.get(i, 2)).collect();
        let lmax = lasso_lambda_max(&x, &y);
        let (m, info) = fit_linear_family(&x, &y, LinearKind::Lasso, lmax * 1.0001).unwrap();
        assert!(info.converged);
        assert!(m.coefficients.iter().all(|c| *c == 0.0));
        let (m, _) = fit_linear_family(&x, &y, LinearKind::Lasso, lmax * 0.5).unwrap();
        assert!(m.coefficients.iter().any(|c| *c != 0.0));
    }

    #[test]
    fn collinear_design_gets_jitter() {
        let x = Matrix::from_fn(10, 2, |i, _| i as f64);
        let y: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let (m, info) = fit_linear_family(&x, &y, LinearKind::Linear, 0.0).unwrap();
        assert!(info.jitter > 0.0);
        assert!((m.coefficients[0] + m.coefficients[1] - 1.0).abs() < 1e-6);
    }
}
