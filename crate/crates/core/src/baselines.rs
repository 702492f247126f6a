//! Wald chi-square feature ranking.
//!
//! Each feature's statistic is `(beta_j / se_j)^2` from a model fitted on all
//! features at once: a logistic model for binary targets, ordinary least
//! squares for real targets. The intercept is fitted but never ranked.
//!
//! Logistic fitting uses damped Newton with a 1e-8 ridge on the slopes,
//! stops once `max |gradient| < 1e-8` and gives up after 200 iterations.
//! Standard errors come from the inverse of the (ridge-stabilized) observed
//! information.
//!
//! A rank-deficient OLS design (for example a full one-hot block next to the
//! intercept) is refitted with the same slope ridge and flagged as
//! stabilized. Aliased columns then carry near-zero statistics.

use alloc::vec::Vec;

use crate::attribution::rank_descending;
use crate::error::{Error, Result};
use crate::linalg::{gram, with_intercept, xt_y, Cholesky};
use crate::matrix::Matrix;
use crate::models::{check_binary, newton};

pub const LOGISTIC_RIDGE: f64 = 1e-8;
pub const LOGISTIC_TOL: f64 = 1e-8;
pub const LOGISTIC_MAX_ITER: usize = 200;
/// Pivot ratio below which an OLS Gram matrix counts as rank-deficient.
pub const OLS_RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WaldRanking {
    pub statistics: Vec<f64>,
    /// Feature indices by descending statistic, ties by ascending index.
    pub ranking: Vec<usize>,
    /// The fit needed a ridge because the design was rank-deficient.
    #[cfg_attr(feature = "serde", serde(default))]
    pub stabilized: bool,
}

impl WaldRanking {
    fn from_statistics(statistics: Vec<f64>, stabilized: bool) -> Result<Self> {
        if statistics.iter().any(|s| !s.is_finite() || *s < 0.0) {
            return Err(Error::NonFinite("Wald statistic"));
        }
        let ranking = rank_descending(&statistics);
        Ok(WaldRanking {
            statistics,
            ranking,
            stabilized,
        })
    }

    /// The statistics as percentages of their total, for reporting beside
    /// EGA scores. All zero when every statistic is zero.
    pub fn percentages(&self) -> Vec<f64> {
        let total: f64 = crate::numeric::stable_sum(&self.statistics);
        self.statistics
            .iter()
            .map(|s| if total > 0.0 { 100.0 * s / total } else { 0.0 })
            .collect()
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn wald_rank_classification(x: &Matrix, y: &[f64]) -> Result<WaldRanking> {
    check_binary(y, x.rows())?;
    let xi = with_intercept(x);
    let mut penalty = alloc::vec![LOGISTIC_RIDGE; xi.cols()];
    penalty[0] = 0.0;
    let fit = newton(
        &xi,
        y,
        1.0,
        &penalty,
        LOGISTIC_TOL,
        LOGISTIC_MAX_ITER,
        max_abs,
        true,
    )?;
    // The ridge keeps separated data finite; a fit that classifies every
    // sample strictly correctly is only possible under separation.
    let separated = xi.iter_rows().zip(y).all(|(r, yi)| {
        let z: f64 = r.iter().zip(&fit.beta).map(|(a, b)| a * b).sum();
        z * (2.0 * yi - 1.0) > 0.0
    });
    if separated {
        return Err(Error::PerfectSeparation);
    }
    if !fit.converged {
        return Err(Error::NoConvergence {
            iterations: fit.iterations,
            gradient_norm: fit.gradient_norm,
        });
    }
    let cov = Cholesky::new(&fit.hessian)?.inverse();
    let stats = (1..xi.cols())
        .map(|j| fit.beta[j] * fit.beta[j] / cov.get(j, j))
        .collect();
    WaldRanking::from_statistics(stats, false)
}

pub fn wald_rank_regression(x: &Matrix, y: &[f64]) -> Result<WaldRanking> {
    if y.len() != x.rows() {
        return Err(Error::LengthMismatch {
            op: "wald_rank_regression",
            expected: x.rows(),
            actual: y.len(),
        });
    }
    let xi = with_intercept(x);
    let (n, p) = (xi.rows(), xi.cols());
    if n <= p {
        return Err(Error::invalid(alloc::format!(
            "OLS needs more samples ({n}) than parameters ({p})"
        )));
    }
    let g = gram(&xi);
    let (chol, stabilized) = match Cholesky::new(&g) {
        Ok(c) if c.min_relative_pivot(&g) >= OLS_RANK_TOL => (c, false),
        _ => {
            let mut r = g.clone();
            for j in 1..p {
                r.set(j, j, r.get(j, j) + LOGISTIC_RIDGE)?;
            }
            (Cholesky::new(&r)?, true)
        }
    };
    let beta = chol.solve(&xt_y(&xi, y));
    let rss: f64 = xi
        .iter_rows()
        .zip(y)
        .map(|(r, yi)| {
            let e = yi - r.iter().zip(&beta).map(|(a, b)| a * b).sum::<f64>();
            e * e
        })
        .sum();
    let scale: f64 = y.iter().map(|v| v * v).sum::<f64>().max(1.0);
    if rss <= 1e-24 * scale {
        return Err(Error::ZeroResidualVariance);
    }
    let s2 = rss / (n - p) as f64;
    let cov = chol.inverse();
    let stats = (1..p)
        .map(|j| beta[j] * beta[j] / (s2 * cov.get(j, j)))
        .collect();
    WaldRanking::from_statistics(stats, stabilized)
}
