//! Linear epsilon-insensitive support vector regression.
//!
//! Minimizes `J(w, b) = |w|^2 / (2 c n) + mean_i max(0, |y_i - w.x_i - b| - eps)`,
//! which is the usual `|w|^2 / 2 + c sum(loss)` divided by `c n`, with
//! full-batch subgradient steps of size `eta0 / sqrt(t + 1)`. The iterate with
//! the lowest objective is returned. No randomness is involved.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::numeric::{abs, mean, sqrt};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SvrConfig {
    pub c: f64,
    pub epsilon: f64,
    pub epochs: usize,
    pub eta0: f64,
}

impl Default for SvrConfig {
    fn default() -> Self {
        SvrConfig {
            c: 1.0,
            epsilon: 0.1,
            epochs: 2000,
            eta0: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SvrModel {
    pub intercept: f64,
    pub coefficients: Vec<f64>,
}

impl SvrModel {
    pub fn predict_row(&self, x: &[f64]) -> f64 {
        self.intercept
            + x.iter()
                .zip(&self.coefficients)
                .map(|(a, b)| a * b)
                .sum::<f64>()
    }
}

pub fn svr_objective(x: &Matrix, y: &[f64], w: &[f64], b: f64, config: &SvrConfig) -> f64 {
    let n = x.rows() as f64;
    let reg = w.iter().map(|v| v * v).sum::<f64>() / (2.0 * config.c * n);
    let loss = x
        .iter_rows()
        .zip(y)
        .map(|(r, yi)| {
            let f = b + r.iter().zip(w).map(|(a, c)| a * c).sum::<f64>();
            (abs(yi - f) - config.epsilon).max(0.0)
        })
        .sum::<f64>()
        / n;
    reg + loss
}

/// Returns the model and the epoch of the best iterate.
pub fn fit_svr(x: &Matrix, y: &[f64], config: &SvrConfig) -> Result<(SvrModel, usize)> {
    if y.len() != x.rows() {
        return Err(Error::LengthMismatch {
            op: "fit_svr",
            expected: x.rows(),
            actual: y.len(),
        });
    }
    if !(config.c > 0.0) || !(config.epsilon >= 0.0) || !(config.eta0 > 0.0) {
        return Err(Error::invalid("SVR needs c > 0, epsilon >= 0, eta0 > 0"));
    }
    let (n, p) = (x.rows(), x.cols());
    let nf = n as f64;
    let mut w = vec![0.0; p];
    let mut b = mean(y);
    let mut best = (svr_objective(x, y, &w, b, config), w.clone(), b, 0);
    let mut gw = vec![0.0; p];
    for t in 0..config.epochs {
        gw.iter_mut()
            .zip(&w)
            .for_each(|(g, wi)| *g = wi / (config.c * nf));
        let mut gb = 0.0;
        for (r, yi) in x.iter_rows().zip(y) {
            let e = yi - b - r.iter().zip(&w).map(|(a, c)| a * c).sum::<f64>();
            if abs(e) > config.epsilon {
                let s = if e > 0.0 { -1.0 / nf } else { 1.0 / nf };
                for (g, a) in gw.iter_mut().zip(r) {
                    *g += s * a;
                }
                gb += s;
            }
        }
        let eta = config.eta0 / sqrt((t + 1) as f64);
        for (wi, g) in w.iter_mut().zip(&gw) {
            *wi -= eta * g;
        }
        b -= eta * gb;
        let obj = svr_objective(x, y, &w, b, config);
        if obj < best.0 {
            best = (obj, w.clone(), b, t + 1);
        }
    }
    let (_, coefficients, intercept, epoch) = best;
    if !intercept.is_finite() || coefficients.iter().any(|c| !c.is_finite()) {
        return Err(Error::NonFinite("svr fit"));
    }
    Ok((
        SvrModel {
            intercept,
            coefficients,
        },
        epoch,
    ))
}
