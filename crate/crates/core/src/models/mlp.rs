//! One-hidden-layer perceptron with sigmoid hidden units.
//!
//! Classification uses a sigmoid output and mean log-loss; regression uses a
//! linear output and half the mean squared error. Training is mini-batch
//! gradient descent with a per-epoch shuffle drawn from the seed.

use alloc::vec;
use alloc::vec::Vec;

use crate::dataset::TaskKind;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::numeric::{sigmoid, softplus, sqrt};
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MlpConfig {
    /// `None` means `max(4, n_features / 2)`.
    pub hidden: Option<usize>,
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
}

impl Default for MlpConfig {
    fn default() -> Self {
        MlpConfig {
            hidden: None,
            learning_rate: 0.01,
            epochs: 500,
            batch_size: 32,
        }
    }
}

impl MlpConfig {
    pub fn hidden_for(&self, n_features: usize) -> usize {
        self.hidden.unwrap_or((n_features / 2).max(4))
    }
}

/// Parameters in one flat vector:
/// `[W1 (d x h, row-major), b1 (h), w2 (h), b2]`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MlpModel {
    pub n_inputs: usize,
    pub n_hidden: usize,
    pub task: TaskKind,
    pub params: Vec<f64>,
}

impl MlpModel {
    /// Glorot-uniform weights, zero biases.
    pub fn init(n_inputs: usize, n_hidden: usize, task: TaskKind, rng: &mut RngStream) -> Self {
        let (d, h) = (n_inputs, n_hidden);
        let mut params = vec![0.0; d * h + 2 * h + 1];
        let a1 = sqrt(6.0 / (d + h) as f64);
        for v in &mut params[..d * h] {
            *v = rng.uniform_range(-a1, a1);
        }
        let a2 = sqrt(6.0 / (h + 1) as f64);
        for v in &mut params[d * h + h..d * h + 2 * h] {
            *v = rng.uniform_range(-a2, a2);
        }
        MlpModel {
            n_inputs,
            n_hidden,
            task,
            params,
        }
    }

    fn offsets(&self) -> (usize, usize, usize) {
        let dh = self.n_inputs * self.n_hidden;
        (dh, dh + self.n_hidden, dh + 2 * self.n_hidden)
    }

    fn hidden(&self, x: &[f64], out: &mut [f64]) {
        let h = self.n_hidden;
        let (b1, _, _) = self.offsets();
        out.copy_from_slice(&self.params[b1..b1 + h]);
        for (i, &xi) in x.iter().enumerate() {
            for (o, w) in out.iter_mut().zip(&self.params[i * h..(i + 1) * h]) {
                *o += xi * w;
            }
        }
        for o in out.iter_mut() {
            *o = sigmoid(*o);
        }
    }

    fn output_logit(&self, hidden: &[f64]) -> f64 {
        let (_, w2, b2) = self.offsets();
        self.params[b2]
            + hidden
                .iter()
                .zip(&self.params[w2..b2])
                .map(|(a, b)| a * b)
                .sum::<f64>()
    }

    pub fn predict_row(&self, x: &[f64]) -> f64 {
        let mut hbuf = vec![0.0; self.n_hidden];
        self.hidden(x, &mut hbuf);
        let z = self.output_logit(&hbuf);
        match self.task {
            TaskKind::Classification => sigmoid(z),
            TaskKind::Regression => z,
        }
    }

    /// Mean loss over `rows` and its gradient with respect to `params`.
    pub fn loss_and_gradient(&self, x: &Matrix, y: &[f64], rows: &[usize]) -> (f64, Vec<f64>) {
        let (d, h) = (self.n_inputs, self.n_hidden);
        let (b1, w2, b2) = self.offsets();
        let mut grad = vec![0.0; self.params.len()];
        let mut hbuf = vec![0.0; h];
        let mut loss = 0.0;
        for &i in rows {
            let xi = x.row(i);
            self.hidden(xi, &mut hbuf);
            let z = self.output_logit(&hbuf);
            let (l, dz) = match self.task {
                TaskKind::Classification => (softplus(z) - y[i] * z, sigmoid(z) - y[i]),
                TaskKind::Regression => (0.5 * (z - y[i]) * (z - y[i]), z - y[i]),
            };
            loss += l;
            grad[b2] += dz;
            for j in 0..h {
                grad[w2 + j] += dz * hbuf[j];
                let dh = dz * self.params[w2 + j] * hbuf[j] * (1.0 - hbuf[j]);
                grad[b1 + j] += dh;
                for k in 0..d {
                    grad[k * h + j] += dh * xi[k];
                }
            }
        }
        let n = rows.len() as f64;
        grad.iter_mut().for_each(|g| *g /= n);
        (loss / n, grad)
    }
}

pub fn fit_mlp(
    x: &Matrix,
    y: &[f64],
    task: TaskKind,
    config: &MlpConfig,
    seed: u64,
) -> Result<MlpModel> {
    if y.len() != x.rows() {
        return Err(Error::LengthMismatch {
            op: "fit_mlp",
            expected: x.rows(),
            actual: y.len(),
        });
    }
    if config.epochs == 0 || config.batch_size == 0 || !(config.learning_rate >= 0.0) {
        return Err(Error::invalid(
            "MLP needs epochs >= 1, batch_size >= 1, lr >= 0",
        ));
    }
    let rng = RngStream::new(seed);
    let mut model = MlpModel::init(
        x.cols(),
        config.hidden_for(x.cols()),
        task,
        &mut rng.child(0),
    );
    let mut order_rng = rng.child(1);
    let mut order: Vec<usize> = (0..x.rows()).collect();
    for _ in 0..config.epochs {
        order_rng.shuffle(&mut order);
        for batch in order.chunks(config.batch_size) {
            let (_, g) = model.loss_and_gradient(x, y, batch);
            for (p, gi) in model.params.iter_mut().zip(&g) {
                *p -= config.learning_rate * gi;
            }
        }
    }
    if model.params.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("mlp training"));
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_lr_keeps_init() {
        let x = Matrix::from_fn(10, 3, |i, j| (i + j) as f64 * 0.1);
        let y: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let cfg = MlpConfig {
            learning_rate: 0.0,
            epochs: 3,
            ..Default::default()
        };
        let m = fit_mlp(&x, &y, TaskKind::Regression, &cfg, 4).unwrap();
        let init = MlpModel::init(3, 4, TaskKind::Regression, &mut RngStream::new(4).child(0));
        assert_eq!(m, init);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = RngStream::new(21);
        let x = Matrix::from_fn(6, 3, |_, _| rng.normal());
        for task in [TaskKind::Regression, TaskKind::Classification] {
            let y: Vec<f64> = (0..6).map(|i| (i % 2) as f64).collect();
            let mut m = MlpModel::init(3, 2, task, &mut rng);
            for p in &mut m.params {
                *p = rng.normal();
            }
            let rows: Vec<usize> = (0..6).collect();
            let (_, g) = m.loss_and_gradient(&x, &y, &rows);
            for k in 0..m.params.len() {
                let h = 1e-6;
                let mut up = m.clone();
                up.params[k] += h;
                let mut dn = m.clone();
                dn.params[k] -= h;
                let fd = (up.loss_and_gradient(&x, &y, &rows).0
                    - dn.loss_and_gradient(&x, &y, &rows).0)
                    / (2.0 * h);
                let rel = (fd - g[k]).abs() / g[k].abs().max(1e-3);
                assert!(rel < 1e-5, "param {k}: fd {fd} analytic {}", g[k]);
            }
        }
    }

    #[test]
    fn fits_parabola() {
        let x = Matrix::from_fn(50, 1, |i, _| i as f64 / 49.0 * 2.0 - 1.0);
        let y: Vec<f64> = x.column(0).iter().map(|v| v * v).collect();
        let cfg = MlpConfig {
            hidden: Some(8),
            learning_rate: 0.5,
            epochs: 5000,
            batch_size: 10,
        };
        let m = fit_mlp(&x, &y, TaskKind::Regression, &cfg, 1).unwrap();
        let mse: f64 = x
            .iter_rows()
            .zip(&y)
            .map(|(r, yi)| {
                let e = m.predict_row(r) - yi;
                e * e
            })
            .sum::<f64>()
            / 50.0;
        assert!(sqrt(mse) < 0.05, "rmse {}", sqrt(mse));
    }
}
