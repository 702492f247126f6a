//! L2-regularized logistic regression fitted by damped Newton.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{with_intercept, Cholesky};
use crate::matrix::Matrix;
use crate::numeric::{sigmoid, softplus};

/// Outcome of [`newton`].
#[derive(Debug, Clone)]
pub(crate) struct NewtonFit {
    /// Intercept first.
    pub beta: Vec<f64>,
    /// Hessian of the objective at `beta`.
    pub hessian: Matrix,
    pub iterations: usize,
    pub converged: bool,
    pub gradient_norm: f64,
}

/// Minimizes `scale * sum_i logloss_i + 0.5 * sum_j penalty_j beta_j^2`
/// over a design that already carries its intercept column.
///
/// Converged when `norm(gradient) < tol`. Steps are halved until the
/// objective stops increasing. Reports perfect separation when every
/// sample is fitted to within 1e-10 of its label.
#[allow(clippy::too_many_arguments)]
pub(crate) fn newton(
    x: &Matrix,
    y: &[f64],
    scale: f64,
    penalty: &[f64],
    tol: f64,
    max_iter: usize,
    norm: fn(&[f64]) -> f64,
    detect_separation: bool,
) -> Result<NewtonFit> {
    let p = x.cols();
    let mut beta = vec![0.0; p];
    let mut obj = objective(x, y, &beta, scale, penalty);
    let mut iterations = 0;
    loop {
        let (grad, hess, min_fit) = derivatives(x, y, &beta, scale, penalty);
        let g = norm(&grad);
        if !g.is_finite() {
            return Err(Error::NonFinite("logistic gradient"));
        }
        if g < tol || iterations >= max_iter {
            return Ok(NewtonFit {
                beta,
                hessian: hess,
                iterations,
                converged: g < tol,
                gradient_norm: g,
            });
        }
        if detect_separation && min_fit > 1.0 - 1e-10 {
            return Err(Error::PerfectSeparation);
        }
        let (chol, _) = Cholesky::with_jitter(&hess, 1e-12, 1e-2)?;
        let mut step = chol.solve(&grad);
        // Near-collinear designs leave the first solve inaccurate.
        for _ in 0..2 {
            let r: Vec<f64> = (0..p)
                .map(|i| grad[i] - (0..p).map(|j| hess.get(i, j) * step[j]).sum::<f64>())
                .collect();
            let d = chol.solve(&r);
            step.iter_mut().zip(&d).for_each(|(s, di)| *s += di);
        }
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let cand: Vec<f64> = beta.iter().zip(&step).map(|(b, s)| b - t * s).collect();
            let c = objective(x, y, &cand, scale, penalty);
            // Near the optimum the decrease is below the objective's rounding.
            if c <= obj + 1e-12 * obj.abs().max(1.0) {
                beta = cand;
                obj = c;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        iterations += 1;
        if !accepted {
            // No representable descent: the gradient is at its numerical floor.
            return Ok(NewtonFit {
                beta,
                hessian: hess,
                iterations,
                converged: g < tol,
                gradient_norm: g,
            });
        }
    }
}

fn objective(x: &Matrix, y: &[f64], beta: &[f64], scale: f64, penalty: &[f64]) -> f64 {
    let mut loss = 0.0;
    for (r, &yi) in x.iter_rows().zip(y) {
        let z: f64 = r.iter().zip(beta).map(|(a, b)| a * b).sum();
        // -[y log s(z) + (1-y) log(1-s(z))] = softplus(z) - y z
        loss += softplus(z) - yi * z;
    }
    let reg: f64 = beta.iter().zip(penalty).map(|(b, l)| l * b * b).sum();
    scale * loss + 0.5 * reg
}

/// Gradient, Hessian and the smallest fitted probability of the true class.
fn derivatives(
    x: &Matrix,
    y: &[f64],
    beta: &[f64],
    scale: f64,
    penalty: &[f64],
) -> (Vec<f64>, Matrix, f64) {
    let p = x.cols();
    let mut g = vec![0.0; p];
    let mut h = vec![0.0; p * p];
    let mut min_fit = f64::INFINITY;
    for (r, &yi) in x.iter_rows().zip(y) {
        let z: f64 = r.iter().zip(beta).map(|(a, b)| a * b).sum();
        let s = sigmoid(z);
        min_fit = min_fit.min(if yi == 1.0 { s } else { 1.0 - s });
        let resid = s - yi;
        let w = s * (1.0 - s);
        for i in 0..p {
            g[i] += resid * r[i];
            let wi = w * r[i];
            for j in i..p {
                h[i * p + j] += wi * r[j];
            }
        }
    }
    for i in 0..p {
        g[i] = scale * g[i] + penalty[i] * beta[i];
        for j in i..p {
            let v = scale * h[i * p + j] + if i == j { penalty[i] } else { 0.0 };
            h[i * p + j] = v;
            h[j * p + i] = v;
        }
    }
    (g, Matrix::from_raw(p, p, h), min_fit)
}

pub(crate) fn euclid(v: &[f64]) -> f64 {
    crate::numeric::norm2(v)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LogisticModel {
    pub intercept: f64,
    pub coefficients: Vec<f64>,
}

impl LogisticModel {
    pub fn predict_row(&self, x: &[f64]) -> f64 {
        sigmoid(
            self.intercept
                + x.iter()
                    .zip(&self.coefficients)
                    .map(|(a, b)| a * b)
                    .sum::<f64>(),
        )
    }

    /// Mean log-loss plus `l2 / 2 * |coefficients|^2` and its gradient
    /// (intercept first).
    pub fn loss_and_gradient(&self, x: &Matrix, y: &[f64], l2: f64) -> (f64, Vec<f64>) {
        let xi = with_intercept(x);
        let beta = self.beta();
        let n = x.rows() as f64;
        let pen = penalty(x.cols(), l2 * n);
        let (g, _, _) = derivatives(&xi, y, &beta, 1.0, &pen);
        let f = objective(&xi, y, &beta, 1.0, &pen);
        (f / n, g.iter().map(|v| v / n).collect())
    }

    fn beta(&self) -> Vec<f64> {
        let mut b = vec![self.intercept];
        b.extend_from_slice(&self.coefficients);
        b
    }
}

fn penalty(n_features: usize, l2: f64) -> Vec<f64> {
    let mut p = vec![l2; n_features + 1];
    p[0] = 0.0;
    p
}

/// Fits by minimizing mean log-loss + `l2 / 2 * |beta|^2` (intercept
/// unpenalized) to gradient norm below 1e-6. Returns the model, the Newton
/// iteration count and whether it converged.
pub fn fit_logistic(x: &Matrix, y: &[f64], l2: f64) -> Result<(LogisticModel, usize, bool)> {
    check_binary(y, x.rows())?;
    if !(l2 >= 0.0 && l2.is_finite()) {
        return Err(Error::invalid("l2 must be finite and >= 0"));
    }
    let n = x.rows() as f64;
    let xi = with_intercept(x);
    let fit = newton(
        &xi,
        y,
        1.0 / n,
        &penalty(x.cols(), l2),
        1e-6,
        100,
        euclid,
        false,
    )?;
    let model = LogisticModel {
        intercept: fit.beta[0],
        coefficients: fit.beta[1..].to_vec(),
    };
    Ok((model, fit.iterations, fit.converged))
}

pub(crate) fn check_binary(y: &[f64], n: usize) -> Result<()> {
    if y.len() != n {
        return Err(Error::LengthMismatch {
            op: "labels",
            expected: n,
            actual: y.len(),
        });
    }
    let labels = crate::dataset::binary_labels(y)?;
    for c in 0..2u8 {
        if !labels.contains(&c) {
            return Err(Error::MissingClass(c));
        }
    }
    Ok(())
}
