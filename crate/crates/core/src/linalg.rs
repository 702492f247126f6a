//! Small dense symmetric-positive-definite solvers.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::numeric::sqrt;

/// Lower-triangular Cholesky factor of an SPD matrix.
#[derive(Debug, Clone)]
pub struct Cholesky {
    n: usize,
    l: Vec<f64>,
}

impl Cholesky {
    pub fn new(a: &Matrix) -> Result<Self> {
        if a.rows() != a.cols() {
            return Err(Error::ShapeMismatch {
                op: "cholesky",
                left: a.shape(),
                right: a.shape(),
            });
        }
        let n = a.rows();
        let mut l = vec![0.0; n * n];
        for j in 0..n {
            let mut d = a.get(j, j);
            for k in 0..j {
                d -= l[j * n + k] * l[j * n + k];
            }
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::Singular("cholesky"));
            }
            let d = sqrt(d);
            l[j * n + j] = d;
            for i in j + 1..n {
                let mut s = a.get(i, j);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = s / d;
            }
        }
        Ok(Cholesky { n, l })
    }

    /// Factorizes `a + jitter * I`, growing the jitter from `start` by 10x
    /// until the factorization succeeds or `max` is exceeded. Returns the
    /// jitter that was used (0 if none was needed).
    pub fn with_jitter(a: &Matrix, start: f64, max: f64) -> Result<(Self, f64)> {
        if let Ok(c) = Cholesky::new(a) {
            return Ok((c, 0.0));
        }
        let scale = (0..a.rows()).map(|i| a.get(i, i).abs()).fold(1.0, f64::max);
        let mut jitter = start * scale;
        while jitter <= max * scale {
            let mut b = a.clone();
            for i in 0..a.rows() {
                let v = b.get(i, i) + jitter;
                b.set(i, i, v)?;
            }
            if let Ok(c) = Cholesky::new(&b) {
                return Ok((c, jitter));
            }
            jitter *= 10.0;
        }
        Err(Error::Singular("cholesky"))
    }

    /// `min_j d_j / a_jj` over the pivots `d_j = l_jj^2`; near zero when
    /// `a` is numerically rank-deficient.
    pub fn min_relative_pivot(&self, a: &Matrix) -> f64 {
        (0..self.n)
            .map(|j| {
                let d = self.l[j * self.n + j];
                d * d / a.get(j, j)
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        assert_eq!(b.len(), n);
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= self.l[i * n + k] * y[k];
            }
            y[i] = s / self.l[i * n + i];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..n {
                s -= self.l[k * n + i] * y[k];
            }
            y[i] = s / self.l[i * n + i];
        }
        y
    }

    pub fn inverse(&self) -> Matrix {
        let n = self.n;
        let mut inv = Matrix::zeros(n, n);
        let mut e = vec![0.0; n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = 0.0);
            e[j] = 1.0;
            let col = self.solve(&e);
            for (i, v) in col.into_iter().enumerate() {
                inv.data_mut()[i * n + j] = v;
            }
        }
        inv
    }
}

/// `XᵀX` for a row-major design matrix.
pub fn gram(x: &Matrix) -> Matrix {
    let p = x.cols();
    let mut g = vec![0.0; p * p];
    for r in x.iter_rows() {
        for i in 0..p {
            let ri = r[i];
            if ri == 0.0 {
                continue;
            }
            for j in i..p {
                g[i * p + j] += ri * r[j];
            }
        }
    }
    for i in 0..p {
        for j in 0..i {
            g[i * p + j] = g[j * p + i];
        }
    }
    Matrix::from_raw(p, p, g)
}

/// `Xᵀy`.
pub fn xt_y(x: &Matrix, y: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; x.cols()];
    for (r, &yi) in x.iter_rows().zip(y) {
        for (o, v) in out.iter_mut().zip(r) {
            *o += v * yi;
        }
    }
    out
}

/// Prepends a column of ones.
pub fn with_intercept(x: &Matrix) -> Matrix {
    Matrix::from_fn(x.rows(), x.cols() + 1, |i, j| {
        if j == 0 {
            1.0
        } else {
            x.get(i, j - 1)
        }
    })
}
