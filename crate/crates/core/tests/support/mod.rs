//! Independent oracles shared by the integration and acceptance tests.
//!
//! Nothing here calls into the attribution or RBM code under test; the
//! oracles are plain scalar loops over nested vectors.

#![allow(dead_code, clippy::needless_range_loop)]

use ega_core::{Matrix, RbmParams, RngStream};

/// Shape-chained weight list `n -> m_1 -> ... -> n` with `1 <= L <= 5`
/// matrices and all widths in `1..=8`. Entries are nonzero with random sign.
pub fn random_chain(rng: &mut RngStream) -> Vec<Matrix> {
    let n = 1 + rng.below(8);
    let depth = 1 + rng.below(5);
    let mut sizes = vec![n];
    for _ in 1..depth {
        sizes.push(1 + rng.below(8));
    }
    sizes.push(n);
    sizes
        .windows(2)
        .map(|w| {
            Matrix::from_fn(w[0], w[1], |_, _| {
                let mag = rng.uniform_range(0.05, 2.0);
                if rng.bernoulli(0.5) {
                    -mag
                } else {
                    mag
                }
            })
        })
        .collect()
}

pub fn to_rows(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m.get(i, j)).collect())
        .collect()
}

/// Column-normalize absolute values, multiply the chain, row-sum, scale to
/// percent. Written as plain loops over `Vec<Vec<f64>>`.
pub fn naive_ega(weights: &[Matrix]) -> Vec<f64> {
    let mut normalized = Vec::new();
    for w in weights {
        let w = to_rows(w);
        let (r, c) = (w.len(), w[0].len());
        let mut out = vec![vec![0.0; c]; r];
        for j in 0..c {
            let mut s = 0.0;
            for row in &w {
                s += row[j].abs();
            }
            for i in 0..r {
                out[i][j] = w[i][j].abs() / s;
            }
        }
        normalized.push(out);
    }
    let mut cw = normalized[0].clone();
    for m in &normalized[1..] {
        let mut next = vec![vec![0.0; m[0].len()]; cw.len()];
        for i in 0..cw.len() {
            for j in 0..m[0].len() {
                for k in 0..m.len() {
                    next[i][j] += cw[i][k] * m[k][j];
                }
            }
        }
        cw = next;
    }
    let rc: Vec<f64> = cw.iter().map(|r| r.iter().sum()).collect();
    let total: f64 = rc.iter().sum();
    rc.iter().map(|v| 100.0 * v / total).collect()
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Mean log-likelihood gradient of a binary RBM over `data`, flattened as
/// `[W row-major, visible bias, hidden bias]`. The model term enumerates
/// every joint state.
pub fn exact_rbm_gradient(p: &RbmParams, data: &[Vec<f64>]) -> Vec<f64> {
    let (nv, nh) = (p.n_visible(), p.n_hidden());
    let w = p.weights();
    let (bv, bh) = (p.visible_bias(), p.hidden_bias());
    let mut pos = vec![0.0; nv * nh + nv + nh];
    for v in data {
        let ph: Vec<f64> = (0..nh)
            .map(|j| sigmoid(bh[j] + (0..nv).map(|i| v[i] * w.get(i, j)).sum::<f64>()))
            .collect();
        accumulate(&mut pos, v, &ph, 1.0 / data.len() as f64);
    }
    let mut neg = vec![0.0; pos.len()];
    let mut z = 0.0;
    for vs in 0..(1usize << nv) {
        for hs in 0..(1usize << nh) {
            let v: Vec<f64> = (0..nv).map(|i| ((vs >> i) & 1) as f64).collect();
            let h: Vec<f64> = (0..nh).map(|j| ((hs >> j) & 1) as f64).collect();
            let mut e = 0.0;
            for i in 0..nv {
                e += v[i] * bv[i];
                for j in 0..nh {
                    e += v[i] * h[j] * w.get(i, j);
                }
            }
            for j in 0..nh {
                e += h[j] * bh[j];
            }
            let weight = e.exp();
            z += weight;
            accumulate(&mut neg, &v, &h, weight);
        }
    }
    pos.iter().zip(&neg).map(|(a, b)| a - b / z).collect()
}

fn accumulate(out: &mut [f64], v: &[f64], h: &[f64], scale: f64) {
    let (nv, nh) = (v.len(), h.len());
    for i in 0..nv {
        for j in 0..nh {
            out[i * nh + j] += scale * v[i] * h[j];
        }
        out[nv * nh + i] += scale * v[i];
    }
    for j in 0..nh {
        out[nv * nh + nv + j] += scale * h[j];
    }
}

pub fn flatten(p: &RbmParams) -> Vec<f64> {
    let mut out = p.weights().as_slice().to_vec();
    out.extend_from_slice(p.visible_bias());
    out.extend_from_slice(p.hidden_bias());
    out
}

/// Student t density integrated with composite Simpson on `[0, |t|]`;
/// returns the two-sided tail probability.
pub fn t_two_sided_by_quadrature(t: f64, df: u32) -> f64 {
    let nu = df as f64;
    let c =
        gamma_half_integer(df + 1) / ((nu * std::f64::consts::PI).sqrt() * gamma_half_integer(df));
    let f = |x: f64| c * (1.0 + x * x / nu).powf(-(nu + 1.0) / 2.0);
    let upper = t.abs();
    let steps = 200_000;
    let h = upper / steps as f64;
    let mut s = f(0.0) + f(upper);
    for k in 1..steps {
        let x = k as f64 * h;
        s += if k % 2 == 1 { 4.0 } else { 2.0 } * f(x);
    }
    1.0 - 2.0 * s * h / 3.0
}

/// `Gamma(m / 2)` for positive integer `m`.
fn gamma_half_integer(m: u32) -> f64 {
    match m {
        1 => std::f64::consts::PI.sqrt(),
        2 => 1.0,
        _ => (m as f64 / 2.0 - 1.0) * gamma_half_integer(m - 2),
    }
}
