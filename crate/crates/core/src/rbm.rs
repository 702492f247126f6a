//! Bernoulli-Bernoulli restricted Boltzmann machine trained with CD-k.
//!
//! Visible inputs are real values in `[0, 1]` read as probabilities. The
//! positive phase uses hidden probabilities, the Gibbs chain runs on sampled
//! states, and the negative statistics use the final hidden probabilities.
//! The final visible state `vk` is either a binary sample or the visible
//! probabilities themselves, per [`NegativeVisible`]:
//!
//! ```text
//! dW  = lr / bs * (v0' p(h|v0) - vk' p(h|vk))
//! dbv = lr / bs * sum(v0 - vk)
//! dbh = lr / bs * sum(p(h|v0) - p(h|vk))
//! ```

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result, Shape};
use crate::matrix::Matrix;
use crate::numeric::sigmoid;
use crate::rng::RngStream;

/// Weights (`n_visible x n_hidden`) and both bias vectors.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(try_from = "RbmRepr", into = "RbmRepr")
)]
pub struct RbmParams {
    weights: Matrix,
    visible_bias: Vec<f64>,
    hidden_bias: Vec<f64>,
}

#[cfg(feature = "serde")]
#[derive(serde::Serialize, serde::Deserialize)]
struct RbmRepr {
    n_visible: usize,
    n_hidden: usize,
    weights: Vec<f64>,
    visible_bias: Vec<f64>,
    hidden_bias: Vec<f64>,
}

#[cfg(feature = "serde")]
impl TryFrom<RbmRepr> for RbmParams {
    type Error = Error;
    fn try_from(r: RbmRepr) -> Result<Self> {
        let w = Matrix::new(r.n_visible, r.n_hidden, r.weights)?;
        RbmParams::new(w, r.visible_bias, r.hidden_bias)
    }
}

#[cfg(feature = "serde")]
impl From<RbmParams> for RbmRepr {
    fn from(p: RbmParams) -> Self {
        RbmRepr {
            n_visible: p.weights.rows(),
            n_hidden: p.weights.cols(),
            weights: p.weights.into_vec(),
            visible_bias: p.visible_bias,
            hidden_bias: p.hidden_bias,
        }
    }
}

impl RbmParams {
    pub fn new(weights: Matrix, visible_bias: Vec<f64>, hidden_bias: Vec<f64>) -> Result<Self> {
        check_len("RbmParams visible bias", weights.rows(), visible_bias.len())?;
        check_len("RbmParams hidden bias", weights.cols(), hidden_bias.len())?;
        if visible_bias
            .iter()
            .chain(&hidden_bias)
            .any(|v| !v.is_finite())
        {
            return Err(Error::NonFinite("RbmParams"));
        }
        Ok(RbmParams {
            weights,
            visible_bias,
            hidden_bias,
        })
    }

    pub fn zeros(n_visible: usize, n_hidden: usize) -> Self {
        RbmParams {
            weights: Matrix::zeros(n_visible, n_hidden),
            visible_bias: vec![0.0; n_visible],
            hidden_bias: vec![0.0; n_hidden],
        }
    }

    /// Weights uniform on `[-scale, scale)`, biases zero.
    pub fn random(n_visible: usize, n_hidden: usize, scale: f64, rng: &mut RngStream) -> Self {
        RbmParams {
            weights: Matrix::from_fn(n_visible, n_hidden, |_, _| rng.uniform_range(-scale, scale)),
            visible_bias: vec![0.0; n_visible],
            hidden_bias: vec![0.0; n_hidden],
        }
    }

    pub fn n_visible(&self) -> usize {
        self.weights.rows()
    }

    pub fn n_hidden(&self) -> usize {
        self.weights.cols()
    }

    pub fn weights(&self) -> &Matrix {
        &self.weights
    }

    pub fn visible_bias(&self) -> &[f64] {
        &self.visible_bias
    }

    pub fn hidden_bias(&self) -> &[f64] {
        &self.hidden_bias
    }
}

fn check_len(op: &'static str, expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::LengthMismatch {
            op,
            expected,
            actual,
        })
    }
}

/// `sigmoid(hidden_bias + v W)`.
pub fn hidden_activation(v: &[f64], params: &RbmParams) -> Result<Vec<f64>> {
    check_len("hidden_activation", params.n_visible(), v.len())?;
    let mut out = params.hidden_bias.clone();
    up(v, params, &mut out);
    Ok(out)
}

/// `sigmoid(visible_bias + W h)`.
pub fn visible_activation(h: &[f64], params: &RbmParams) -> Result<Vec<f64>> {
    check_len("visible_activation", params.n_hidden(), h.len())?;
    let mut out = params.visible_bias.clone();
    down(h, params, &mut out);
    Ok(out)
}

// `out` holds the hidden bias on entry.
fn up(v: &[f64], params: &RbmParams, out: &mut [f64]) {
    let w = params.weights.as_slice();
    let nh = params.n_hidden();
    for (i, &vi) in v.iter().enumerate() {
        if vi != 0.0 {
            for (o, wij) in out.iter_mut().zip(&w[i * nh..(i + 1) * nh]) {
                *o += vi * wij;
            }
        }
    }
    for o in out.iter_mut() {
        *o = sigmoid(*o);
    }
}

// `out` holds the visible bias on entry.
fn down(h: &[f64], params: &RbmParams, out: &mut [f64]) {
    let w = params.weights.as_slice();
    let nh = params.n_hidden();
    for (i, o) in out.iter_mut().enumerate() {
        let row = &w[i * nh..(i + 1) * nh];
        *o = sigmoid(*o + row.iter().zip(h).map(|(a, b)| a * b).sum::<f64>());
    }
}

/// Independent Bernoulli draws, one uniform per entry in order.
pub fn sample_bernoulli(p: &[f64], rng: &mut RngStream) -> Vec<f64> {
    p.iter()
        .map(|&pi| if rng.bernoulli(pi) { 1.0 } else { 0.0 })
        .collect()
}

fn sample_into(p: &[f64], rng: &mut RngStream, out: &mut [f64]) {
    for (o, &pi) in out.iter_mut().zip(p) {
        *o = if rng.bernoulli(pi) { 1.0 } else { 0.0 };
    }
}

/// How the last visible state of the CD chain is formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "snake_case")
)]
pub enum NegativeVisible {
    /// Binary sample; the update is then an unbiased CD-k estimate for
    /// binary data.
    Sampled,
    /// Visible probabilities. Suited to real-valued inputs in `[0, 1]`,
    /// whose variance is far below that of a Bernoulli sample.
    #[default]
    Probabilities,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RbmTrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub cd_steps: usize,
    pub batch_size: usize,
    pub init_weight_scale: f64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub negative_visible: NegativeVisible,
}

impl RbmTrainConfig {
    /// lr 0.2, 100 epochs.
    pub fn classification() -> Self {
        RbmTrainConfig {
            learning_rate: 0.2,
            epochs: 100,
            ..Self::default()
        }
    }

    /// lr 0.1, 50 epochs.
    pub fn regression() -> Self {
        RbmTrainConfig {
            learning_rate: 0.1,
            epochs: 50,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::invalid(format!(
                "learning rate must be finite and >= 0, got {}",
                self.learning_rate
            )));
        }
        if self.epochs == 0 || self.cd_steps == 0 || self.batch_size == 0 {
            return Err(Error::invalid(
                "epochs, cd_steps and batch_size must be >= 1",
            ));
        }
        if !(self.init_weight_scale >= 0.0 && self.init_weight_scale.is_finite()) {
            return Err(Error::invalid("init weight scale must be finite and >= 0"));
        }
        Ok(())
    }
}

impl Default for RbmTrainConfig {
    fn default() -> Self {
        RbmTrainConfig {
            learning_rate: 0.2,
            epochs: 100,
            cd_steps: 1,
            batch_size: 32,
            init_weight_scale: 0.01,
            negative_visible: NegativeVisible::default(),
        }
    }
}

/// One CD-k update on `batch`, returning the updated parameters.
pub fn cd_k_step(
    batch: &Matrix,
    params: &RbmParams,
    config: &RbmTrainConfig,
    rng: &mut RngStream,
) -> Result<RbmParams> {
    if batch.cols() != params.n_visible() {
        return Err(Error::ShapeMismatch {
            op: "cd_k_step",
            left: batch.shape(),
            right: params.weights.shape(),
        });
    }
    let mut out = params.clone();
    let mut work = Workspace::new(params.n_visible(), params.n_hidden());
    let rows: Vec<&[f64]> = batch.iter_rows().collect();
    work.update(&mut out, &rows, config, rng);
    check_finite(&out)?;
    Ok(out)
}

fn check_finite(p: &RbmParams) -> Result<()> {
    let ok = p
        .weights
        .as_slice()
        .iter()
        .chain(&p.visible_bias)
        .chain(&p.hidden_bias)
        .all(|v| v.is_finite());
    if ok {
        Ok(())
    } else {
        Err(Error::NonFinite("RBM update"))
    }
}

/// Reusable buffers for CD updates.
struct Workspace {
    ph0: Vec<f64>,
    h: Vec<f64>,
    pv: Vec<f64>,
    v: Vec<f64>,
    ph: Vec<f64>,
    dw: Vec<f64>,
    dbv: Vec<f64>,
    dbh: Vec<f64>,
}

impl Workspace {
    fn new(nv: usize, nh: usize) -> Self {
        Workspace {
            ph0: vec![0.0; nh],
            h: vec![0.0; nh],
            pv: vec![0.0; nv],
            v: vec![0.0; nv],
            ph: vec![0.0; nh],
            dw: vec![0.0; nv * nh],
            dbv: vec![0.0; nv],
            dbh: vec![0.0; nh],
        }
    }

    /// Applies one update in place and returns the summed squared error
    /// between each row and its first-step visible probabilities.
    fn update(
        &mut self,
        params: &mut RbmParams,
        rows: &[&[f64]],
        config: &RbmTrainConfig,
        rng: &mut RngStream,
    ) -> f64 {
        let nh = params.n_hidden();
        self.dw.fill(0.0);
        self.dbv.fill(0.0);
        self.dbh.fill(0.0);
        let mut sq_err = 0.0;
        for v0 in rows {
            self.ph0.copy_from_slice(&params.hidden_bias);
            up(v0, params, &mut self.ph0);
            sample_into(&self.ph0, rng, &mut self.h);
            for step in 0..config.cd_steps {
                self.pv.copy_from_slice(&params.visible_bias);
                down(&self.h, params, &mut self.pv);
                if step == 0 {
                    sq_err += v0
                        .iter()
                        .zip(&self.pv)
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>();
                }
                if step + 1 == config.cd_steps
                    && config.negative_visible == NegativeVisible::Probabilities
                {
                    self.v.copy_from_slice(&self.pv);
                } else {
                    sample_into(&self.pv, rng, &mut self.v);
                }
                self.ph.copy_from_slice(&params.hidden_bias);
                up(&self.v, params, &mut self.ph);
                if step + 1 < config.cd_steps {
                    sample_into(&self.ph, rng, &mut self.h);
                }
            }
            for i in 0..v0.len() {
                let (a, b) = (v0[i], self.v[i]);
                let row = &mut self.dw[i * nh..(i + 1) * nh];
                for j in 0..nh {
                    row[j] += a * self.ph0[j] - b * self.ph[j];
                }
                self.dbv[i] += a - b;
            }
            for j in 0..nh {
                self.dbh[j] += self.ph0[j] - self.ph[j];
            }
        }
        let scale = config.learning_rate / rows.len() as f64;
        for (w, d) in params.weights.data_mut().iter_mut().zip(&self.dw) {
            *w += scale * d;
        }
        for (b, d) in params.visible_bias.iter_mut().zip(&self.dbv) {
            *b += scale * d;
        }
        for (b, d) in params.hidden_bias.iter_mut().zip(&self.dbh) {
            *b += scale * d;
        }
        sq_err
    }
}

/// Trained parameters with the mean reconstruction error of every epoch.
#[derive(Debug, Clone, PartialEq)]
pub struct RbmFit {
    pub params: RbmParams,
    /// Mean over samples of the squared error between each input and its
    /// one-step visible reconstruction probabilities, measured during the
    /// epoch.
    pub epoch_errors: Vec<f64>,
}

/// Trains an RBM with `config.epochs` passes of mini-batch CD-k.
///
/// Rows are first put in a canonical (lexicographic) order and then shuffled
/// once per epoch, so the result depends on the multiset of rows and the
/// seed, not on the order the rows were supplied in.
pub fn train_rbm(
    data: &Matrix,
    n_hidden: usize,
    config: &RbmTrainConfig,
    rng: &mut RngStream,
) -> Result<RbmFit> {
    config.validate()?;
    if n_hidden == 0 {
        return Err(Error::invalid("RBM needs at least one hidden unit"));
    }
    if let Some(bad) = data.as_slice().iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(Error::invalid(format!(
            "RBM inputs must lie in [0, 1], found {bad}; rescale first"
        )));
    }
    let nv = data.cols();
    let mut rows: Vec<&[f64]> = data.iter_rows().collect();
    rows.sort_by(|a, b| {
        a.iter()
            .zip(*b)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(core::cmp::Ordering::Equal)
    });
    let mut params = RbmParams::random(nv, n_hidden, config.init_weight_scale, rng);
    let mut work = Workspace::new(nv, n_hidden);
    let mut errors = Vec::with_capacity(config.epochs);
    for _ in 0..config.epochs {
        rng.shuffle(&mut rows);
        let mut sq = 0.0;
        for batch in rows.chunks(config.batch_size) {
            sq += work.update(&mut params, batch, config, rng);
        }
        check_finite(&params)?;
        errors.push(sq / (rows.len() * nv) as f64);
    }
    Ok(RbmFit {
        params,
        epoch_errors: errors,
    })
}

/// Hidden probabilities for every row of `data`.
pub fn transform(data: &Matrix, params: &RbmParams) -> Result<Matrix> {
    if data.cols() != params.n_visible() {
        return Err(Error::ShapeMismatch {
            op: "rbm transform",
            left: data.shape(),
            right: Shape(params.n_visible(), params.n_hidden()),
        });
    }
    let nh = params.n_hidden();
    let mut out = Vec::with_capacity(data.rows() * nh);
    let mut buf = vec![0.0; nh];
    for r in data.iter_rows() {
        buf.copy_from_slice(&params.hidden_bias);
        up(r, params, &mut buf);
        out.extend_from_slice(&buf);
    }
    Ok(Matrix::from_raw(data.rows(), nh, out))
}

/// Visible probabilities for every row of hidden values.
pub fn reconstruct(hidden: &Matrix, params: &RbmParams) -> Result<Matrix> {
    if hidden.cols() != params.n_hidden() {
        return Err(Error::ShapeMismatch {
            op: "rbm reconstruct",
            left: hidden.shape(),
            right: Shape(params.n_visible(), params.n_hidden()),
        });
    }
    let nv = params.n_visible();
    let mut out = Vec::with_capacity(hidden.rows() * nv);
    let mut buf = vec![0.0; nv];
    for r in hidden.iter_rows() {
        buf.copy_from_slice(&params.visible_bias);
        down(r, params, &mut buf);
        out.extend_from_slice(&buf);
    }
    Ok(Matrix::from_raw(hidden.rows(), nv, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::ln;

    fn single(w: f64) -> RbmParams {
        RbmParams::new(Matrix::new(1, 1, vec![w]).unwrap(), vec![0.0], vec![0.0]).unwrap()
    }

    #[test]
    fn activations() {
        let p = RbmParams::zeros(3, 2);
        assert_eq!(
            hidden_activation(&[1.0, 0.0, 1.0], &p).unwrap(),
            vec![0.5; 2]
        );
        assert_eq!(visible_activation(&[1.0, 0.0], &p).unwrap(), vec![0.5; 3]);
        let p = single(ln(3.0));
        assert!((hidden_activation(&[1.0], &p).unwrap()[0] - 0.75).abs() < 1e-15);
        assert!((visible_activation(&[1.0], &p).unwrap()[0] - 0.75).abs() < 1e-15);
        assert!(hidden_activation(&[1.0], &single(100.0)).unwrap()[0] > 1.0 - 1e-12);
        let p = RbmParams::new(Matrix::zeros(2, 1), vec![1.0, -2.0], vec![0.0]).unwrap();
        assert_eq!(
            visible_activation(&[0.0], &p).unwrap(),
            vec![sigmoid(1.0), sigmoid(-2.0)]
        );
        assert!(hidden_activation(&[1.0, 1.0, 1.0], &p).is_err());
    }

    #[test]
    fn bernoulli_extremes_and_mean() {
        let mut rng = RngStream::new(9);
        assert_eq!(sample_bernoulli(&[0.0; 50], &mut rng), vec![0.0; 50]);
        assert_eq!(sample_bernoulli(&[1.0; 50], &mut rng), vec![1.0; 50]);
        let s = sample_bernoulli(&[0.5; 10_000], &mut rng);
        let m = s.iter().sum::<f64>() / 1e4;
        assert!((0.48..=0.52).contains(&m));
    }

    #[test]
    fn zero_rows_give_no_data_term() {
        let batch = Matrix::zeros(4, 3);
        let p = RbmParams::zeros(3, 2);
        let cfg = RbmTrainConfig {
            learning_rate: 1.0,
            ..Default::default()
        };
        let mut rng = RngStream::new(1);
        let out = cd_k_step(&batch, &p, &cfg, &mut rng).unwrap();
        // Only the negative phase contributes: every weight change is <= 0.
        assert!(out.weights().as_slice().iter().all(|&w| w <= 0.0));
    }

    #[test]
    fn zero_learning_rate_is_noop() {
        let mut rng = RngStream::new(2);
        let p = RbmParams::random(3, 2, 0.5, &mut rng);
        let batch = Matrix::from_fn(5, 3, |i, j| ((i + j) % 2) as f64);
        let cfg = RbmTrainConfig {
            learning_rate: 0.0,
            ..Default::default()
        };
        assert_eq!(cd_k_step(&batch, &p, &cfg, &mut rng).unwrap(), p);
    }

    #[test]
    fn one_by_one_replay() {
        let w = 0.3;
        let p = RbmParams::new(Matrix::new(1, 1, vec![w]).unwrap(), vec![0.1], vec![-0.2]).unwrap();
        let cfg = RbmTrainConfig {
            learning_rate: 0.5,
            cd_steps: 1,
            negative_visible: NegativeVisible::Sampled,
            ..Default::default()
        };
        let out = cd_k_step(
            &Matrix::new(1, 1, vec![1.0]).unwrap(),
            &p,
            &cfg,
            &mut RngStream::new(77),
        )
        .unwrap();
        // Replay: one uniform for h0, one for v1.
        let mut r = RngStream::new(77);
        let ph0 = sigmoid(-0.2 + w);
        let h0 = if r.uniform() < ph0 { 1.0 } else { 0.0 };
        let pv1 = sigmoid(0.1 + w * h0);
        let v1 = if r.uniform() < pv1 { 1.0 } else { 0.0 };
        let ph1 = sigmoid(-0.2 + w * v1);
        let dw = 0.5 * (ph0 - v1 * ph1);
        assert!((out.weights().get(0, 0) - (w + dw)).abs() < 1e-15);
        assert!((out.visible_bias()[0] - (0.1 + 0.5 * (1.0 - v1))).abs() < 1e-15);
        assert!((out.hidden_bias()[0] - (-0.2 + 0.5 * (ph0 - ph1))).abs() < 1e-15);
    }

    fn two_mode(n: usize, rng: &mut RngStream) -> Matrix {
        Matrix::from_fn(n, 6, |i, j| {
            let mode = i % 2;
            let on = if mode == 0 { j < 3 } else { j >= 3 };
            let flip = rng.uniform() < 0.05;
            if on != flip {
                1.0
            } else {
                0.0
            }
        })
    }

    #[test]
    fn training_lowers_reconstruction_error() {
        let mut rng = RngStream::new(11);
        let data = two_mode(500, &mut rng);
        let cfg = RbmTrainConfig {
            learning_rate: 0.1,
            epochs: 100,
            ..Default::default()
        };
        let fit = train_rbm(&data, 4, &cfg, &mut RngStream::new(3)).unwrap();
        assert!(fit.epoch_errors.last().unwrap() < &fit.epoch_errors[0]);
    }

    #[test]
    fn seeded_training_is_reproducible_and_order_free() {
        let mut rng = RngStream::new(12);
        let data = two_mode(40, &mut rng);
        let cfg = RbmTrainConfig {
            epochs: 5,
            batch_size: 40,
            ..Default::default()
        };
        let a = train_rbm(&data, 3, &cfg, &mut RngStream::new(5)).unwrap();
        let b = train_rbm(&data, 3, &cfg, &mut RngStream::new(5)).unwrap();
        assert_eq!(a, b);
        let rev: Vec<usize> = (0..40).rev().collect();
        let c = train_rbm(
            &data.select_rows(&rev).unwrap(),
            3,
            &cfg,
            &mut RngStream::new(5),
        )
        .unwrap();
        assert_eq!(a.params, c.params);
    }

    #[test]
    fn zero_lr_returns_init() {
        let data = Matrix::from_fn(10, 2, |i, _| (i % 2) as f64);
        let cfg = RbmTrainConfig {
            learning_rate: 0.0,
            epochs: 1,
            ..Default::default()
        };
        let fit = train_rbm(&data, 3, &cfg, &mut RngStream::new(8)).unwrap();
        let init = RbmParams::random(2, 3, 0.01, &mut RngStream::new(8));
        assert_eq!(fit.params, init);
    }

    #[test]
    fn rejects_out_of_range_inputs() {
        let data = Matrix::from_rows(&[[0.5, 1.5]]).unwrap();
        assert!(train_rbm(&data, 1, &RbmTrainConfig::default(), &mut RngStream::new(0)).is_err());
    }
}
