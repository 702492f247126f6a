//! Greedy layer-wise DBN autoencoder.
//!
//! The topology is `[n, m1, .., m_{L-1}, n]`: the caller lists the hidden
//! widths and the final layer is always as wide as the input. Layer `l`
//! trains on the hidden probabilities of layer `l - 1`. There is no
//! fine-tuning after pretraining.

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rbm::{self, RbmParams, RbmTrainConfig};
use crate::rng::RngStream;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(try_from = "DbnaRepr", into = "DbnaRepr")
)]
pub struct DbnaModel {
    layer_sizes: Vec<usize>,
    layers: Vec<RbmParams>,
}

#[cfg(feature = "serde")]
#[derive(serde::Serialize, serde::Deserialize)]
struct DbnaRepr {
    layer_sizes: Vec<usize>,
    layers: Vec<RbmParams>,
}

#[cfg(feature = "serde")]
impl TryFrom<DbnaRepr> for DbnaModel {
    type Error = Error;
    fn try_from(r: DbnaRepr) -> Result<Self> {
        DbnaModel::from_layers(r.layers).and_then(|m| {
            if m.layer_sizes == r.layer_sizes {
                Ok(m)
            } else {
                Err(Error::invalid("layer_sizes disagree with the layer shapes"))
            }
        })
    }
}

#[cfg(feature = "serde")]
impl From<DbnaModel> for DbnaRepr {
    fn from(m: DbnaModel) -> Self {
        DbnaRepr {
            layer_sizes: m.layer_sizes,
            layers: m.layers,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DbnaTrainConfig {
    /// Widths between the input and the final (input-wide) layer.
    pub hidden_sizes: Vec<usize>,
    pub rbm: RbmTrainConfig,
}

impl DbnaModel {
    /// Builds a model from a shape-chained stack whose output width equals
    /// its input width.
    pub fn from_layers(layers: Vec<RbmParams>) -> Result<Self> {
        let first = layers.first().ok_or(Error::Empty("DBNA layers"))?;
        let mut sizes = Vec::with_capacity(layers.len() + 1);
        sizes.push(first.n_visible());
        for (l, p) in layers.iter().enumerate() {
            if p.n_visible() != *sizes.last().unwrap() {
                return Err(Error::Layer {
                    layer: l,
                    source: Box::new(Error::LengthMismatch {
                        op: "DBNA layer chain",
                        expected: *sizes.last().unwrap(),
                        actual: p.n_visible(),
                    }),
                });
            }
            sizes.push(p.n_hidden());
        }
        if sizes[0] != *sizes.last().unwrap() {
            return Err(Error::LengthMismatch {
                op: "DBNA output width",
                expected: sizes[0],
                actual: *sizes.last().unwrap(),
            });
        }
        Ok(DbnaModel {
            layer_sizes: sizes,
            layers,
        })
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    pub fn layers(&self) -> &[RbmParams] {
        &self.layers
    }

    pub fn n_inputs(&self) -> usize {
        self.layer_sizes[0]
    }

    /// Number of weight matrices.
    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    /// Weight matrices in input-to-output order, biases excluded.
    pub fn collect_weights(&self) -> Vec<Matrix> {
        self.layers.iter().map(|l| l.weights().clone()).collect()
    }

    /// Bottom-up probabilities of every layer; the last entry is input-wide.
    pub fn forward_probabilities(&self, x: &[f64]) -> Result<Vec<Vec<f64>>> {
        let mut out: Vec<Vec<f64>> = Vec::with_capacity(self.depth());
        for (l, p) in self.layers.iter().enumerate() {
            let input = out.last().map_or(x, |v| v.as_slice());
            let h = rbm::hidden_activation(input, p).map_err(|e| Error::Layer {
                layer: l,
                source: Box::new(e),
            })?;
            out.push(h);
        }
        Ok(out)
    }

    /// Bottom-up pass over every row; returns the final layer's output.
    pub fn encode(&self, data: &Matrix) -> Result<Matrix> {
        let mut cur = data.clone();
        for p in &self.layers {
            cur = rbm::transform(&cur, p)?;
        }
        Ok(cur)
    }

    /// Up through every layer, then back down through the transposed
    /// weights with visible biases: the input as the stack reproduces it.
    pub fn reconstruct(&self, data: &Matrix) -> Result<Matrix> {
        let mut cur = self.encode(data)?;
        for p in self.layers.iter().rev() {
            cur = rbm::reconstruct(&cur, p)?;
        }
        Ok(cur)
    }

    /// Mean squared difference between `data` and [`Self::reconstruct`].
    pub fn reconstruction_error(&self, data: &Matrix) -> Result<f64> {
        let r = self.reconstruct(data)?;
        Ok(mean_sq_diff(data, &r))
    }

    /// Mean squared difference between `data` and the bottom-up output.
    pub fn forward_error(&self, data: &Matrix) -> Result<f64> {
        let r = self.encode(data)?;
        Ok(mean_sq_diff(data, &r))
    }
}

fn mean_sq_diff(a: &Matrix, b: &Matrix) -> f64 {
    let s: f64 = a
        .as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (x - y) * (x - y))
        .sum();
    s / a.as_slice().len() as f64
}

/// Model plus each layer's per-epoch reconstruction error.
#[derive(Debug, Clone, PartialEq)]
pub struct DbnaFit {
    pub model: DbnaModel,
    pub layer_errors: Vec<Vec<f64>>,
}

/// Greedy training. Layer `l` draws from child stream `l` of `rng`.
pub fn train_dbna(data: &Matrix, config: &DbnaTrainConfig, rng: &RngStream) -> Result<DbnaFit> {
    if config.hidden_sizes.is_empty() {
        return Err(Error::invalid("DBNA needs at least one hidden layer"));
    }
    if let Some(l) = config.hidden_sizes.iter().position(|&m| m == 0) {
        return Err(Error::invalid(alloc::format!(
            "hidden layer {l} has width 0"
        )));
    }
    let n = data.cols();
    let mut sizes = config.hidden_sizes.clone();
    sizes.push(n);
    let mut layers = Vec::with_capacity(sizes.len());
    let mut errors = Vec::with_capacity(sizes.len());
    let mut input = data.clone();
    for (l, &width) in sizes.iter().enumerate() {
        let wrap = |e| Error::Layer {
            layer: l,
            source: Box::new(e),
        };
        let fit =
            rbm::train_rbm(&input, width, &config.rbm, &mut rng.child(l as u64)).map_err(wrap)?;
        if l + 1 < sizes.len() {
            input = rbm::transform(&input, &fit.params).map_err(wrap)?;
        }
        layers.push(fit.params);
        errors.push(fit.epoch_errors);
    }
    Ok(DbnaFit {
        model: DbnaModel::from_layers(layers)?,
        layer_errors: errors,
    })
}
