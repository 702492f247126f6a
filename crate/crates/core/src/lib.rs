//! Numerical core for explaining deep belief network autoencoders.
//!
//! The crate trains stacks of Bernoulli RBMs greedily into an autoencoder
//! whose last layer is as wide as its input, turns the learned weights into
//! per-feature importance with the extended Garson algorithm, and carries
//! the machinery needed to compare the resulting feature subsets against a
//! Wald chi-square ranking: downstream models, metrics, stratified
//! cross-validation and the pooled two-sample t-test.
//!
//! Everything here is `no_std` + `alloc`. File formats, recipes on disk and
//! the experiment runner live in the companion `ega` crate.

#![no_std]
// Index loops mirror the matrix formulas; negated comparisons reject NaN.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(any(feature = "std", test))]
extern crate std;

pub mod attribution;
pub mod baselines;
pub mod cv;
pub mod dataset;
pub mod dbna;
mod error;
pub mod linalg;
pub mod matrix;
pub mod metrics;
pub mod models;
pub mod numeric;
pub mod preprocess;
pub mod rbm;
pub mod rng;
pub mod stats;

pub use attribution::{ega, garson, top_k, ImportanceVector};
pub use dataset::{ColumnKind, ColumnSpec, Dataset, TaskKind};
pub use dbna::{DbnaModel, DbnaTrainConfig};
pub use error::{Error, Result, Shape};
pub use matrix::Matrix;
pub use rbm::{NegativeVisible, RbmParams, RbmTrainConfig};
pub use rng::RngStream;
