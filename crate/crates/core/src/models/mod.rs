//! Downstream models used to score feature subsets.
//!
//! [`fit`] dispatches on [`ModelKind`]; [`FittedModel::predict`] returns the
//! positive-class probability (tree: leaf class-1 fraction) for
//! classification and real predictions for regression.

mod linear;
mod logistic;
mod mlp;
mod svr;
mod tree;

use alloc::vec::Vec;
use core::fmt;

pub use linear::{
    fit_linear_family, lasso_lambda_max, lasso_objective, LinearFitInfo, LinearKind, LinearModel,
    LASSO_MAX_SWEEPS, LASSO_TOL,
};
pub use logistic::{fit_logistic, LogisticModel};
pub use mlp::{fit_mlp, MlpConfig, MlpModel};
pub use svr::{fit_svr, svr_objective, SvrConfig, SvrModel};
pub use tree::{fit_tree, TreeConfig, TreeModel, TreeNode};

pub(crate) use logistic::{check_binary, newton};

use crate::dataset::TaskKind;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "snake_case")
)]
pub enum ModelKind {
    Logistic,
    Tree,
    Linear,
    Ridge,
    Lasso,
    Svr,
    Mlp,
}

impl ModelKind {
    pub const ALL: [ModelKind; 7] = [
        ModelKind::Logistic,
        ModelKind::Tree,
        ModelKind::Linear,
        ModelKind::Ridge,
        ModelKind::Lasso,
        ModelKind::Svr,
        ModelKind::Mlp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Logistic => "logistic",
            ModelKind::Tree => "tree",
            ModelKind::Linear => "linear",
            ModelKind::Ridge => "ridge",
            ModelKind::Lasso => "lasso",
            ModelKind::Svr => "svr",
            ModelKind::Mlp => "mlp",
        }
    }

    pub fn supports(self, task: TaskKind) -> bool {
        match self {
            ModelKind::Tree | ModelKind::Mlp => true,
            ModelKind::Logistic => task == TaskKind::Classification,
            _ => task == TaskKind::Regression,
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Hyperparameters for every model kind.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(default)
)]
pub struct ModelConfig {
    /// Mean-loss L2 strength, `1 / C` with `C = 1`.
    pub logistic_l2: f64,
    pub tree: TreeConfig,
    pub ridge_lambda: f64,
    pub lasso_lambda: f64,
    pub svr: SvrConfig,
    pub mlp: MlpConfig,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            logistic_l2: 1.0,
            tree: TreeConfig::default(),
            ridge_lambda: 1.0,
            lasso_lambda: 1.0,
            svr: SvrConfig::default(),
            mlp: MlpConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrainingMeta {
    pub iterations: usize,
    pub converged: bool,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(tag = "kind", content = "parameters", rename_all = "snake_case")
)]
pub enum ModelParams {
    Logistic(LogisticModel),
    Tree(TreeModel),
    Linear(LinearModel),
    Ridge(LinearModel),
    Lasso(LinearModel),
    Svr(SvrModel),
    Mlp(MlpModel),
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FittedModel {
    pub n_features: usize,
    pub task: TaskKind,
    #[cfg_attr(feature = "serde", serde(flatten))]
    pub params: ModelParams,
    pub meta: TrainingMeta,
}

impl FittedModel {
    pub fn kind(&self) -> ModelKind {
        match self.params {
            ModelParams::Logistic(_) => ModelKind::Logistic,
            ModelParams::Tree(_) => ModelKind::Tree,
            ModelParams::Linear(_) => ModelKind::Linear,
            ModelParams::Ridge(_) => ModelKind::Ridge,
            ModelParams::Lasso(_) => ModelKind::Lasso,
            ModelParams::Svr(_) => ModelKind::Svr,
            ModelParams::Mlp(_) => ModelKind::Mlp,
        }
    }

    pub fn predict(&self, x: &Matrix) -> Result<Vec<f64>> {
        if x.cols() != self.n_features {
            return Err(Error::LengthMismatch {
                op: "predict width",
                expected: self.n_features,
                actual: x.cols(),
            });
        }
        let out: Vec<f64> = x.iter_rows().map(|r| self.predict_row(r)).collect();
        if out.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("predict"));
        }
        Ok(out)
    }

    fn predict_row(&self, r: &[f64]) -> f64 {
        match &self.params {
            ModelParams::Logistic(m) => m.predict_row(r),
            ModelParams::Tree(m) => m.predict_row(r),
            ModelParams::Linear(m) | ModelParams::Ridge(m) | ModelParams::Lasso(m) => {
                m.predict_row(r)
            }
            ModelParams::Svr(m) => m.predict_row(r),
            ModelParams::Mlp(m) => m.predict_row(r),
        }
    }
}

/// Fits `kind` on `(x, y)`. `seed` only matters for the MLP.
pub fn fit(
    kind: ModelKind,
    x: &Matrix,
    y: &[f64],
    task: TaskKind,
    config: &ModelConfig,
    seed: u64,
) -> Result<FittedModel> {
    if !kind.supports(task) {
        return Err(Error::invalid(alloc::format!(
            "model `{kind}` does not support {task:?}"
        )));
    }
    if task == TaskKind::Classification {
        check_binary(y, x.rows())?;
    }
    let (params, iterations, converged) = match kind {
        ModelKind::Logistic => {
            let (m, it, c) = fit_logistic(x, y, config.logistic_l2)?;
            (ModelParams::Logistic(m), it, c)
        }
        ModelKind::Tree => (
            ModelParams::Tree(fit_tree(x, y, task, &config.tree)?),
            1,
            true,
        ),
        ModelKind::Linear | ModelKind::Ridge | ModelKind::Lasso => {
            let (lk, lambda) = match kind {
                ModelKind::Linear => (LinearKind::Linear, 0.0),
                ModelKind::Ridge => (LinearKind::Ridge, config.ridge_lambda),
                _ => (LinearKind::Lasso, config.lasso_lambda),
            };
            let (m, info) = fit_linear_family(x, y, lk, lambda)?;
            let p = match lk {
                LinearKind::Linear => ModelParams::Linear(m),
                LinearKind::Ridge => ModelParams::Ridge(m),
                LinearKind::Lasso => ModelParams::Lasso(m),
            };
            (p, info.iterations, info.converged)
        }
        ModelKind::Svr => {
            let (m, epoch) = fit_svr(x, y, &config.svr)?;
            (ModelParams::Svr(m), epoch, true)
        }
        ModelKind::Mlp => (
            ModelParams::Mlp(fit_mlp(x, y, task, &config.mlp, seed)?),
            config.mlp.epochs,
            true,
        ),
    };
    Ok(FittedModel {
        n_features: x.cols(),
        task,
        params,
        meta: TrainingMeta {
            iterations,
            converged,
            seed,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn single_leaf_tree_predicts_constant() {
        let x = Matrix::from_fn(6, 2, |i, j| (i * j) as f64);
        let m = fit(
            ModelKind::Tree,
            &x,
            &[2.0; 6],
            TaskKind::Regression,
            &Default::default(),
            0,
        )
        .unwrap();
        assert_eq!(m.predict(&x).unwrap(), vec![2.0; 6]);
    }

    #[test]
    fn zero_logistic_predicts_half() {
        let m = FittedModel {
            n_features: 2,
            task: TaskKind::Classification,
            params: ModelParams::Logistic(LogisticModel {
                intercept: 0.0,
                coefficients: vec![0.0, 0.0],
            }),
            meta: TrainingMeta {
                iterations: 0,
                converged: true,
                seed: 0,
            },
        };
        let x = Matrix::from_fn(3, 2, |i, j| (i + 3 * j) as f64);
        assert_eq!(m.predict(&x).unwrap(), vec![0.5; 3]);
        assert!(m.predict(&Matrix::zeros(1, 3)).is_err());
    }

    #[test]
    fn task_support() {
        let x = Matrix::zeros(4, 1);
        let y = [0.0, 1.0, 0.0, 1.0];
        assert!(fit(
            ModelKind::Lasso,
            &x,
            &y,
            TaskKind::Classification,
            &Default::default(),
            0
        )
        .is_err());
        assert!(fit(
            ModelKind::Logistic,
            &x,
            &y,
            TaskKind::Regression,
            &Default::default(),
            0
        )
        .is_err());
    }

    #[test]
    fn every_fitter_is_deterministic() {
        let mut r = crate::rng::RngStream::new(3);
        let x = Matrix::from_fn(40, 3, |_, _| r.normal());
        let yr: Vec<f64> = (0..40).map(|i| x.get(i, 0) * 2.0 - x.get(i, 2)).collect();
        let yc: Vec<f64> = yr
            .iter()
            .map(|v| if *v > 0.0 { 1.0 } else { 0.0 })
            .collect();
        let mut cfg = ModelConfig::default();
        cfg.mlp.epochs = 20;
        cfg.svr.epochs = 50;
        for kind in ModelKind::ALL {
            for (task, y) in [(TaskKind::Classification, &yc), (TaskKind::Regression, &yr)] {
                if kind.supports(task) {
                    let a = fit(kind, &x, y, task, &cfg, 9).unwrap();
                    let b = fit(kind, &x, y, task, &cfg, 9).unwrap();
                    assert_eq!(a, b, "{kind}");
                }
            }
        }
    }
}
