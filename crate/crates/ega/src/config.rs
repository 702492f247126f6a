//! Experiment configuration document.
//!
//! Optional fields take task-dependent defaults; [`ExperimentConfig::resolved`]
//! fills them in so the report echoes every value that was used. Relative
//! paths are resolved against the directory of the config file.

use std::path::{Path, PathBuf};

use ega_core::metrics::MetricKind;
use ega_core::models::{ModelConfig, ModelKind};
use ega_core::stats::TTestKind;
use ega_core::{RbmTrainConfig, TaskKind};
use serde::{Deserialize, Serialize};

use crate::error::EgaError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dataset: PathBuf,
    /// Path to a recipe file or `builtin:<name>`.
    pub recipe: String,
    pub task: TaskKind,
    /// DBNA widths before the final, input-wide layer.
    pub hidden_sizes: Vec<usize>,
    /// Defaults: lr 0.2 and 100 epochs for classification, lr 0.1 and 50
    /// epochs for regression.
    #[serde(default)]
    pub rbm: Option<RbmTrainConfig>,
    pub k_values: Vec<usize>,
    /// Defaults: logistic and tree for classification; linear, ridge,
    /// lasso, svr and mlp for regression.
    #[serde(default)]
    pub models: Option<Vec<ModelKind>>,
    /// Defaults: AUC for classification, SMAPE for regression.
    #[serde(default)]
    pub metric: Option<MetricKind>,
    #[serde(default = "default_folds")]
    pub cv_folds: usize,
    #[serde(default = "default_train_fraction")]
    pub train_fraction: f64,
    #[serde(default)]
    pub t_test: TTestKind,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub model_config: ModelConfig,
    /// Directory that relative paths are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn default_folds() -> usize {
    10
}

fn default_train_fraction() -> f64 {
    0.8
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, EgaError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| EgaError::Config(format!("{}: {e}", path.display())))?;
        let mut cfg: ExperimentConfig =
            serde_json::from_str(&text).map_err(|e| EgaError::Json {
                path: path.to_path_buf(),
                source: e,
            })?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    /// Copy with every optional field filled in.
    pub fn resolved(&self) -> Self {
        let mut c = self.clone();
        c.rbm = Some(self.rbm_config());
        c.models = Some(self.model_kinds());
        c.metric = Some(self.metric_kind());
        c
    }

    pub fn rbm_config(&self) -> RbmTrainConfig {
        self.rbm.unwrap_or(match self.task {
            TaskKind::Classification => RbmTrainConfig::classification(),
            TaskKind::Regression => RbmTrainConfig::regression(),
        })
    }

    pub fn model_kinds(&self) -> Vec<ModelKind> {
        self.models.clone().unwrap_or_else(|| match self.task {
            TaskKind::Classification => vec![ModelKind::Logistic, ModelKind::Tree],
            TaskKind::Regression => vec![
                ModelKind::Linear,
                ModelKind::Ridge,
                ModelKind::Lasso,
                ModelKind::Svr,
                ModelKind::Mlp,
            ],
        })
    }

    pub fn metric_kind(&self) -> MetricKind {
        self.metric.unwrap_or(match self.task {
            TaskKind::Classification => MetricKind::Auc,
            TaskKind::Regression => MetricKind::Smape,
        })
    }

    pub fn dataset_path(&self) -> PathBuf {
        self.base_dir.join(&self.dataset)
    }

    pub fn output_path(&self) -> PathBuf {
        self.base_dir.join(&self.output_dir)
    }

    /// Checks everything that does not need the data. `k <= n_features` is
    /// checked once the recipe has run.
    pub fn validate(&self) -> Result<(), EgaError> {
        let bad = |m: String| Err(EgaError::Config(m));
        if self.hidden_sizes.is_empty() || self.hidden_sizes.contains(&0) {
            return bad("hidden_sizes must be non-empty with every width >= 1".into());
        }
        if self.k_values.is_empty() || self.k_values.contains(&0) {
            return bad("k_values must be non-empty with every k >= 1".into());
        }
        if self.cv_folds < 2 {
            return bad(format!("cv_folds must be >= 2, got {}", self.cv_folds));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return bad(format!(
                "train_fraction must lie in (0, 1), got {}",
                self.train_fraction
            ));
        }
        self.rbm_config()
            .validate()
            .map_err(|e| EgaError::Config(e.to_string()))?;
        let models = self.model_kinds();
        if models.is_empty() {
            return bad("models must not be empty".into());
        }
        for m in &models {
            if !m.supports(self.task) {
                return bad(format!("model {m} does not support {:?}", self.task));
            }
        }
        let metric = self.metric_kind();
        let fits = match self.task {
            TaskKind::Classification => metric == MetricKind::Auc,
            TaskKind::Regression => metric != MetricKind::Auc,
        };
        if !fits {
            return bad(format!(
                "metric {} does not suit {:?}",
                metric.name(),
                self.task
            ));
        }
        let deciding_present = match self.task {
            TaskKind::Classification => models.contains(&ModelKind::Tree),
            TaskKind::Regression => models
                .iter()
                .any(|m| matches!(m, ModelKind::Linear | ModelKind::Ridge | ModelKind::Lasso)),
        };
        if !deciding_present {
            return bad(
                "models must include tree (classification) or one of linear, ridge, lasso (regression)"
                    .into(),
            );
        }
        Ok(())
    }
}
