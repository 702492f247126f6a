//! Declarative per-dataset preparation.
//!
//! A recipe is an ordered list of steps. Structural steps (drop, remap,
//! one-hot, target selection) are pure functions of the table and may run on
//! the whole dataset. `standardize` and `resample` learn from the rows they
//! see, so an experiment peels them off with [`Recipe::split_fitted`] and
//! applies them to training rows only.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use super::encode::{drop_columns, map_values, one_hot, set_target, TargetTransform};
#[cfg(feature = "serde")]
use super::sampling::DEFAULT_SMOTE_K;
use super::sampling::{random_over_under, smote_balance};
use super::standardize::{standardize_dataset, StandardizeStats};
use crate::dataset::{Dataset, TaskKind};
use crate::error::{Error, Result};
use crate::rng::RngStream;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Recipe {
    pub name: String,
    #[cfg_attr(feature = "serde", serde(default))]
    pub task: Option<TaskKind>,
    #[cfg_attr(feature = "serde", serde(default))]
    pub notes: Option<String>,
    #[cfg_attr(feature = "serde", serde(default))]
    pub steps: Vec<Step>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)
)]
pub enum Step {
    DropColumn {
        columns: Vec<String>,
    },
    MapValues {
        column: String,
        mapping: BTreeMap<String, String>,
    },
    OneHot {
        column: String,
        #[cfg_attr(feature = "serde", serde(default))]
        categories: Option<Vec<String>>,
    },
    /// `columns = None` selects every numeric column.
    Standardize {
        #[cfg_attr(feature = "serde", serde(default))]
        columns: Option<Vec<String>>,
        #[cfg_attr(feature = "serde", serde(default))]
        passthrough_constant: bool,
    },
    SetTarget {
        column: String,
        #[cfg_attr(feature = "serde", serde(default))]
        transform: TargetTransform,
        #[cfg_attr(feature = "serde", serde(default))]
        positive_label: Option<String>,
    },
    Resample {
        method: ResampleMethod,
    },
}

impl Step {
    pub fn op_name(&self) -> &'static str {
        match self {
            Step::DropColumn { .. } => "drop_column",
            Step::MapValues { .. } => "map_values",
            Step::OneHot { .. } => "one_hot",
            Step::Standardize { .. } => "standardize",
            Step::SetTarget { .. } => "set_target",
            Step::Resample { .. } => "resample",
        }
    }

    fn is_fitted(&self) -> bool {
        matches!(self, Step::Standardize { .. } | Step::Resample { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)
)]
pub enum ResampleMethod {
    /// Balance classes with SMOTE.
    Smote {
        #[cfg_attr(feature = "serde", serde(default = "default_k"))]
        k: usize,
    },
    /// Random over/under-sampling to a positive-class share.
    OverUnder { target_pos_fraction: f64 },
}

#[cfg(feature = "serde")]
fn default_k() -> usize {
    DEFAULT_SMOTE_K
}

impl ResampleMethod {
    pub fn apply(&self, data: &Dataset, rng: &mut RngStream) -> Result<Dataset> {
        match *self {
            ResampleMethod::Smote { k } => smote_balance(data, k, rng),
            ResampleMethod::OverUnder {
                target_pos_fraction,
            } => random_over_under(data, target_pos_fraction, rng),
        }
    }
}

/// The data-dependent steps of a recipe, to be fitted on training rows.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FittedSteps {
    pub standardize: Option<(Option<Vec<String>>, bool)>,
    pub resample: Option<ResampleMethod>,
}

impl FittedSteps {
    /// Drops explicitly named standardize columns that `data` lacks, for
    /// use after feature selection.
    pub fn restricted_to(&self, data: &Dataset) -> FittedSteps {
        let standardize = self.standardize.as_ref().map(|(cols, pass)| {
            let cols = cols.as_ref().map(|c| {
                c.iter()
                    .filter(|n| data.column_index(n).is_ok())
                    .cloned()
                    .collect()
            });
            (cols, *pass)
        });
        FittedSteps {
            standardize,
            resample: self.resample.clone(),
        }
    }

    /// Fits standardization on `train`; returns the stats (if any) and the
    /// standardized, resampled training set.
    pub fn fit_train(
        &self,
        train: &Dataset,
        rng: &mut RngStream,
    ) -> Result<(Option<StandardizeStats>, Dataset)> {
        let (stats, data) = match &self.standardize {
            Some((cols, passthrough)) => {
                let (d, s) = standardize_dataset(train, cols.as_deref(), *passthrough)?;
                (Some(s), d)
            }
            None => (None, train.clone()),
        };
        let data = match &self.resample {
            Some(m) => m.apply(&data, rng)?,
            None => data,
        };
        Ok((stats, data))
    }
}

impl Recipe {
    pub fn empty(name: impl Into<String>) -> Self {
        Recipe {
            name: name.into(),
            task: None,
            notes: None,
            steps: Vec::new(),
        }
    }

    /// Structural part (in order) and the fitted steps. Only the last
    /// `standardize` and the last `resample` are kept.
    pub fn split_fitted(&self) -> (Recipe, FittedSteps) {
        let mut fitted = FittedSteps::default();
        for s in &self.steps {
            match s {
                Step::Standardize {
                    columns,
                    passthrough_constant,
                } => fitted.standardize = Some((columns.clone(), *passthrough_constant)),
                Step::Resample { method } => fitted.resample = Some(method.clone()),
                _ => {}
            }
        }
        let structural = Recipe {
            steps: self
                .steps
                .iter()
                .filter(|s| !s.is_fitted())
                .cloned()
                .collect(),
            ..self.clone()
        };
        (structural, fitted)
    }
}

/// Applies every step in order. The first failing step is reported with its
/// index. Step `i` that needs randomness draws from child stream `i`.
pub fn apply_recipe(raw: &Dataset, recipe: &Recipe, rng: &RngStream) -> Result<Dataset> {
    let mut data = raw.clone();
    for (index, step) in recipe.steps.iter().enumerate() {
        data = apply_step(&data, step, &mut rng.child(index as u64)).map_err(|e| {
            Error::RecipeStep {
                index,
                op: step.op_name(),
                source: Box::new(e),
            }
        })?;
    }
    Ok(data)
}

fn apply_step(data: &Dataset, step: &Step, rng: &mut RngStream) -> Result<Dataset> {
    match step {
        Step::DropColumn { columns } => drop_columns(data, columns),
        Step::MapValues { column, mapping } => map_values(data, column, mapping),
        Step::OneHot { column, categories } => one_hot(data, column, categories.as_deref()),
        Step::Standardize {
            columns,
            passthrough_constant,
        } => standardize_dataset(data, columns.as_deref(), *passthrough_constant).map(|(d, _)| d),
        Step::SetTarget {
            column,
            transform,
            positive_label,
        } => set_target(data, column, *transform, positive_label.as_deref()),
        Step::Resample { method } => method.apply(data, rng),
    }
}
