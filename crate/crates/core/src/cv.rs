//! Stratified k-fold cross-validation of a model on a feature subset.
//!
//! Standardization and resampling are fitted inside each training fold and
//! the held-out fold only ever sees the training fold's statistics. Fold
//! `f` draws its resampling and model seed from child stream `f + 1`; the
//! fold assignment uses child stream 0.

use alloc::string::String;
use alloc::vec::Vec;

use crate::dataset::{Dataset, TaskKind};
use crate::error::Result;
use crate::metrics::MetricKind;
use crate::models::{fit, ModelConfig, ModelKind};
use crate::preprocess::{stratified_folds, FittedSteps};
use crate::rng::RngStream;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FoldScores {
    pub method: String,
    pub model: ModelKind,
    pub metric: MetricKind,
    pub values: Vec<f64>,
}

impl FoldScores {
    pub fn mean(&self) -> f64 {
        crate::numeric::mean(&self.values)
    }
}

/// Everything a cross-validation needs besides the data.
#[derive(Debug, Clone, PartialEq)]
pub struct CvSpec<'a> {
    pub task: TaskKind,
    pub model: ModelKind,
    pub model_config: &'a ModelConfig,
    pub fitted: &'a FittedSteps,
    pub folds: usize,
    pub metric: MetricKind,
}

/// Restricts `data` to `subset` and cross-validates. `method` labels the
/// result.
pub fn kfold_cv(
    data: &Dataset,
    subset: &[usize],
    spec: &CvSpec<'_>,
    rng: &RngStream,
    method: &str,
) -> Result<FoldScores> {
    let data = data.select_columns(subset)?;
    let fitted = spec.fitted.restricted_to(&data);
    let fold = stratified_folds(data.target(), spec.task, spec.folds, &mut rng.child(0))?;
    let mut values = Vec::with_capacity(spec.folds);
    for f in 0..spec.folds {
        let train: Vec<usize> = (0..fold.len()).filter(|&i| fold[i] != f).collect();
        let test: Vec<usize> = (0..fold.len()).filter(|&i| fold[i] == f).collect();
        let mut frng = rng.child(f as u64 + 1);
        let (stats, train_set) = fitted.fit_train(&data.select_rows(&train)?, &mut frng)?;
        let test_set = data.select_rows(&test)?;
        let test_x = match &stats {
            Some(s) => s.apply(test_set.features())?,
            None => test_set.features().clone(),
        };
        let model = fit(
            spec.model,
            train_set.features(),
            train_set.target(),
            spec.task,
            spec.model_config,
            frng.next_u64(),
        )?;
        let pred = model.predict(&test_x)?;
        values.push(spec.metric.evaluate(&pred, test_set.target())?);
    }
    Ok(FoldScores {
        method: method.into(),
        model: spec.model,
        metric: spec.metric,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Matrix;

    #[test]
    fn exact_linear_data_scores_zero_smape() {
        let x = Matrix::from_fn(30, 2, |i, j| (i as f64 + 1.0) * (j as f64 + 1.5));
        let y: Vec<f64> = (0..30).map(|i| 3.0 + 2.0 * x.get(i, 0)).collect();
        let d = Dataset::from_numeric(x, y).unwrap();
        let spec = CvSpec {
            task: TaskKind::Regression,
            model: ModelKind::Linear,
            model_config: &ModelConfig::default(),
            fitted: &FittedSteps::default(),
            folds: 5,
            metric: MetricKind::Smape,
        };
        let s = kfold_cv(&d, &[0], &spec, &RngStream::new(1), "all").unwrap();
        assert_eq!(s.values.len(), 5);
        assert!(s.values.iter().all(|v| *v < 1e-9), "{:?}", s.values);
    }

    #[test]
    fn seeded_cv_is_reproducible() {
        let mut r = RngStream::new(4);
        let x = Matrix::from_fn(60, 3, |_, _| r.normal());
        let y: Vec<f64> = (0..60)
            .map(|i| {
                if x.get(i, 0) + 0.5 * r.normal() > 0.0 {
                    1.0
                } else {
                    0.0
                }
            })
            .collect();
        let d = Dataset::from_numeric(x, y).unwrap();
        let fitted = FittedSteps {
            standardize: Some((None, false)),
            resample: None,
        };
        let spec = CvSpec {
            task: TaskKind::Classification,
            model: ModelKind::Tree,
            model_config: &ModelConfig::default(),
            fitted: &fitted,
            folds: 3,
            metric: MetricKind::Auc,
        };
        let a = kfold_cv(&d, &[0, 2], &spec, &RngStream::new(7), "ega").unwrap();
        let b = kfold_cv(&d, &[0, 2], &spec, &RngStream::new(7), "ega").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.values.len(), 3);
    }
}
