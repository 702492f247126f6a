//! End-to-end experiment: prepare, split, rank, score, compare.
//!
//! Random streams are children of `RngStream::new(seed)`:
//!
//! | child | use |
//! |-------|-----|
//! | 0 | recipe steps |
//! | 1 | train/holdout split |
//! | 2 | training artifacts (`.child(0)` resampling, `.child(1)` DBNA) |
//! | 3 | holdout model seeds (`.child(model)`) |
//! | 4 | cross-validation (`.child(model)`) |
//!
//! `model` is the position in [`ModelKind::ALL`]. Every subset evaluated
//! for one model shares that model's streams, so EGA and Wald folds are
//! paired and the holdout models start from the same seed.

use std::path::Path;

use ega_core::baselines::{wald_rank_classification, wald_rank_regression, WaldRanking};
use ega_core::cv::{kfold_cv, CvSpec, FoldScores};
use ega_core::dbna::{train_dbna, DbnaFit};
use ega_core::models::{fit, ModelKind};
use ega_core::preprocess::{
    apply_recipe, stratified_split, FittedSteps, MinMaxScaler, Recipe, StandardizeStats,
};
use ega_core::stats::{select_better_method, two_sample_t_test, ModelComparison};
use ega_core::{
    ega, ColumnKind, Dataset, DbnaModel, DbnaTrainConfig, ImportanceVector, RngStream, TaskKind,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::{AtStage, EgaError, Stage};
use crate::io::{ranked_features, read_dataset};
use crate::recipes::load_recipe;
use crate::report::{
    ComparisonReport, ComparisonRow, CvRecord, DataSummary, DbnaSummary, HoldoutRow, KDecision,
    Selection, WaldRow, WaldSummary,
};

const RECIPE_STREAM: u64 = 0;
const SPLIT_STREAM: u64 = 1;
const ARTIFACT_STREAM: u64 = 2;
const HOLDOUT_STREAM: u64 = 3;
const CV_STREAM: u64 = 4;

pub const LABEL_ALL: &str = "all";
pub const LABEL_EGA: &str = "ega";
pub const LABEL_WALD: &str = "wald";

/// Structurally prepared data plus the steps still to be fitted on training
/// rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Prepared {
    pub recipe: Recipe,
    pub dataset: Dataset,
    pub fitted: FittedSteps,
}

/// Loads the dataset and applies the recipe's structural steps.
pub fn prepare(config: &ExperimentConfig) -> Result<Prepared, EgaError> {
    let recipe = load_recipe(&config.recipe, &config.base_dir)?;
    if let Some(t) = recipe.task {
        if t != config.task {
            return Err(EgaError::Config(format!(
                "recipe `{}` is for {t:?}, config says {:?}",
                recipe.name, config.task
            )));
        }
    }
    let raw = read_dataset(&config.dataset_path())?;
    prepare_dataset(&raw, recipe, config)
}

/// [`prepare`] for an already loaded table.
pub fn prepare_dataset(
    raw: &Dataset,
    recipe: Recipe,
    config: &ExperimentConfig,
) -> Result<Prepared, EgaError> {
    let root = RngStream::new(config.seed);
    let (structural, fitted) = recipe.split_fitted();
    let dataset = apply_recipe(raw, &structural, &root.child(RECIPE_STREAM)).at(Stage::Recipe)?;
    if !dataset.is_labeled() {
        return Err(EgaError::Config(format!(
            "recipe `{}` sets no target",
            recipe.name
        )));
    }
    if let Some(c) = dataset
        .schema()
        .iter()
        .find(|c| matches!(c.kind, ColumnKind::Categorical { .. }))
    {
        return Err(EgaError::Config(format!(
            "column `{}` is still categorical after the recipe; one-hot encode or drop it",
            c.name
        )));
    }
    if config.task == TaskKind::Classification {
        dataset.class_labels().at(Stage::Recipe)?;
    }
    Ok(Prepared {
        recipe,
        dataset,
        fitted,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    pub train: Vec<usize>,
    pub holdout: Vec<usize>,
}

pub fn split(dataset: &Dataset, config: &ExperimentConfig) -> Result<Split, EgaError> {
    let mut rng = RngStream::new(config.seed).child(SPLIT_STREAM);
    let (train, holdout) = stratified_split(
        dataset.target(),
        config.task,
        config.train_fraction,
        &mut rng,
    )
    .at(Stage::Split)?;
    Ok(Split { train, holdout })
}

/// Everything learned from the training rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingArtifacts {
    pub standardize: Option<StandardizeStats>,
    pub scaler: MinMaxScaler,
    pub dbna: DbnaModel,
    pub layer_errors: Vec<Vec<f64>>,
    pub ega: ImportanceVector,
    pub wald: WaldRanking,
    /// Rows after standardization and resampling.
    pub train_rows: usize,
}

/// Fits standardization, resampling, the DBNA and both rankings on the
/// training rows of `prepared`. Holdout rows are never read.
pub fn fit_training_artifacts(
    prepared: &Prepared,
    split: &Split,
    config: &ExperimentConfig,
) -> Result<(TrainingArtifacts, Dataset), EgaError> {
    let rng = RngStream::new(config.seed).child(ARTIFACT_STREAM);
    let train = prepared
        .dataset
        .select_rows(&split.train)
        .at(Stage::Split)?;
    let (standardize, train) = prepared
        .fitted
        .fit_train(&train, &mut rng.child(0))
        .at(Stage::Preprocess)?;
    let scaler = MinMaxScaler::fit(train.features());
    let unit = scaler.apply(train.features()).at(Stage::Preprocess)?;
    let dbna_config = DbnaTrainConfig {
        hidden_sizes: config.hidden_sizes.clone(),
        rbm: config.rbm_config(),
    };
    let DbnaFit {
        model,
        layer_errors,
    } = train_dbna(&unit, &dbna_config, &rng.child(1)).at(Stage::Dbna)?;
    let importance = ega(&model.collect_weights()).at(Stage::Ega)?;
    let wald = match config.task {
        TaskKind::Classification => wald_rank_classification(train.features(), train.target()),
        TaskKind::Regression => wald_rank_regression(train.features(), train.target()),
    }
    .at(Stage::Wald)?;
    let artifacts = TrainingArtifacts {
        standardize,
        scaler,
        dbna: model,
        layer_errors,
        ega: importance,
        wald,
        train_rows: train.n_samples(),
    };
    Ok((artifacts, train))
}

/// Indices of the top `k` features under both rankings.
fn selections(artifacts: &TrainingArtifacts, k: usize) -> (Vec<usize>, Vec<usize>) {
    (
        artifacts.ega.ranking[..k].to_vec(),
        artifacts.wald.ranking[..k].to_vec(),
    )
}

fn model_slot(kind: ModelKind) -> u64 {
    ModelKind::ALL.iter().position(|m| *m == kind).unwrap() as u64
}

/// Per-model results: holdout scores and fold scores for all features and
/// for each k.
struct ModelCell {
    holdout_all: f64,
    holdout: Vec<(f64, f64)>,
    cv_all: FoldScores,
    cv: Vec<(FoldScores, FoldScores)>,
}

fn evaluate_model(
    kind: ModelKind,
    prepared: &Prepared,
    split: &Split,
    artifacts: &TrainingArtifacts,
    train: &Dataset,
    config: &ExperimentConfig,
) -> Result<ModelCell, EgaError> {
    let root = RngStream::new(config.seed);
    let metric = config.metric_kind();
    let all: Vec<usize> = (0..prepared.dataset.n_features()).collect();

    let holdout = prepared
        .dataset
        .select_rows(&split.holdout)
        .at(Stage::Split)?;
    let holdout_x = match &artifacts.standardize {
        Some(s) => s.apply(holdout.features()).at(Stage::Holdout)?,
        None => holdout.features().clone(),
    };
    let seed = root
        .child(HOLDOUT_STREAM)
        .child(model_slot(kind))
        .next_u64();
    let score_holdout = |cols: &[usize]| -> Result<f64, EgaError> {
        let x = train.features().select_cols(cols).at(Stage::Holdout)?;
        let m = fit(
            kind,
            &x,
            train.target(),
            config.task,
            &config.model_config,
            seed,
        )
        .at(Stage::Holdout)?;
        let pred = m
            .predict(&holdout_x.select_cols(cols).at(Stage::Holdout)?)
            .at(Stage::Holdout)?;
        metric.evaluate(&pred, holdout.target()).at(Stage::Holdout)
    };

    let cv_rng = root.child(CV_STREAM).child(model_slot(kind));
    let spec = CvSpec {
        task: config.task,
        model: kind,
        model_config: &config.model_config,
        fitted: &prepared.fitted,
        folds: config.cv_folds,
        metric,
    };
    let cv = |cols: &[usize], label: &str| {
        kfold_cv(&prepared.dataset, cols, &spec, &cv_rng, label).at(Stage::CrossValidation)
    };

    let per_k: Vec<((f64, f64), (FoldScores, FoldScores))> = config
        .k_values
        .par_iter()
        .map(|&k| {
            let (e, w) = selections(artifacts, k);
            Ok((
                (score_holdout(&e)?, score_holdout(&w)?),
                (cv(&e, LABEL_EGA)?, cv(&w, LABEL_WALD)?),
            ))
        })
        .collect::<Result<_, EgaError>>()?;
    let (holdout_k, cv_k) = per_k.into_iter().unzip();
    Ok(ModelCell {
        holdout_all: score_holdout(&all)?,
        holdout: holdout_k,
        cv_all: cv(&all, LABEL_ALL)?,
        cv: cv_k,
    })
}

/// Runs the whole experiment in memory.
pub fn evaluate(
    config: &ExperimentConfig,
) -> Result<(ComparisonReport, TrainingArtifacts), EgaError> {
    config.validate()?;
    let prepared = prepare(config)?;
    evaluate_prepared(&prepared, config)
}

/// [`evaluate`] after [`prepare`].
pub fn evaluate_prepared(
    prepared: &Prepared,
    config: &ExperimentConfig,
) -> Result<(ComparisonReport, TrainingArtifacts), EgaError> {
    config.validate()?;
    let n = prepared.dataset.n_features();
    if let Some(k) = config.k_values.iter().find(|&&k| k > n) {
        return Err(EgaError::Config(format!(
            "k = {k} exceeds the {n} feature columns produced by the recipe"
        )));
    }
    let split = split(&prepared.dataset, config)?;
    let (artifacts, train) = fit_training_artifacts(prepared, &split, config)?;
    let models = config.model_kinds();
    let cells: Vec<ModelCell> = models
        .par_iter()
        .map(|&m| evaluate_model(m, prepared, &split, &artifacts, &train, config))
        .collect::<Result<_, _>>()?;
    let report = assemble(prepared, &split, &artifacts, &models, &cells, config)?;
    Ok((report, artifacts))
}

fn assemble(
    prepared: &Prepared,
    split: &Split,
    artifacts: &TrainingArtifacts,
    models: &[ModelKind],
    cells: &[ModelCell],
    config: &ExperimentConfig,
) -> Result<ComparisonReport, EgaError> {
    let names = prepared.dataset.feature_names();
    let metric = config.metric_kind();
    let pick = |idx: &[usize]| idx.iter().map(|&i| names[i].clone()).collect::<Vec<_>>();

    let mut selections_out = Vec::new();
    for &k in &config.k_values {
        let (e, w) = selections(artifacts, k);
        selections_out.push(Selection {
            k,
            ega_share_percent: e.iter().map(|&i| artifacts.ega.scores[i]).sum(),
            overlap: e.iter().filter(|i| w.contains(i)).count(),
            ega: pick(&e),
            wald: pick(&w),
        });
    }

    let mut holdout = Vec::new();
    let mut cross_validation = Vec::new();
    let mut comparisons = Vec::new();
    for (&model, cell) in models.iter().zip(cells) {
        cross_validation.push(CvRecord::new(None, cell.cv_all.clone()));
        for (ki, &k) in config.k_values.iter().enumerate() {
            let (he, hw) = cell.holdout[ki];
            holdout.push(HoldoutRow {
                model,
                k,
                metric,
                all_features: cell.holdout_all,
                ega: he,
                wald: hw,
            });
            let (ce, cw) = &cell.cv[ki];
            cross_validation.push(CvRecord::new(Some(k), ce.clone()));
            cross_validation.push(CvRecord::new(Some(k), cw.clone()));
            let t_test =
                two_sample_t_test(&ce.values, &cw.values, config.t_test).at(Stage::Comparison)?;
            comparisons.push(ComparisonRow {
                k,
                model,
                metric,
                all_features_mean: cell.cv_all.mean(),
                ega_mean: ce.mean(),
                wald_mean: cw.mean(),
                t_test,
            });
        }
    }

    let mut decisions = Vec::new();
    for &k in &config.k_values {
        let per_model: Vec<ModelComparison> = comparisons
            .iter()
            .filter(|c| c.k == k)
            .map(|c| ModelComparison {
                model: c.model,
                mean_a: c.ega_mean,
                mean_b: c.wald_mean,
                test: c.t_test,
            })
            .collect();
        let decision =
            select_better_method(&per_model, config.task, "EGA", "Wald").at(Stage::Comparison)?;
        decisions.push(KDecision { k, decision });
    }

    let wald_pct = artifacts.wald.percentages();
    let wald_rows = artifacts
        .wald
        .ranking
        .iter()
        .enumerate()
        .map(|(pos, &i)| WaldRow {
            feature_name: names[i].clone(),
            statistic: artifacts.wald.statistics[i],
            score_percent: wald_pct[i],
            rank: pos + 1,
        })
        .collect();

    Ok(ComparisonReport {
        config: config.resolved(),
        recipe: prepared.recipe.name.clone(),
        data: DataSummary {
            n_samples: prepared.dataset.n_samples(),
            n_features: prepared.dataset.n_features(),
            target: prepared
                .dataset
                .target_name()
                .unwrap_or_default()
                .to_string(),
            train_rows: split.train.len(),
            holdout_rows: split.holdout.len(),
            fitted_train_rows: artifacts.train_rows,
            feature_names: names.clone(),
        },
        dbna: DbnaSummary {
            layer_sizes: artifacts.dbna.layer_sizes().to_vec(),
            final_epoch_errors: artifacts
                .layer_errors
                .iter()
                .map(|e| e.last().copied().unwrap_or_default())
                .collect(),
        },
        ega: ranked_features(&names, &artifacts.ega),
        wald: WaldSummary {
            stabilized: artifacts.wald.stabilized,
            rows: wald_rows,
        },
        selections: selections_out,
        holdout,
        cross_validation,
        comparisons,
        decisions,
    })
}

/// Computes the experiment and writes every output file to the configured
/// output directory.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ComparisonReport, EgaError> {
    let (report, artifacts) = evaluate(config)?;
    crate::report::write_outputs(&report, &artifacts, &config.output_path())?;
    Ok(report)
}

/// Rankings only: prepare, split and fit the training artifacts.
pub fn rank(config: &ExperimentConfig) -> Result<(Prepared, TrainingArtifacts), EgaError> {
    config.validate()?;
    let prepared = prepare(config)?;
    let split = split(&prepared.dataset, config)?;
    let (artifacts, _) = fit_training_artifacts(&prepared, &split, config)?;
    Ok((prepared, artifacts))
}

/// Writes the two importance tables and the DBNA for [`rank`].
pub fn write_rankings(
    prepared: &Prepared,
    artifacts: &TrainingArtifacts,
    out: &Path,
) -> Result<(), EgaError> {
    crate::report::write_ranking_outputs(&prepared.dataset.feature_names(), artifacts, out)
}
