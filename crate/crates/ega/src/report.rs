//! Comparison report and the files written for it.
//!
//! Output directory layout:
//!
//! | file | content |
//! |------|---------|
//! | `report.json` | [`ComparisonReport`] |
//! | `tables.csv` | one row per (k, model) |
//! | `importance_ega.csv`, `importance_wald.csv` | full rankings |
//! | `importance_ega.json`, `importance_wald.json` | the same rows as JSON |
//! | `chart_ega_top{k}.csv`, `chart_wald_top{k}.csv` | chart data per k |
//! | `dbna_model.json` | trained DBNA |
//!
//! Files are rendered in memory, written to a staging directory inside the
//! output directory and then moved into place. On failure nothing written by
//! the run is left behind.

use std::fs;
use std::path::{Path, PathBuf};

use ega_core::cv::FoldScores;
use ega_core::dataset::format_number;
use ega_core::metrics::MetricKind;
use ega_core::models::ModelKind;
use ega_core::stats::{MethodDecision, TTestResult};
use ega_core::ImportanceVector;
use serde::{Deserialize, Serialize};

use crate::chart::chart_csv_bytes;
use crate::config::ExperimentConfig;
use crate::error::EgaError;
use crate::io::{csv_bytes, importance_csv_bytes, ranked_features, RankedFeature};
use crate::pipeline::TrainingArtifacts;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub k: usize,
    /// EGA importance covered by the EGA top-k.
    pub ega_share_percent: f64,
    /// Features in both top-k sets.
    pub overlap: usize,
    pub ega: Vec<String>,
    pub wald: Vec<String>,
}

/// Model fitted on the training rows, scored on the holdout rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoldoutRow {
    pub model: ModelKind,
    pub k: usize,
    pub metric: MetricKind,
    pub all_features: f64,
    pub ega: f64,
    pub wald: f64,
}

/// Fold scores of one (model, feature subset) cross-validation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvRecord {
    /// `None` for the all-features run.
    pub k: Option<usize>,
    pub scores: FoldScores,
    pub mean: f64,
}

impl CvRecord {
    pub fn new(k: Option<usize>, scores: FoldScores) -> Self {
        let mean = scores.mean();
        CvRecord { k, scores, mean }
    }
}

/// Cross-validated means for one (k, model) and the EGA vs Wald t-test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub k: usize,
    pub model: ModelKind,
    pub metric: MetricKind,
    pub all_features_mean: f64,
    pub ega_mean: f64,
    pub wald_mean: f64,
    pub t_test: TTestResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KDecision {
    pub k: usize,
    pub decision: MethodDecision,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaldRow {
    pub feature_name: String,
    pub statistic: f64,
    pub score_percent: f64,
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaldSummary {
    /// The regression fit needed a ridge on the slopes.
    pub stabilized: bool,
    pub rows: Vec<WaldRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataSummary {
    pub n_samples: usize,
    pub n_features: usize,
    pub target: String,
    pub train_rows: usize,
    pub holdout_rows: usize,
    /// Training rows after resampling.
    pub fitted_train_rows: usize,
    pub feature_names: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DbnaSummary {
    pub layer_sizes: Vec<usize>,
    pub final_epoch_errors: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    /// Every value used, defaults included.
    pub config: ExperimentConfig,
    pub recipe: String,
    pub data: DataSummary,
    pub dbna: DbnaSummary,
    pub ega: Vec<RankedFeature>,
    pub wald: WaldSummary,
    pub selections: Vec<Selection>,
    pub holdout: Vec<HoldoutRow>,
    /// All-features run first for each model, then EGA and Wald per k.
    pub cross_validation: Vec<CvRecord>,
    pub comparisons: Vec<ComparisonRow>,
    pub decisions: Vec<KDecision>,
}

impl ComparisonReport {
    pub fn to_json(&self) -> Vec<u8> {
        json_bytes(self)
    }

    /// Stored fold scores for `model` and `method` at `k`.
    pub fn fold_scores(
        &self,
        model: ModelKind,
        method: &str,
        k: Option<usize>,
    ) -> Option<&FoldScores> {
        self.cross_validation
            .iter()
            .find(|r| r.k == k && r.scores.model == model && r.scores.method == method)
            .map(|r| &r.scores)
    }
}

pub const TABLE_HEADER: [&str; 13] = [
    "k",
    "model",
    "metric",
    "all_features_cv_mean",
    "ega_cv_mean",
    "wald_cv_mean",
    "t_statistic",
    "df",
    "p_value",
    "significant",
    "all_features_holdout",
    "ega_holdout",
    "wald_holdout",
];

/// `tables.csv` content.
pub fn tables_csv_bytes(report: &ComparisonReport) -> Vec<u8> {
    let rows: Vec<Vec<String>> = report
        .comparisons
        .iter()
        .map(|c| {
            let h = report
                .holdout
                .iter()
                .find(|h| h.k == c.k && h.model == c.model);
            let hold =
                |f: fn(&HoldoutRow) -> f64| h.map(|h| format_number(f(h))).unwrap_or_default();
            vec![
                c.k.to_string(),
                c.model.to_string(),
                c.metric.name().to_string(),
                format_number(c.all_features_mean),
                format_number(c.ega_mean),
                format_number(c.wald_mean),
                format_number(c.t_test.t_statistic),
                c.t_test.degrees_of_freedom.to_string(),
                format_number(c.t_test.p_value),
                c.t_test.significant_at_5pct.to_string(),
                hold(|h| h.all_features),
                hold(|h| h.ega),
                hold(|h| h.wald),
            ]
        })
        .collect();
    csv_bytes(&TABLE_HEADER, &rows)
}

fn json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    // Every serialized type has string keys only.
    let mut v = serde_json::to_vec_pretty(value).unwrap();
    v.push(b'\n');
    v
}

fn ranking_files(
    names: &[String],
    artifacts: &TrainingArtifacts,
) -> Result<Vec<(String, Vec<u8>)>, EgaError> {
    let wald = ImportanceVector::from_scores(artifacts.wald.percentages());
    Ok(vec![
        (
            "importance_ega.csv".into(),
            importance_csv_bytes(names, &artifacts.ega)?,
        ),
        (
            "importance_wald.csv".into(),
            importance_csv_bytes(names, &wald)?,
        ),
        (
            "importance_ega.json".into(),
            json_bytes(&ranked_features(names, &artifacts.ega)),
        ),
        (
            "importance_wald.json".into(),
            json_bytes(&ranked_features(names, &wald)),
        ),
        ("dbna_model.json".into(), json_bytes(&artifacts.dbna)),
    ])
}

/// Writes every file of a full run into `out`.
pub fn write_outputs(
    report: &ComparisonReport,
    artifacts: &TrainingArtifacts,
    out: &Path,
) -> Result<(), EgaError> {
    let names = &report.data.feature_names;
    let wald = ImportanceVector::from_scores(artifacts.wald.percentages());
    let mut files = vec![
        ("report.json".to_string(), report.to_json()),
        ("tables.csv".to_string(), tables_csv_bytes(report)),
    ];
    files.extend(ranking_files(names, artifacts)?);
    for s in &report.selections {
        files.push((
            format!("chart_ega_top{}.csv", s.k),
            chart_csv_bytes(names, &artifacts.ega, s.k)?,
        ));
        files.push((
            format!("chart_wald_top{}.csv", s.k),
            chart_csv_bytes(names, &wald, s.k)?,
        ));
    }
    commit_files(out, &files)
}

/// Writes the importance tables and the DBNA into `out`.
pub fn write_ranking_outputs(
    names: &[String],
    artifacts: &TrainingArtifacts,
    out: &Path,
) -> Result<(), EgaError> {
    commit_files(out, &ranking_files(names, artifacts)?)
}

/// Stages `files` under `out` and moves them into place. On error, removes
/// what was moved and `out` itself when this call created it.
pub fn commit_files(out: &Path, files: &[(String, Vec<u8>)]) -> Result<(), EgaError> {
    let existed = out.is_dir();
    fs::create_dir_all(out).map_err(|e| EgaError::io(out, e))?;
    let mut moved: Vec<PathBuf> = Vec::new();
    let result = stage_and_move(out, files, &mut moved);
    if result.is_err() {
        for p in &moved {
            let _ = fs::remove_file(p);
        }
        if !existed {
            let _ = fs::remove_dir_all(out);
        }
    }
    result
}

fn stage_and_move(
    out: &Path,
    files: &[(String, Vec<u8>)],
    moved: &mut Vec<PathBuf>,
) -> Result<(), EgaError> {
    let staging = tempfile::Builder::new()
        .prefix(".staging-")
        .tempdir_in(out)
        .map_err(|e| EgaError::io(out, e))?;
    for (name, bytes) in files {
        let p = staging.path().join(name);
        fs::write(&p, bytes).map_err(|e| EgaError::io(&p, e))?;
    }
    for (name, _) in files {
        let (from, to) = (staging.path().join(name), out.join(name));
        fs::rename(&from, &to).map_err(|e| EgaError::io(&to, e))?;
        moved.push(to);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn commit_writes_files_and_leaves_no_staging_dir() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("o");
        commit_files(&out, &[("a.txt".into(), b"x".to_vec())]).unwrap();
        assert_eq!(fs::read(out.join("a.txt")).unwrap(), b"x");
        assert_eq!(fs::read_dir(&out).unwrap().count(), 1);
    }

    #[test]
    fn failed_commit_removes_created_dir() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("o");
        let files = vec![
            ("a.txt".into(), b"x".to_vec()),
            ("no/such/b.txt".into(), b"y".to_vec()),
        ];
        assert!(matches!(
            commit_files(&out, &files),
            Err(EgaError::Io { .. })
        ));
        assert!(!out.exists());
    }

    #[test]
    fn failed_commit_keeps_existing_dir_but_removes_moved_files() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().to_path_buf();
        fs::write(out.join("keep.txt"), b"k").unwrap();
        // A directory in the way makes the second rename fail.
        fs::create_dir(out.join("b.txt")).unwrap();
        fs::write(out.join("b.txt").join("inner"), b"i").unwrap();
        let files = vec![
            ("a.txt".into(), b"x".to_vec()),
            ("b.txt".into(), b"y".to_vec()),
        ];
        assert!(commit_files(&out, &files).is_err());
        assert!(out.join("keep.txt").exists());
        assert!(!out.join("a.txt").exists());
    }
}
