//! CSV datasets and ranking tables.
//!
//! A dataset file has a mandatory header row, UTF-8 text and `.` as the
//! decimal separator. Surrounding whitespace in cells is ignored. A column
//! whose every cell parses as a finite number is numeric; any other column
//! is categorical with its distinct values as sorted levels. Empty cells are
//! rejected. Row numbers in errors count data rows from 1.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use ega_core::dataset::format_number;
use ega_core::{ColumnSpec, Dataset, ImportanceVector, Matrix};
use serde::{Deserialize, Serialize};

use crate::error::EgaError;

pub fn read_dataset(path: &Path) -> Result<Dataset, EgaError> {
    let file = File::open(path).map_err(|e| EgaError::io(path, e))?;
    read_dataset_from(file, path)
}

/// Parses CSV from `reader`; `path` only labels errors.
pub fn read_dataset_from(reader: impl Read, path: &Path) -> Result<Dataset, EgaError> {
    let data_err = |message: String| EgaError::Data {
        path: path.to_path_buf(),
        message,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| data_err(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    if header.is_empty() || header.iter().all(String::is_empty) {
        return Err(data_err("missing header row".into()));
    }
    if let Some(j) = header.iter().position(String::is_empty) {
        return Err(data_err(format!("header column {} is empty", j + 1)));
    }
    let mut cells: Vec<Vec<String>> = vec![Vec::new(); header.len()];
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| data_err(format!("row {}: {e}", i + 1)))?;
        for (j, cell) in rec.iter().enumerate() {
            if cell.is_empty() {
                return Err(EgaError::Cell {
                    path: path.to_path_buf(),
                    row: i + 1,
                    column: header[j].clone(),
                    message: "missing value".into(),
                });
            }
            cells[j].push(cell.to_string());
        }
    }
    let n = cells[0].len();
    if n == 0 {
        return Err(data_err("no data rows".into()));
    }
    let mut columns = Vec::with_capacity(header.len());
    let mut schema = Vec::with_capacity(header.len());
    for (name, col) in header.iter().zip(&cells) {
        let parsed: Option<Vec<f64>> = col
            .iter()
            .map(|c| c.parse::<f64>().ok().filter(|v| v.is_finite()))
            .collect();
        match parsed {
            Some(values) => {
                columns.push(values);
                schema.push(ColumnSpec::numeric(name.clone()));
            }
            None => {
                let levels: Vec<String> = col
                    .iter()
                    .cloned()
                    .collect::<BTreeSet<_>>()
                    .into_iter()
                    .collect();
                columns.push(
                    col.iter()
                        .map(|c| levels.binary_search(c).unwrap() as f64)
                        .collect(),
                );
                schema.push(ColumnSpec::categorical(name.clone(), levels));
            }
        }
    }
    let features = Matrix::from_fn(n, header.len(), |i, j| columns[j][i]);
    Dataset::new(features, schema, Vec::new(), None).map_err(|e| data_err(e.to_string()))
}

/// Writes feature columns (then the target, when labeled) with labels for
/// categorical cells and shortest round-trip decimals for numbers.
pub fn write_dataset(path: &Path, data: &Dataset) -> Result<(), EgaError> {
    let mut header = data.feature_names();
    if let (true, Some(t)) = (data.is_labeled(), data.target_name()) {
        header.push(t.to_string());
    }
    let mut rows = Vec::with_capacity(data.n_samples());
    for i in 0..data.n_samples() {
        let mut row: Vec<String> = (0..data.n_features())
            .map(|j| data.cell_label(i, j))
            .collect();
        if data.is_labeled() && data.target_name().is_some() {
            row.push(format_number(data.target()[i]));
        }
        rows.push(row);
    }
    write_csv(path, &header, &rows)
}

/// One row of a ranking table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedFeature {
    pub feature_name: String,
    pub score_percent: f64,
    /// 1-based.
    pub rank: usize,
}

/// Ranking rows in rank order.
pub fn ranked_features(names: &[String], importance: &ImportanceVector) -> Vec<RankedFeature> {
    importance
        .ranking
        .iter()
        .enumerate()
        .map(|(pos, &i)| RankedFeature {
            feature_name: names[i].clone(),
            score_percent: importance.scores[i],
            rank: pos + 1,
        })
        .collect()
}

/// `feature_name,score_percent,rank`, one row per feature in rank order.
pub fn write_importance_csv(
    path: &Path,
    names: &[String],
    importance: &ImportanceVector,
) -> Result<(), EgaError> {
    write_bytes(path, &importance_csv_bytes(names, importance)?)
}

pub fn importance_csv_bytes(
    names: &[String],
    importance: &ImportanceVector,
) -> Result<Vec<u8>, EgaError> {
    if names.len() != importance.len() {
        return Err(EgaError::Config(format!(
            "{} feature names for {} scores",
            names.len(),
            importance.len()
        )));
    }
    let rows: Vec<Vec<String>> = ranked_features(names, importance)
        .into_iter()
        .map(|r| {
            vec![
                r.feature_name,
                format_number(r.score_percent),
                r.rank.to_string(),
            ]
        })
        .collect();
    Ok(csv_bytes(&["feature_name", "score_percent", "rank"], &rows))
}

/// Reads a file written by [`write_importance_csv`]. Names and scores come
/// back in file order; the rank column is ignored and recomputed.
pub fn read_importance_csv(path: &Path) -> Result<(Vec<String>, ImportanceVector), EgaError> {
    let file = File::open(path).map_err(|e| EgaError::io(path, e))?;
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(file);
    let data_err = |message: String| EgaError::Data {
        path: path.to_path_buf(),
        message,
    };
    let header = rdr.headers().map_err(|e| data_err(e.to_string()))?.clone();
    let col = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| data_err(format!("missing column `{name}`")))
    };
    let (name_col, score_col) = (col("feature_name")?, col("score_percent")?);
    let mut names = Vec::new();
    let mut scores = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| data_err(format!("row {}: {e}", i + 1)))?;
        names.push(rec[name_col].to_string());
        let v = rec[score_col]
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite() && *v >= 0.0)
            .ok_or_else(|| EgaError::Cell {
                path: path.to_path_buf(),
                row: i + 1,
                column: "score_percent".into(),
                message: format!("`{}` is not a nonnegative number", &rec[score_col]),
            })?;
        scores.push(v);
    }
    if names.is_empty() {
        return Err(data_err("no rows".into()));
    }
    Ok((names, ImportanceVector::from_scores(scores)))
}

pub fn write_csv<S: AsRef<str>>(
    path: &Path,
    header: &[S],
    rows: &[Vec<String>],
) -> Result<(), EgaError> {
    write_bytes(path, &csv_bytes(header, rows))
}

/// CSV text for `header` and `rows`.
pub fn csv_bytes<S: AsRef<str>>(header: &[S], rows: &[Vec<String>]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    // Writing to memory cannot fail.
    w.write_record(header.iter().map(AsRef::as_ref)).unwrap();
    for r in rows {
        w.write_record(r).unwrap();
    }
    w.into_inner().unwrap()
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<(), EgaError> {
    let mut f = File::create(path).map_err(|e| EgaError::io(path, e))?;
    f.write_all(bytes).map_err(|e| EgaError::io(path, e))
}
