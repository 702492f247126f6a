//! Plot-ready top-k tables.

use std::path::Path;

use ega_core::dataset::format_number;
use ega_core::{top_k, ImportanceVector};

use crate::error::EgaError;
use crate::io::{csv_bytes, write_bytes};

#[derive(Debug, Clone, PartialEq)]
pub struct ChartRow {
    pub rank: usize,
    pub feature: String,
    pub percent: f64,
    pub cumulative_percent: f64,
}

/// The `k` highest-scoring features in descending order with a running total.
pub fn chart_rows(
    names: &[String],
    importance: &ImportanceVector,
    k: usize,
) -> Result<Vec<ChartRow>, EgaError> {
    if names.len() != importance.len() {
        return Err(EgaError::Config(format!(
            "{} feature names for {} scores",
            names.len(),
            importance.len()
        )));
    }
    let (idx, _) = top_k(importance, k).map_err(|e| EgaError::Config(e.to_string()))?;
    let mut total = 0.0;
    Ok(idx
        .into_iter()
        .enumerate()
        .map(|(pos, i)| {
            total += importance.scores[i];
            ChartRow {
                rank: pos + 1,
                feature: names[i].clone(),
                percent: importance.scores[i],
                cumulative_percent: total,
            }
        })
        .collect())
}

/// Writes `rank,feature,percent,cumulative_percent`.
pub fn emit_chart_data(
    names: &[String],
    importance: &ImportanceVector,
    k: usize,
    out: &Path,
) -> Result<(), EgaError> {
    write_bytes(out, &chart_csv_bytes(names, importance, k)?)
}

pub fn chart_csv_bytes(
    names: &[String],
    importance: &ImportanceVector,
    k: usize,
) -> Result<Vec<u8>, EgaError> {
    let rows: Vec<Vec<String>> = chart_rows(names, importance, k)?
        .into_iter()
        .map(|r| {
            vec![
                r.rank.to_string(),
                r.feature,
                format_number(r.percent),
                format_number(r.cumulative_percent),
            ]
        })
        .collect();
    Ok(csv_bytes(
        &["rank", "feature", "percent", "cumulative_percent"],
        &rows,
    ))
}
