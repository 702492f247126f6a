//! Structural column edits: dropping, value remapping, one-hot encoding and
//! target selection.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::dataset::{format_number, ColumnKind, ColumnSpec, Dataset};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::numeric::log1p;

/// Transform applied to the target when it is selected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "snake_case")
)]
pub enum TargetTransform {
    #[default]
    None,
    /// `ln(x + 1)`.
    Log1p,
}

pub fn drop_columns(data: &Dataset, names: &[String]) -> Result<Dataset> {
    let mut drop = BTreeSet::new();
    for n in names {
        drop.insert(data.column_index(n)?);
    }
    let keep: Vec<usize> = (0..data.n_features())
        .filter(|j| !drop.contains(j))
        .collect();
    if keep.is_empty() {
        return Err(Error::invalid("dropping every feature column"));
    }
    data.select_columns(&keep)
}

/// Replaces cell values by label (see [`Dataset::cell_label`]).
///
/// A numeric column stays numeric when every new label parses as a number;
/// otherwise the column becomes categorical with sorted levels.
pub fn map_values(
    data: &Dataset,
    column: &str,
    mapping: &BTreeMap<String, String>,
) -> Result<Dataset> {
    let j = data.column_index(column)?;
    if matches!(data.schema()[j].kind, ColumnKind::OneHotDerived) {
        return Err(Error::invalid(format!(
            "cannot remap one-hot column `{column}`"
        )));
    }
    let labels: Vec<String> = (0..data.n_samples())
        .map(|i| {
            let l = data.cell_label(i, j);
            mapping.get(&l).cloned().unwrap_or(l)
        })
        .collect();
    let parsed: Option<Vec<f64>> = labels
        .iter()
        .map(|l| l.trim().parse::<f64>().ok().filter(|v| v.is_finite()))
        .collect();
    let (values, spec) = match (parsed, &data.schema()[j].kind) {
        (Some(values), ColumnKind::Numeric) => (values, ColumnSpec::numeric(column)),
        _ => categorical_from_labels(column, &labels),
    };
    replace_column(data, j, &[spec], |i, _| values[i])
}

fn categorical_from_labels(column: &str, labels: &[String]) -> (Vec<f64>, ColumnSpec) {
    let levels: Vec<String> = labels
        .iter()
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let codes = labels
        .iter()
        .map(|l| levels.binary_search(l).unwrap() as f64)
        .collect();
    (codes, ColumnSpec::categorical(column, levels))
}

/// Replaces `column` with one indicator column per category.
///
/// Without an explicit list the categories are the distinct values present:
/// numeric columns in ascending numeric order, categorical columns in level
/// order. With a list, every value present must belong to it and one column
/// is emitted per listed category. New columns are named `{column}_{value}`.
pub fn one_hot(data: &Dataset, column: &str, categories: Option<&[String]>) -> Result<Dataset> {
    let j = data.column_index(column)?;
    let labels: Vec<String> = match &data.schema()[j].kind {
        ColumnKind::OneHotDerived => {
            return Err(Error::invalid(format!(
                "column `{column}` is already one-hot"
            )))
        }
        _ => (0..data.n_samples())
            .map(|i| data.cell_label(i, j))
            .collect(),
    };
    let cats: Vec<String> = match categories {
        Some(list) => {
            for l in &labels {
                if !list.contains(l) {
                    return Err(Error::UnseenCategory {
                        column: column.to_string(),
                        category: l.clone(),
                    });
                }
            }
            list.to_vec()
        }
        None => present_categories(data, j),
    };
    let specs: Vec<ColumnSpec> = cats
        .iter()
        .map(|c| ColumnSpec::one_hot(column, c))
        .collect();
    replace_column(data, j, &specs, |i, k| {
        if labels[i] == cats[k] {
            1.0
        } else {
            0.0
        }
    })
}

fn present_categories(data: &Dataset, j: usize) -> Vec<String> {
    match &data.schema()[j].kind {
        ColumnKind::Categorical { levels } => {
            let present: BTreeSet<usize> = (0..data.n_samples())
                .map(|i| data.features().get(i, j) as usize)
                .collect();
            present.into_iter().map(|c| levels[c].clone()).collect()
        }
        _ => {
            let mut values: Vec<f64> = data.features().column(j);
            values.sort_by(f64::total_cmp);
            values.dedup();
            values.into_iter().map(format_number).collect()
        }
    }
}

/// Moves `column` out of the features into the target.
///
/// With `positive_label` the target is 1 where the cell label equals it and 0
/// elsewhere; otherwise the column must be numeric and its values are used.
pub fn set_target(
    data: &Dataset,
    column: &str,
    transform: TargetTransform,
    positive_label: Option<&str>,
) -> Result<Dataset> {
    let j = data.column_index(column)?;
    let mut target: Vec<f64> = match positive_label {
        Some(pos) => (0..data.n_samples())
            .map(|i| {
                if data.cell_label(i, j) == pos {
                    1.0
                } else {
                    0.0
                }
            })
            .collect(),
        None => {
            if !data.schema()[j].is_numeric() {
                return Err(Error::invalid(format!(
                    "target `{column}` is categorical; give a positive label"
                )));
            }
            data.features().column(j)
        }
    };
    if transform == TargetTransform::Log1p {
        for v in &mut target {
            if *v <= -1.0 {
                return Err(Error::invalid(format!(
                    "ln(x+1) undefined for target value {v}"
                )));
            }
            *v = log1p(*v);
        }
    }
    let keep: Vec<usize> = (0..data.n_features()).filter(|&c| c != j).collect();
    if keep.is_empty() {
        return Err(Error::invalid("target was the only column"));
    }
    let features = data.features().select_cols(&keep)?;
    let schema = keep.iter().map(|&c| data.schema()[c].clone()).collect();
    Dataset::new(features, schema, target, Some(column.to_string()))
}

/// Rebuilds `data` with column `j` replaced by `specs.len()` new columns whose
/// values come from `value(row, new_col)`.
fn replace_column(
    data: &Dataset,
    j: usize,
    specs: &[ColumnSpec],
    value: impl Fn(usize, usize) -> f64,
) -> Result<Dataset> {
    let old = data.features();
    let new_cols = old.cols() - 1 + specs.len();
    if new_cols == 0 {
        return Err(Error::invalid("no feature columns left"));
    }
    let mut rows = Vec::with_capacity(old.rows() * new_cols);
    for i in 0..old.rows() {
        let r = old.row(i);
        rows.extend_from_slice(&r[..j]);
        rows.extend((0..specs.len()).map(|k| value(i, k)));
        rows.extend_from_slice(&r[j + 1..]);
    }
    let mut schema: Vec<ColumnSpec> = data.schema()[..j].to_vec();
    schema.extend_from_slice(specs);
    schema.extend_from_slice(&data.schema()[j + 1..]);
    Dataset::new(
        Matrix::new(old.rows(), new_cols, rows)?,
        schema,
        data.target().to_vec(),
        data.target_name().map(|s| s.to_string()),
    )
}
