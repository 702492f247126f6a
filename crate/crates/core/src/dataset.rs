//! Column-tagged feature matrix plus target.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "snake_case")
)]
pub enum TaskKind {
    Classification,
    Regression,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "snake_case", tag = "kind")
)]
pub enum ColumnKind {
    Numeric,
    /// Values are stored as indices into `levels`.
    Categorical {
        levels: Vec<String>,
    },
    OneHotDerived,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OneHotSource {
    pub column: String,
    pub category: String,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ColumnSpec {
    pub name: String,
    pub kind: ColumnKind,
    pub source: Option<OneHotSource>,
}

impl ColumnSpec {
    pub fn numeric(name: impl Into<String>) -> Self {
        ColumnSpec {
            name: name.into(),
            kind: ColumnKind::Numeric,
            source: None,
        }
    }

    pub fn categorical(name: impl Into<String>, levels: Vec<String>) -> Self {
        ColumnSpec {
            name: name.into(),
            kind: ColumnKind::Categorical { levels },
            source: None,
        }
    }

    pub fn one_hot(column: &str, category: &str) -> Self {
        ColumnSpec {
            name: format!("{column}_{category}"),
            kind: ColumnKind::OneHotDerived,
            source: Some(OneHotSource {
                column: column.to_string(),
                category: category.to_string(),
            }),
        }
    }

    pub fn is_numeric(&self) -> bool {
        matches!(self.kind, ColumnKind::Numeric)
    }
}

/// Feature matrix with per-column schema and an optional target.
///
/// A freshly loaded table is *unlabeled* (empty target); a recipe's
/// `set_target` step moves one column into the target. When present the
/// target has exactly one entry per row.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Matrix,
    target: Vec<f64>,
    target_name: Option<String>,
    schema: Vec<ColumnSpec>,
}

impl Dataset {
    pub fn new(
        features: Matrix,
        schema: Vec<ColumnSpec>,
        target: Vec<f64>,
        target_name: Option<String>,
    ) -> Result<Self> {
        if schema.len() != features.cols() {
            return Err(Error::LengthMismatch {
                op: "Dataset schema",
                expected: features.cols(),
                actual: schema.len(),
            });
        }
        if !target.is_empty() && target.len() != features.rows() {
            return Err(Error::LengthMismatch {
                op: "Dataset target",
                expected: features.rows(),
                actual: target.len(),
            });
        }
        if target.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("Dataset target"));
        }
        let mut seen = BTreeSet::new();
        for (j, c) in schema.iter().enumerate() {
            if !seen.insert(c.name.as_str()) {
                return Err(Error::invalid(format!(
                    "duplicate column name `{}`",
                    c.name
                )));
            }
            match &c.kind {
                ColumnKind::OneHotDerived if c.source.is_none() => {
                    return Err(Error::invalid(format!(
                        "one-hot column `{}` has no source",
                        c.name
                    )));
                }
                ColumnKind::Categorical { levels } => {
                    for i in 0..features.rows() {
                        let v = features.get(i, j);
                        if v < 0.0 || libm::trunc(v) != v || v as usize >= levels.len() {
                            return Err(Error::invalid(format!(
                                "column `{}` row {i}: invalid level code {v}",
                                c.name
                            )));
                        }
                    }
                }
                _ => {}
            }
        }
        if let Some(name) = &target_name {
            if seen.contains(name.as_str()) {
                return Err(Error::invalid(format!(
                    "target `{name}` is also a feature column"
                )));
            }
        }
        Ok(Dataset {
            features,
            target,
            target_name,
            schema,
        })
    }

    /// All-numeric labeled dataset with generated column names `x0, x1, ...`.
    pub fn from_numeric(features: Matrix, target: Vec<f64>) -> Result<Self> {
        let schema = (0..features.cols())
            .map(|j| ColumnSpec::numeric(format!("x{j}")))
            .collect();
        Dataset::new(features, schema, target, Some("y".into()))
    }

    pub fn features(&self) -> &Matrix {
        &self.features
    }

    pub fn target(&self) -> &[f64] {
        &self.target
    }

    pub fn target_name(&self) -> Option<&str> {
        self.target_name.as_deref()
    }

    pub fn schema(&self) -> &[ColumnSpec] {
        &self.schema
    }

    pub fn n_samples(&self) -> usize {
        self.features.rows()
    }

    pub fn n_features(&self) -> usize {
        self.features.cols()
    }

    pub fn is_labeled(&self) -> bool {
        !self.target.is_empty()
    }

    pub fn feature_names(&self) -> Vec<String> {
        self.schema.iter().map(|c| c.name.clone()).collect()
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.schema
            .iter()
            .position(|c| c.name == name)
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))
    }

    /// Text form of a cell: the level for categorical columns, the shortest
    /// round-trip decimal otherwise.
    pub fn cell_label(&self, row: usize, col: usize) -> String {
        let v = self.features.get(row, col);
        match &self.schema[col].kind {
            ColumnKind::Categorical { levels } => levels[v as usize].clone(),
            _ => format_number(v),
        }
    }

    /// Binary class labels; fails unless every target is exactly 0 or 1.
    pub fn class_labels(&self) -> Result<Vec<u8>> {
        if !self.is_labeled() {
            return Err(Error::invalid("dataset has no target"));
        }
        binary_labels(&self.target)
    }

    pub fn with_features(&self, features: Matrix) -> Result<Dataset> {
        Dataset::new(
            features,
            self.schema.clone(),
            self.target.clone(),
            self.target_name.clone(),
        )
    }

    pub fn with_target(&self, target: Vec<f64>) -> Result<Dataset> {
        Dataset::new(
            self.features.clone(),
            self.schema.clone(),
            target,
            self.target_name.clone(),
        )
    }

    pub fn select_rows(&self, indices: &[usize]) -> Result<Dataset> {
        let target = if self.is_labeled() {
            indices.iter().map(|&i| self.target[i]).collect()
        } else {
            Vec::new()
        };
        Dataset::new(
            self.features.select_rows(indices)?,
            self.schema.clone(),
            target,
            self.target_name.clone(),
        )
    }

    pub fn select_columns(&self, indices: &[usize]) -> Result<Dataset> {
        let schema = indices.iter().map(|&j| self.schema[j].clone()).collect();
        Dataset::new(
            self.features.select_cols(indices)?,
            schema,
            self.target.clone(),
            self.target_name.clone(),
        )
    }
}

pub fn binary_labels(target: &[f64]) -> Result<Vec<u8>> {
    target
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            if v == 0.0 {
                Ok(0)
            } else if v == 1.0 {
                Ok(1)
            } else {
                Err(Error::invalid(format!(
                    "target row {i} is {v}, expected 0 or 1"
                )))
            }
        })
        .collect()
}

/// Shortest decimal that parses back to the same `f64` (`4.0` prints as `4`).
pub fn format_number(v: f64) -> String {
    format!("{v}")
}
