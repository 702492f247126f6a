//! Recipe documents: shipped ones and files on disk.
//!
//! A recipe reference of the form `builtin:<name>` selects a shipped recipe;
//! anything else is a path to a JSON file.

use std::path::Path;

use ega_core::preprocess::Recipe;

use crate::error::EgaError;

pub const BUILTIN_PREFIX: &str = "builtin:";

/// Shipped recipes by name.
pub const BUILTIN: &[(&str, &str)] = &[
    ("auto_mpg", include_str!("../recipes/auto_mpg.json")),
    ("body_fat", include_str!("../recipes/body_fat.json")),
    (
        "boston_housing",
        include_str!("../recipes/boston_housing.json"),
    ),
    ("churn", include_str!("../recipes/churn.json")),
    (
        "credit_card_fraud",
        include_str!("../recipes/credit_card_fraud.json"),
    ),
    ("forest_fires", include_str!("../recipes/forest_fires.json")),
    (
        "insurance_fraud",
        include_str!("../recipes/insurance_fraud.json"),
    ),
    ("loan_default", include_str!("../recipes/loan_default.json")),
    (
        "loan_default_remapped",
        include_str!("../recipes/loan_default_remapped.json"),
    ),
    ("pollution", include_str!("../recipes/pollution.json")),
];

pub fn builtin(name: &str) -> Result<Recipe, EgaError> {
    let (_, text) = BUILTIN.iter().find(|(n, _)| *n == name).ok_or_else(|| {
        let known: Vec<&str> = BUILTIN.iter().map(|(n, _)| *n).collect();
        EgaError::Config(format!(
            "no builtin recipe `{name}` (known: {})",
            known.join(", ")
        ))
    })?;
    serde_json::from_str(text).map_err(|e| EgaError::Json {
        path: format!("{BUILTIN_PREFIX}{name}").into(),
        source: e,
    })
}

/// Resolves `reference` as a builtin name or as a path relative to `base`.
pub fn load_recipe(reference: &str, base: &Path) -> Result<Recipe, EgaError> {
    if let Some(name) = reference.strip_prefix(BUILTIN_PREFIX) {
        return builtin(name);
    }
    let path = base.join(reference);
    let text = std::fs::read_to_string(&path).map_err(|e| EgaError::io(&path, e))?;
    serde_json::from_str(&text).map_err(|e| EgaError::Json { path, source: e })
}
