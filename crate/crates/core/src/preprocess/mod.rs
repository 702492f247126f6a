//! Deterministic data preparation.

mod encode;
mod recipe;
mod sampling;
mod split;
mod standardize;

pub use encode::{drop_columns, map_values, one_hot, set_target, TargetTransform};
pub use recipe::{apply_recipe, FittedSteps, Recipe, ResampleMethod, Step};
pub use sampling::{random_over_under, smote, smote_balance, DEFAULT_SMOTE_K};
pub use split::{strata, stratified_folds, stratified_split};
pub use standardize::{standardize, standardize_dataset, MinMaxScaler, StandardizeStats};
