//! Experiment runner around `ega-core`: CSV datasets, recipe and config
//! documents, the end-to-end pipeline, report files and a synthetic
//! benchmark generator.

pub mod chart;
pub mod config;
pub mod error;
pub mod io;
pub mod pipeline;
pub mod recipes;
pub mod report;
pub mod synth;

pub use config::ExperimentConfig;
pub use error::{EgaError, Stage};
pub use pipeline::{evaluate, rank, run_experiment};
pub use report::ComparisonReport;
