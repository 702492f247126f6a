//! Fixtures shared by the integration and acceptance tests.

#![allow(dead_code)]

use std::path::{Path, PathBuf};

use ega::io::write_csv;
use ega::pipeline::{fit_training_artifacts, prepare, prepare_dataset, split, TrainingArtifacts};
use ega::synth::{generate_synthetic, SynthSpec};
use ega::ExperimentConfig;
use ega_core::preprocess::Recipe;
use ega_core::{RngStream, TaskKind};
use serde_json::json;

pub fn config_from(value: serde_json::Value) -> ExperimentConfig {
    serde_json::from_value(value).unwrap()
}

/// The planted 3 informative / 3 noise benchmark with `n` rows.
pub fn planted(n: usize, seed: u64) -> ega::synth::SyntheticData {
    generate_synthetic(&SynthSpec {
        n_samples: n,
        n_informative: 3,
        n_noise: 3,
        task: TaskKind::Classification,
        seed,
    })
    .unwrap()
}

pub fn standardize_recipe() -> Recipe {
    serde_json::from_value(json!({"name": "planted", "steps": [{"op": "standardize"}]})).unwrap()
}

/// DBNA (5, 4, 5) on the 6-column benchmark with the classification preset.
pub fn planted_config(seed: u64) -> ExperimentConfig {
    config_from(json!({
        "dataset": "unused.csv",
        "recipe": "unused",
        "task": "classification",
        "hidden_sizes": [5, 4],
        "k_values": [3],
        "cv_folds": 5,
        "seed": seed,
    }))
}

/// Training artifacts of the pipeline on the planted benchmark, and the mask.
pub fn planted_artifacts(n: usize, seed: u64) -> (TrainingArtifacts, Vec<bool>) {
    let s = planted(n, seed);
    let cfg = planted_config(seed);
    let prepared = prepare_dataset(&s.dataset, standardize_recipe(), &cfg).unwrap();
    let sp = split(&prepared.dataset, &cfg).unwrap();
    let (art, _) = fit_training_artifacts(&prepared, &sp, &cfg).unwrap();
    (art, s.mask)
}

/// Informative features among the first three of `ranking`.
pub fn top3_hits(ranking: &[usize], mask: &[bool]) -> usize {
    ranking[..3].iter().filter(|&&i| mask[i]).count()
}

/// Replica tables: real column names and every level the recipes rely on,
/// random values elsewhere.
pub const REPLICAS: &[(&str, TaskKind, usize)] = &[
    ("loan_default", TaskKind::Classification, 91),
    ("churn", TaskKind::Classification, 52),
    ("forest_fires", TaskKind::Regression, 21),
    ("auto_mpg", TaskKind::Regression, 9),
];

enum Col {
    Id,
    Num(f64, f64),
    Int(i64, i64),
    Levels(Vec<String>),
    Binary,
}

fn levels<T: ToString>(v: impl IntoIterator<Item = T>) -> Col {
    Col::Levels(v.into_iter().map(|x| x.to_string()).collect())
}

fn replica_columns(name: &str) -> Vec<(String, Col)> {
    let mut cols: Vec<(String, Col)> = Vec::new();
    let mut push = |n: &str, c: Col| cols.push((n.to_string(), c));
    match name {
        "loan_default" => {
            push("ID", Col::Id);
            push("LIMIT_BAL", Col::Int(10_000, 800_000));
            push("SEX", levels(1..=2));
            push("EDUCATION", levels(0..=6));
            push("MARRIAGE", levels(0..=3));
            push("AGE", Col::Int(21, 79));
            for p in ["PAY_0", "PAY_2", "PAY_3", "PAY_4"] {
                push(p, levels(-2..=8));
            }
            for p in ["PAY_5", "PAY_6"] {
                push(p, levels([-2, -1, 0, 2, 3, 4, 5, 6, 7, 8]));
            }
            for i in 1..=6 {
                push(&format!("BILL_AMT{i}"), Col::Int(-10_000, 500_000));
            }
            for i in 1..=6 {
                push(&format!("PAY_AMT{i}"), Col::Int(0, 100_000));
            }
            push("default.payment.next.month", Col::Binary);
        }
        "churn" => {
            for c in [
                "CRED_T",
                "CRED_T-1",
                "CRED_T-2",
                "INCOME",
                "AGE",
                "T_WEB_T",
                "T_WEB_T-1",
                "T_WEB_T-2",
            ] {
                push(c, Col::Num(0.0, 1000.0));
            }
            for c in [
                "MAR_T", "MAR_T-1", "MAR_T-2", "MAR_T-3", "MAR_T-4", "MAR_T-5", "MAR_T-6",
            ] {
                push(c, Col::Num(-50.0, 50.0));
            }
            for c in ["NCC_T", "NCC_T-1", "NCC_T-2"] {
                push(c, levels(0..=8));
            }
            push("N_EDUC", levels(1..=4));
            push("SX", levels(["F", "M"]));
            push("E_CIV", levels(1..=4));
            push("Target", Col::Binary);
        }
        "forest_fires" => {
            push("X", Col::Int(1, 9));
            push("Y", Col::Int(2, 9));
            push(
                "month",
                levels([
                    "jan", "feb", "mar", "apr", "may", "jun", "jul", "aug", "sep", "oct", "nov",
                    "dec",
                ]),
            );
            push(
                "day",
                levels(["mon", "tue", "wed", "thu", "fri", "sat", "sun"]),
            );
            for c in ["FFMC", "DMC", "DC", "ISI", "temp", "RH", "wind", "rain"] {
                push(c, Col::Num(0.0, 100.0));
            }
            push("area", Col::Num(0.0, 50.0));
        }
        "auto_mpg" => {
            push("mpg", Col::Num(9.0, 46.0));
            push("cylinders", Col::Int(3, 8));
            push("displacement", Col::Num(68.0, 455.0));
            push("horsepower", Col::Int(46, 230));
            push("weight", Col::Int(1613, 5140));
            push("acceleration", Col::Num(8.0, 24.8));
            push("model year", Col::Int(70, 82));
            push("origin", levels(1..=3));
            push(
                "car name",
                levels(["ford pinto", "vw rabbit", "toyota corolla", "amc hornet"]),
            );
        }
        other => panic!("no replica for {other}"),
    }
    cols
}

/// Writes `rows` rows of the replica for `name` and returns the path.
pub fn write_replica(name: &str, dir: &Path, rows: usize, seed: u64) -> PathBuf {
    let cols = replica_columns(name);
    let mut rng = RngStream::new(seed);
    let header: Vec<&str> = cols.iter().map(|(n, _)| n.as_str()).collect();
    let data: Vec<Vec<String>> = (0..rows)
        .map(|i| {
            cols.iter()
                .map(|(_, c)| match c {
                    Col::Id => (i + 1).to_string(),
                    Col::Num(lo, hi) => format!("{:.3}", rng.uniform_range(*lo, *hi)),
                    Col::Int(lo, hi) => (lo + rng.below((hi - lo + 1) as usize) as i64).to_string(),
                    // Cycle so that every level is present.
                    Col::Levels(l) => l[i % l.len()].clone(),
                    Col::Binary => ((i % 3 == 0) as u8).to_string(),
                })
                .collect()
        })
        .collect();
    let path = dir.join(format!("{name}.csv"));
    write_csv(&path, &header, &data).unwrap();
    path
}

/// Config for a shipped recipe on `dataset`.
pub fn recipe_config(
    recipe: &str,
    task: TaskKind,
    dataset: &Path,
    hidden: &[usize],
    k: usize,
) -> ExperimentConfig {
    let task = match task {
        TaskKind::Classification => "classification",
        TaskKind::Regression => "regression",
    };
    config_from(json!({
        "dataset": dataset,
        "recipe": format!("builtin:{recipe}"),
        "task": task,
        "hidden_sizes": hidden,
        "k_values": [k],
    }))
}

/// Feature columns the shipped recipe produces on `dataset`.
pub fn recipe_feature_count(recipe: &str, task: TaskKind, dataset: &Path) -> usize {
    prepare(&recipe_config(recipe, task, dataset, &[2], 1))
        .unwrap()
        .dataset
        .n_features()
}

/// Directory holding user-supplied real datasets named `<recipe>.csv`.
pub fn data_dir() -> Option<PathBuf> {
    std::env::var_os("EGA_DATA_DIR").map(PathBuf::from)
}
