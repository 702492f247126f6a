//! Stratified hold-out splits and fold assignment.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::dataset::{binary_labels, TaskKind};
use crate::error::{Error, Result};
use crate::rng::RngStream;

const REGRESSION_BINS: usize = 10;

/// Stratum of every sample: the class for classification, the target decile
/// (by rank, ties broken by index) for regression.
pub fn strata(target: &[f64], task: TaskKind) -> Result<Vec<usize>> {
    match task {
        TaskKind::Classification => Ok(binary_labels(target)?
            .into_iter()
            .map(usize::from)
            .collect()),
        TaskKind::Regression => {
            let n = target.len();
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| target[a].total_cmp(&target[b]).then(a.cmp(&b)));
            let bins = REGRESSION_BINS.min(n.max(1));
            let mut out = vec![0; n];
            for (rank, &i) in order.iter().enumerate() {
                out[i] = rank * bins / n;
            }
            Ok(out)
        }
    }
}

fn groups(strata: &[usize]) -> Vec<Vec<usize>> {
    let n_groups = strata.iter().max().map_or(0, |m| m + 1);
    let mut out = vec![Vec::new(); n_groups];
    for (i, &s) in strata.iter().enumerate() {
        out[s].push(i);
    }
    out.retain(|g| !g.is_empty());
    out
}

/// Splits indices into (train, holdout) with each stratum's train share
/// within one sample of `train_fraction`. Both lists come back sorted.
pub fn stratified_split(
    target: &[f64],
    task: TaskKind,
    train_fraction: f64,
    rng: &mut RngStream,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::invalid("train fraction must be in (0, 1)"));
    }
    if target.is_empty() {
        return Err(Error::Empty("stratified_split target"));
    }
    let strata = strata(target, task)?;
    let mut train = Vec::new();
    let mut holdout = Vec::new();
    for mut g in groups(&strata) {
        if task == TaskKind::Classification && g.len() < 2 {
            return Err(Error::MissingClass(strata[g[0]] as u8));
        }
        rng.shuffle(&mut g);
        let n_train = libm::round(train_fraction * g.len() as f64) as usize;
        train.extend_from_slice(&g[..n_train]);
        holdout.extend_from_slice(&g[n_train..]);
    }
    train.sort_unstable();
    holdout.sort_unstable();
    Ok((train, holdout))
}

/// Assigns each sample to one of `k` folds: shuffle within each stratum,
/// then deal round-robin, continuing the dealer position across strata.
pub fn stratified_folds(
    target: &[f64],
    task: TaskKind,
    k: usize,
    rng: &mut RngStream,
) -> Result<Vec<usize>> {
    if k < 2 {
        return Err(Error::invalid("need at least 2 folds"));
    }
    if k > target.len() {
        return Err(Error::invalid(format!(
            "{k} folds requested for {} samples",
            target.len()
        )));
    }
    let strata = strata(target, task)?;
    let mut fold = vec![0; target.len()];
    let mut dealer = 0;
    for mut g in groups(&strata) {
        rng.shuffle(&mut g);
        for i in g {
            fold[i] = dealer % k;
            dealer += 1;
        }
    }
    Ok(fold)
}
