mod common;

use common::{planted, planted_artifacts, top3_hits};
use ega_core::dbna::train_dbna;
use ega_core::metrics::auc;
use ega_core::models::{fit, ModelConfig, ModelKind};
use ega_core::preprocess::MinMaxScaler;
use ega_core::{DbnaTrainConfig, Matrix, RbmTrainConfig, RngStream, TaskKind};

#[test]
fn ega_top3_recovers_informative_features() {
    let ok = (0..100)
        .filter(|&seed| {
            let (a, mask) = planted_artifacts(500, seed);
            top3_hits(&a.ega.ranking, &mask) >= 2
        })
        .count();
    assert!(ok >= 90, "{ok}/100 seeds");
}

/// Holdout AUC of a logistic model after shuffling column `col` of the
/// holdout rows.
fn shuffled_auc(x: &Matrix, y: &[f64], col: Option<usize>, seed: u64) -> f64 {
    let n = x.rows();
    let (train, test): (Vec<usize>, Vec<usize>) = (0..n).partition(|i| i % 2 == 0);
    let xt = x.select_rows(&train).unwrap();
    let yt: Vec<f64> = train.iter().map(|&i| y[i]).collect();
    let m = fit(
        ModelKind::Logistic,
        &xt,
        &yt,
        TaskKind::Classification,
        &ModelConfig::default(),
        seed,
    )
    .unwrap();
    let mut xs = x.select_rows(&test).unwrap();
    if let Some(c) = col {
        let mut values = xs.column(c);
        RngStream::new(seed).shuffle(&mut values);
        for (i, v) in values.into_iter().enumerate() {
            xs.set(i, c, v).unwrap();
        }
    }
    let ys: Vec<f64> = test.iter().map(|&i| y[i]).collect();
    auc(&m.predict(&xs).unwrap(), &ys).unwrap()
}

#[test]
fn shuffling_informative_columns_hurts_and_noise_does_not() {
    let (mut informative_drops, mut noise_stable) = (0, 0);
    for seed in 0..20 {
        let s = planted(2000, seed);
        let (x, y) = (s.dataset.features(), s.dataset.target());
        let base = shuffled_auc(x, y, None, seed);
        let inf = s.mask.iter().position(|m| *m).unwrap();
        let noise = s.mask.iter().position(|m| !*m).unwrap();
        if base - shuffled_auc(x, y, Some(inf), seed) > 0.02 {
            informative_drops += 1;
        }
        if (base - shuffled_auc(x, y, Some(noise), seed)).abs() < 0.02 {
            noise_stable += 1;
        }
    }
    assert!(informative_drops >= 18, "{informative_drops}/20");
    assert!(noise_stable >= 18, "{noise_stable}/20");
}

/// Bottom-up output error of the stack on its training data, after one
/// epoch per layer and after the full schedule.
#[test]
fn stack_output_error_falls_in_most_seeds() {
    let falling = (0..5)
        .filter(|&seed| {
            let s = planted(500, seed);
            let x = s.dataset.features();
            let unit = MinMaxScaler::fit(x).apply(x).unwrap();
            let error_after = |epochs| {
                let cfg = DbnaTrainConfig {
                    hidden_sizes: vec![5, 4],
                    rbm: RbmTrainConfig {
                        epochs,
                        ..RbmTrainConfig::classification()
                    },
                };
                let fit = train_dbna(&unit, &cfg, &RngStream::new(seed)).unwrap();
                fit.model.forward_error(&unit).unwrap()
            };
            error_after(RbmTrainConfig::classification().epochs) < error_after(1)
        })
        .count();
    assert!(falling >= 3, "{falling}/5");
}
