//! Two-sample t-test on per-fold scores and the method decision rule.
//!
//! The default test is the pooled-variance two-sample t with `2k - 2`
//! degrees of freedom. A paired variant (`k - 1` df) is available. The
//! two-sided p-value is `I_{df / (df + t^2)}(df / 2, 1 / 2)`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::dataset::TaskKind;
use crate::error::{Error, Result};
use crate::models::ModelKind;
use crate::numeric::{abs, exp, ln, mean, sample_variance, sqrt};

pub const ALPHA: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "snake_case")
)]
pub enum TTestKind {
    #[default]
    Pooled,
    Paired,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TTestResult {
    /// `+-inf` when the variance is zero but the means differ.
    #[cfg_attr(feature = "serde", serde(with = "signed_inf"))]
    pub t_statistic: f64,
    pub p_value: f64,
    pub degrees_of_freedom: usize,
    pub significant_at_5pct: bool,
}

/// JSON has no infinities; they travel as the strings "inf" / "-inf".
#[cfg(feature = "serde")]
mod signed_inf {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() {
            s.serialize_str(if *v > 0.0 { "inf" } else { "-inf" })
        } else {
            s.serialize_f64(*v)
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr<'a> {
        Num(f64),
        Str(&'a str),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Str("inf") => Ok(f64::INFINITY),
            Repr::Str("-inf") => Ok(f64::NEG_INFINITY),
            Repr::Str(other) => Err(serde::de::Error::custom(alloc::format!(
                "bad t statistic `{other}`"
            ))),
        }
    }
}

pub fn two_sample_t_test(a: &[f64], b: &[f64], kind: TTestKind) -> Result<TTestResult> {
    let k = a.len();
    if b.len() != k {
        return Err(Error::LengthMismatch {
            op: "t-test",
            expected: k,
            actual: b.len(),
        });
    }
    if k < 2 {
        return Err(Error::invalid("t-test needs at least 2 values per method"));
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("t-test input"));
    }
    let (diff, se, df) = match kind {
        TTestKind::Pooled => {
            let pooled =
                ((k - 1) as f64 * (sample_variance(a) + sample_variance(b))) / (2 * k - 2) as f64;
            (mean(a) - mean(b), sqrt(pooled * 2.0 / k as f64), 2 * k - 2)
        }
        TTestKind::Paired => {
            let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
            (mean(&d), sqrt(sample_variance(&d) / k as f64), k - 1)
        }
    };
    let (t, p) = if se == 0.0 {
        if diff == 0.0 {
            (0.0, 1.0)
        } else {
            (f64::INFINITY.copysign(diff), 0.0)
        }
    } else {
        let t = diff / se;
        (t, t_two_sided_p(t, df as f64))
    };
    Ok(TTestResult {
        t_statistic: t,
        p_value: p,
        degrees_of_freedom: df,
        significant_at_5pct: p < ALPHA,
    })
}

/// `P(|T| >= |t|)` for Student's t with `df` degrees of freedom.
pub fn t_two_sided_p(t: f64, df: f64) -> f64 {
    if t.is_infinite() {
        return 0.0;
    }
    let x = df / (df + t * t);
    regularized_incomplete_beta(x, df / 2.0, 0.5).clamp(0.0, 1.0)
}

/// `P(T <= t)`.
pub fn t_cdf(t: f64, df: f64) -> f64 {
    let tail = t_two_sided_p(t, df) / 2.0;
    if t >= 0.0 {
        1.0 - tail
    } else {
        tail
    }
}

/// `I_x(a, b)` by Lentz's continued fraction.
pub fn regularized_incomplete_beta(x: f64, a: f64, b: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front =
        libm::lgamma(a + b) - libm::lgamma(a) - libm::lgamma(b) + a * ln(x) + b * ln(1.0 - x);
    let front = exp(ln_front);
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cf(x, a, b) / a
    } else {
        1.0 - front * beta_cf(1.0 - x, b, a) / b
    }
}

fn beta_cf(x: f64, a: f64, b: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-16;
    let (qab, qap, qam) = (a + b, a + 1.0, a - 1.0);
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if abs(d) < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=500 {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if abs(d) < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if abs(c) < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if abs(d) < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if abs(c) < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if abs(del - 1.0) < EPS {
            break;
        }
    }
    h
}

/// Per-model comparison of method A (EGA) and method B (Wald).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ModelComparison {
    pub model: ModelKind,
    pub mean_a: f64,
    pub mean_b: f64,
    pub test: TTestResult,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "snake_case")
)]
pub enum Winner {
    A,
    B,
    Tie,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MethodDecision {
    pub winner: Winner,
    pub deciding_model: ModelKind,
    pub significant: bool,
    pub rationale: String,
}

/// Classification: the decision tree's mean AUC decides (higher wins).
/// Regression: the lowest mean SMAPE across linear, ridge and lasso for each
/// method decides, and the model that achieved the overall lowest value is
/// reported as deciding.
pub fn select_better_method(
    results: &[ModelComparison],
    task: TaskKind,
    label_a: &str,
    label_b: &str,
) -> Result<MethodDecision> {
    let find = |kind| results.iter().find(|r| r.model == kind);
    match task {
        TaskKind::Classification => {
            let r = find(ModelKind::Tree)
                .ok_or_else(|| Error::invalid("decision-tree results are required to choose"))?;
            let winner = compare(r.mean_a, r.mean_b, true);
            Ok(decision(winner, r, "mean AUC", label_a, label_b))
        }
        TaskKind::Regression => {
            let interp: Vec<&ModelComparison> =
                [ModelKind::Linear, ModelKind::Ridge, ModelKind::Lasso]
                    .into_iter()
                    .filter_map(find)
                    .collect();
            if interp.is_empty() {
                return Err(Error::invalid(
                    "linear, ridge or lasso results are required to choose",
                ));
            }
            let best_a = interp
                .iter()
                .min_by(|x, y| x.mean_a.total_cmp(&y.mean_a))
                .unwrap();
            let best_b = interp
                .iter()
                .min_by(|x, y| x.mean_b.total_cmp(&y.mean_b))
                .unwrap();
            let winner = compare(best_a.mean_a, best_b.mean_b, false);
            let deciding = match winner {
                Winner::B => best_b,
                _ => best_a,
            };
            let mut d = decision(winner, deciding, "lowest mean SMAPE", label_a, label_b);
            if best_a.model != best_b.model {
                d.rationale = format!(
                    "{label_a} best {} ({:.4}) vs {label_b} best {} ({:.4}) on lowest mean SMAPE; {}",
                    best_a.model,
                    best_a.mean_a,
                    best_b.model,
                    best_b.mean_b,
                    verdict(winner, label_a, label_b, deciding.test.significant_at_5pct)
                );
            }
            Ok(d)
        }
    }
}

fn compare(a: f64, b: f64, higher_better: bool) -> Winner {
    if a == b {
        Winner::Tie
    } else if (a > b) == higher_better {
        Winner::A
    } else {
        Winner::B
    }
}

fn verdict(w: Winner, label_a: &str, label_b: &str, significant: bool) -> String {
    let sig = if significant {
        "difference significant at 5%"
    } else {
        "difference not significant at 5%"
    };
    match w {
        Winner::A => format!("{label_a} selected, {sig}"),
        Winner::B => format!("{label_b} selected, {sig}"),
        Winner::Tie => String::from("means are equal; declared a tie"),
    }
}

fn decision(
    winner: Winner,
    r: &ModelComparison,
    criterion: &str,
    label_a: &str,
    label_b: &str,
) -> MethodDecision {
    MethodDecision {
        winner,
        deciding_model: r.model,
        significant: r.test.significant_at_5pct,
        rationale: format!(
            "{} {criterion}: {label_a} {:.4} vs {label_b} {:.4}; {}",
            r.model,
            r.mean_a,
            r.mean_b,
            verdict(winner, label_a, label_b, r.test.significant_at_5pct)
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_case() {
        let r = two_sample_t_test(&[1.0, 2.0, 3.0], &[3.0, 4.0, 5.0], TTestKind::Pooled).unwrap();
        assert!((r.t_statistic + sqrt(6.0)).abs() < 1e-12);
        assert_eq!(r.degrees_of_freedom, 4);
        assert!((r.p_value - 0.0705).abs() < 1e-4);
        assert!(!r.significant_at_5pct);
    }

    #[test]
    fn identical_and_degenerate() {
        let a = [0.7, 0.8, 0.9];
        let r = two_sample_t_test(&a, &a, TTestKind::Pooled).unwrap();
        assert_eq!((r.t_statistic, r.p_value), (0.0, 1.0));
        let r = two_sample_t_test(&[1.0; 4], &[2.0; 4], TTestKind::Pooled).unwrap();
        assert_eq!((r.t_statistic, r.p_value), (f64::NEG_INFINITY, 0.0));
        let r = two_sample_t_test(&[2.0; 4], &[1.0; 4], TTestKind::Pooled).unwrap();
        assert_eq!(r.t_statistic, f64::INFINITY);
    }

    #[test]
    fn ten_folds_give_eighteen_df() {
        let a: Vec<f64> = (0..10).map(|i| i as f64 * 0.1).collect();
        let b: Vec<f64> = (0..10).map(|i| (i * i % 7) as f64 * 0.1).collect();
        assert_eq!(
            two_sample_t_test(&a, &b, TTestKind::Pooled)
                .unwrap()
                .degrees_of_freedom,
            18
        );
        assert_eq!(
            two_sample_t_test(&a, &b, TTestKind::Paired)
                .unwrap()
                .degrees_of_freedom,
            9
        );
    }

    #[test]
    fn incomplete_beta_closed_forms() {
        // I_x(1, 1) = x; I_x(a, 1) = x^a
        assert!((regularized_incomplete_beta(0.3, 1.0, 1.0) - 0.3).abs() < 1e-14);
        assert!((regularized_incomplete_beta(0.6, 2.5, 1.0) - libm::pow(0.6, 2.5)).abs() < 1e-14);
        // df = 1: Cauchy, P(T <= 1) = 3/4
        assert!((t_cdf(1.0, 1.0) - 0.75).abs() < 1e-14);
        // df = 2: P(T <= t) = 1/2 + t / (2 sqrt(2 + t^2))
        assert!((t_cdf(1.3, 2.0) - (0.5 + 1.3 / (2.0 * sqrt(2.0 + 1.69)))).abs() < 1e-14);
    }

    fn cmp(model: ModelKind, a: f64, b: f64) -> ModelComparison {
        ModelComparison {
            model,
            mean_a: a,
            mean_b: b,
            test: two_sample_t_test(&[a, a + 0.01], &[b, b + 0.01], TTestKind::Pooled).unwrap(),
        }
    }

    #[test]
    fn decision_rule() {
        let d = select_better_method(
            &[cmp(ModelKind::Tree, 0.8973, 0.784)],
            TaskKind::Classification,
            "EGA",
            "Wald",
        )
        .unwrap();
        assert_eq!(d.winner, Winner::A);
        let d = select_better_method(
            &[
                cmp(ModelKind::Logistic, 0.9, 0.1),
                cmp(ModelKind::Tree, 0.6694, 0.7265),
            ],
            TaskKind::Classification,
            "EGA",
            "Wald",
        )
        .unwrap();
        assert_eq!((d.winner, d.deciding_model), (Winner::B, ModelKind::Tree));
        let d = select_better_method(
            &[cmp(ModelKind::Tree, 0.7, 0.7)],
            TaskKind::Classification,
            "EGA",
            "Wald",
        )
        .unwrap();
        assert_eq!(d.winner, Winner::Tie);
        assert!(d.rationale.contains("tie"));
        assert!(select_better_method(
            &[cmp(ModelKind::Logistic, 0.7, 0.6)],
            TaskKind::Classification,
            "EGA",
            "Wald"
        )
        .is_err());
        let d = select_better_method(
            &[
                cmp(ModelKind::Linear, 12.0, 11.0),
                cmp(ModelKind::Lasso, 10.5, 13.0),
                cmp(ModelKind::Svr, 1.0, 50.0),
            ],
            TaskKind::Regression,
            "EGA",
            "Wald",
        )
        .unwrap();
        assert_eq!((d.winner, d.deciding_model), (Winner::A, ModelKind::Lasso));
    }
}
