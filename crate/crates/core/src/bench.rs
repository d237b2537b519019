//! Seeded holdout evaluation and the model-comparison harness.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{ColumnImputer, OneHotEncoder, StandardScaler};
use crate::learners::{LearnerSpec, NativeLearner};
use crate::rng;
use crate::stats;
use crate::table::FeatureTable;
use crate::transformer::{Data, Pipeline, Transformer};

/// Seeded split of `0..n` into sorted `(train, test)` index sets with
/// `round(n * fraction)` test rows, clamped so both sides are non-empty.
pub fn holdout(n: usize, fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if n < 2 {
        return Err(Error::InsufficientData(format!(
            "holdout needs at least 2 rows, got {n}"
        )));
    }
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::Config(format!(
            "holdout fraction must lie in (0,1), got {fraction}"
        )));
    }
    let test_n = ((n as f64 * fraction).round() as usize).clamp(1, n - 1);
    let mut test = rand::seq::index::sample(&mut rng::rng(seed), n, test_n).into_vec();
    test.sort_unstable();
    let mut is_test = vec![false; n];
    test.iter().for_each(|&i| is_test[i] = true);
    let train = (0..n).filter(|&i| !is_test[i]).collect();
    Ok((train, test))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Accuracy,
    MeanFscore,
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Accuracy => "accuracy",
            Metric::MeanFscore => "mean_fscore",
        })
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "accuracy" => Ok(Metric::Accuracy),
            "mean_fscore" | "fscore" => Ok(Metric::MeanFscore),
            other => Err(Error::Config(format!("unknown metric {other:?}"))),
        }
    }
}

pub fn accuracy(actual: &[String], predicted: &[String]) -> Result<f64> {
    score(Metric::Accuracy, actual, predicted)
}

pub fn mean_fscore(actual: &[String], predicted: &[String]) -> Result<f64> {
    score(Metric::MeanFscore, actual, predicted)
}

/// Mean F1 is taken over the classes that occur in `actual`; a class with
/// zero precision and recall contributes 0.
pub fn score(metric: Metric, actual: &[String], predicted: &[String]) -> Result<f64> {
    if actual.len() != predicted.len() {
        return Err(Error::LengthMismatch {
            left: actual.len(),
            right: predicted.len(),
        });
    }
    if actual.is_empty() {
        return Err(Error::EmptyInput);
    }
    let pairs = || actual.iter().zip(predicted);
    Ok(match metric {
        Metric::Accuracy => pairs().filter(|(a, p)| a == p).count() as f64 / actual.len() as f64,
        Metric::MeanFscore => {
            let classes: BTreeSet<&String> = actual.iter().collect();
            let total: f64 = classes
                .iter()
                .map(|&c| {
                    let tp = pairs().filter(|(a, p)| *a == c && *p == c).count() as f64;
                    let pred_c = predicted.iter().filter(|p| *p == c).count() as f64;
                    let act_c = actual.iter().filter(|a| *a == c).count() as f64;
                    let precision = if pred_c > 0.0 { tp / pred_c } else { 0.0 };
                    let recall = tp / act_c;
                    if precision + recall > 0.0 {
                        2.0 * precision * recall / (precision + recall)
                    } else {
                        0.0
                    }
                })
                .sum();
            total / classes.len() as f64
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedRule {
    /// `seed_i = 3 * i` for 1-based trial `i`.
    TimesThree,
    /// `seed_i = derive(base, i)`.
    Mixed(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialPlan {
    pub trials: usize,
    pub test_fraction: f64,
    pub seed_rule: SeedRule,
}

impl Default for TrialPlan {
    fn default() -> Self {
        TrialPlan {
            trials: 3,
            test_fraction: 0.2,
            seed_rule: SeedRule::TimesThree,
        }
    }
}

impl TrialPlan {
    pub fn new(trials: usize, test_fraction: f64, seed_rule: SeedRule) -> Self {
        TrialPlan {
            trials,
            test_fraction,
            seed_rule,
        }
    }

    /// Seed of 1-based trial `i`.
    pub fn trial_seed(&self, i: usize) -> u64 {
        match self.seed_rule {
            SeedRule::TimesThree => 3 * i as u64,
            SeedRule::Mixed(base) => rng::derive(base, i as u64),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return Err(Error::Config(format!(
                "test fraction must lie in (0,1), got {}",
                self.test_fraction
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub model: String,
    pub mean: f64,
    pub std: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellFailure {
    pub model: String,
    pub trial: usize,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchmarkReport {
    pub metric: Metric,
    /// Sorted by mean, descending; models without a completed trial last.
    pub rows: Vec<ReportRow>,
    pub failures: Vec<CellFailure>,
}

impl BenchmarkReport {
    pub fn row(&self, model: &str) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.model == model)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("model,mean,std,n\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{},{}\n", csv_field(&r.model), r.mean, r.std, r.n));
        }
        out
    }

    pub fn to_text(&self) -> String {
        let width = self.rows.iter().map(|r| r.model.len()).chain([5]).max().unwrap_or(5);
        let mut out = format!("{:<width$}  {:>8}  {:>8}  {:>4}\n", "model", "mean", "std", "n");
        for r in &self.rows {
            out.push_str(&format!(
                "{:<width$}  {:>8.4}  {:>8.4}  {:>4}\n",
                r.model, r.mean, r.std, r.n
            ));
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// The evaluation pipeline: one-hot, median impute, scale, then the learner.
pub fn predict_pipeline(name: &str, spec: &LearnerSpec) -> Pipeline {
    Pipeline::new(vec![
        Transformer::filter(OneHotEncoder::new()),
        Transformer::filter(ColumnImputer::new()),
        Transformer::filter(StandardScaler::new()),
        Transformer::learner(NativeLearner::named(name, spec.clone())),
    ])
    .expect("valid stage order")
}

fn run_cell(
    name: &str,
    spec: &LearnerSpec,
    data: &FeatureTable,
    labels: &[String],
    split: &(Vec<usize>, Vec<usize>),
    metric: Metric,
) -> Result<f64> {
    let (train, test) = split;
    let x_train = data.select_rows(train).without_labels();
    let y_train: Vec<String> = train.iter().map(|&i| labels[i].clone()).collect();
    let x_test = data.select_rows(test).without_labels();
    let y_test: Vec<String> = test.iter().map(|&i| labels[i].clone()).collect();
    let fitted = predict_pipeline(name, spec).fit(&Data::Table(x_train), Some(&y_train))?;
    let predicted = fitted.transform(&Data::Table(x_test))?.into_labels()?;
    score(metric, &y_test, &predicted)
}

/// Evaluates every registry entry on every trial split. Each trial is split
/// once and shared by all models; cells are independent, so the parallel
/// and sequential runs produce the same report.
pub fn run_benchmark(
    registry: &[(String, LearnerSpec)],
    data: &FeatureTable,
    plan: &TrialPlan,
    metric: Metric,
    parallel: bool,
) -> Result<BenchmarkReport> {
    if registry.is_empty() {
        return Err(Error::Config("learner registry is empty".into()));
    }
    plan.validate()?;
    let labels = data.labels().ok_or(Error::MissingLabels)?.to_vec();
    let splits = (1..=plan.trials)
        .map(|i| holdout(data.nrows(), plan.test_fraction, plan.trial_seed(i)))
        .collect::<Result<Vec<_>>>()?;
    let cells: Vec<(usize, usize)> = (0..plan.trials)
        .flat_map(|t| (0..registry.len()).map(move |m| (t, m)))
        .collect();
    let eval = |&(t, m): &(usize, usize)| {
        let (name, spec) = &registry[m];
        run_cell(name, spec, data, &labels, &splits[t], metric)
    };
    let results: Vec<Result<f64>> = if parallel {
        cells.par_iter().map(eval).collect()
    } else {
        cells.iter().map(eval).collect()
    };

    let mut scores = vec![Vec::new(); registry.len()];
    let mut failures = Vec::new();
    for (&(t, m), r) in cells.iter().zip(results) {
        match r {
            Ok(s) => scores[m].push(s),
            Err(e) => failures.push(CellFailure {
                model: registry[m].0.clone(),
                trial: t + 1,
                error: e.to_string(),
            }),
        }
    }
    let mut rows: Vec<ReportRow> = registry
        .iter()
        .zip(&scores)
        .map(|((name, _), s)| ReportRow {
            model: name.clone(),
            mean: if s.is_empty() { f64::NAN } else { stats::mean(s) },
            std: if s.len() < 2 { 0.0 } else { stats::sample_std(s) },
            n: s.len(),
        })
        .collect();
    rows.sort_by(|a, b| match (a.mean.is_nan(), b.mean.is_nan()) {
        (false, false) => b.mean.total_cmp(&a.mean),
        (x, y) => x.cmp(&y),
    });
    Ok(BenchmarkReport { metric, rows, failures })
}
