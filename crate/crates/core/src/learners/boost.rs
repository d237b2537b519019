//! SAMME multiclass boosting over decision stumps.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::tree::{grow, TrainSet, Tree, TreeConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BoostConfig {
    pub num_iterations: usize,
    /// Recorded for reproducibility; weighted stump fitting itself draws no
    /// random numbers.
    pub seed: u64,
}

impl Default for BoostConfig {
    fn default() -> Self {
        BoostConfig {
            num_iterations: 20,
            seed: 0,
        }
    }
}

/// Stage weight floor for a stump with zero weighted error.
const MIN_ERROR: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaBoost {
    stumps: Vec<Tree>,
    alphas: Vec<f64>,
    /// Prediction when no stage was retained.
    prior: usize,
}

impl AdaBoost {
    pub(crate) fn train(data: &TrainSet<'_>, cfg: &BoostConfig) -> Result<Self> {
        if cfg.num_iterations == 0 {
            return Err(Error::Config("num_iterations must be at least 1".into()));
        }
        let k = data.n_classes;
        let present = {
            let mut seen = vec![false; k];
            data.y.iter().for_each(|&c| seen[c] = true);
            seen.iter().filter(|s| **s).count()
        };
        if present < 2 {
            return Err(Error::DegenerateLabels("boosting needs at least two classes".into()));
        }
        let n = data.rows.len();
        let mut w = vec![1.0 / n as f64; n];
        let mut stumps = Vec::new();
        let mut alphas = Vec::new();
        let chance = 1.0 - 1.0 / k as f64;
        let log_k1 = ((k - 1) as f64).ln();

        let mut prior_counts = vec![0.0; k];
        data.y.iter().for_each(|&c| prior_counts[c] += 1.0);
        let prior = (0..k).fold(0, |b, c| if prior_counts[c] > prior_counts[b] { c } else { b });

        for _ in 0..cfg.num_iterations {
            let stump = grow(data, &w, TreeConfig::stump(), usize::MAX, None);
            let miss: Vec<bool> = data
                .rows
                .iter()
                .zip(data.y)
                .map(|(r, &c)| stump.predict_row(r) != c)
                .collect();
            let total: f64 = w.iter().sum();
            let err: f64 = w.iter().zip(&miss).filter(|(_, m)| **m).map(|(w, _)| *w).sum::<f64>() / total;
            if err >= chance {
                break;
            }
            if err <= MIN_ERROR {
                stumps.push(stump);
                alphas.push(((1.0 - MIN_ERROR) / MIN_ERROR).ln() + log_k1);
                break;
            }
            let alpha = ((1.0 - err) / err).ln() + log_k1;
            for (wi, m) in w.iter_mut().zip(&miss) {
                if *m {
                    *wi *= alpha.exp();
                }
            }
            let s: f64 = w.iter().sum();
            w.iter_mut().for_each(|x| *x /= s);
            stumps.push(stump);
            alphas.push(alpha);
        }
        Ok(AdaBoost { stumps, alphas, prior })
    }

    pub fn stage_weights(&self) -> &[f64] {
        &self.alphas
    }

    pub fn stumps(&self) -> &[Tree] {
        &self.stumps
    }

    /// Class with the largest summed stage weight; ties go to the lowest
    /// index.
    pub fn predict_row(&self, row: &[f64], n_classes: usize) -> usize {
        if self.stumps.is_empty() {
            return self.prior;
        }
        let mut score = vec![0.0; n_classes];
        for (s, a) in self.stumps.iter().zip(&self.alphas) {
            score[s.predict_row(row)] += a;
        }
        (0..n_classes).fold(0, |b, c| if score[c] > score[b] { c } else { b })
    }

    pub(crate) fn validate(&self, n_classes: usize, n_features: usize) -> Result<()> {
        if self.stumps.len() != self.alphas.len() || self.prior >= n_classes {
            return Err(Error::Format("boosted model is malformed".into()));
        }
        self.stumps.iter().try_for_each(|t| t.validate(n_classes, n_features))
    }
}
