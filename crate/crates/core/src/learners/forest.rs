use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

use super::tree::{grow, TrainSet, Tree, TreeConfig};
use super::vote_index;

/// Candidate features per split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum FeatureSubset {
    #[default]
    Sqrt,
    All,
    #[serde(untagged)]
    Count(usize),
}

impl FeatureSubset {
    pub fn resolve(&self, n_features: usize) -> usize {
        match self {
            FeatureSubset::Sqrt => ((n_features as f64).sqrt() as usize).max(1),
            FeatureSubset::All => n_features,
            FeatureSubset::Count(k) => (*k).clamp(1, n_features.max(1)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ForestConfig {
    pub num_trees: usize,
    pub feature_subset: FeatureSubset,
    pub bootstrap: bool,
    pub seed: u64,
    pub tree: TreeConfig,
    /// Train trees on the rayon pool.
    pub parallel: bool,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig {
            num_trees: 75,
            feature_subset: FeatureSubset::Sqrt,
            bootstrap: true,
            seed: 0,
            tree: TreeConfig::default(),
            parallel: true,
        }
    }
}

impl ForestConfig {
    pub fn with_trees(num_trees: usize, seed: u64) -> Self {
        ForestConfig {
            num_trees,
            seed,
            ..Default::default()
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.num_trees == 0 {
            return Err(Error::Config("num_trees must be at least 1".into()));
        }
        self.tree.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    pub(crate) trees: Vec<Tree>,
}

impl RandomForest {
    /// Tree `t` draws from its own generator seeded by `derive(seed, t)`,
    /// so the result does not depend on scheduling.
    pub(crate) fn train(data: &TrainSet<'_>, cfg: &ForestConfig) -> Result<Self> {
        cfg.validate()?;
        let n = data.rows.len();
        let max_features = cfg.feature_subset.resolve(data.n_features());
        let one_tree = |t: usize| {
            let mut r = rng::rng(rng::derive(cfg.seed, t as u64));
            let weights = if cfg.bootstrap {
                let mut w = vec![0.0; n];
                for _ in 0..n {
                    w[r.random_range(0..n)] += 1.0;
                }
                w
            } else {
                vec![1.0; n]
            };
            grow(data, &weights, cfg.tree, max_features, Some(&mut r))
        };
        let trees = if cfg.parallel {
            (0..cfg.num_trees).into_par_iter().map(one_tree).collect()
        } else {
            (0..cfg.num_trees).map(one_tree).collect()
        };
        Ok(RandomForest { trees })
    }

    pub fn trees(&self) -> &[Tree] {
        &self.trees
    }

    /// Plurality vote; ties go to the lowest class index.
    pub fn predict_row(&self, row: &[f64], n_classes: usize) -> usize {
        vote_index(self.trees.iter().map(|t| t.predict_row(row)), n_classes)
    }

    pub(crate) fn validate(&self, n_classes: usize, n_features: usize) -> Result<()> {
        if self.trees.is_empty() {
            return Err(Error::Format("forest has no trees".into()));
        }
        self.trees.iter().try_for_each(|t| t.validate(n_classes, n_features))
    }
}
