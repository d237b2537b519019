use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::bench::holdout;
use crate::error::{Error, Result};
use crate::rng;

use super::{encode_labels, ForestConfig, LearnerSpec, Model, RandomForest};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum EnsembleMode {
    #[default]
    Vote,
    Stack,
    Best,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EnsembleConfig {
    pub members: Vec<LearnerSpec>,
    pub mode: EnsembleMode,
    pub stack_holdout: f64,
    pub best_folds: usize,
    pub seed: u64,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        EnsembleConfig {
            members: Vec::new(),
            mode: EnsembleMode::Vote,
            stack_holdout: 0.3,
            best_folds: 3,
            seed: 0,
        }
    }
}

impl EnsembleConfig {
    pub fn new(mode: EnsembleMode, members: Vec<LearnerSpec>) -> Self {
        EnsembleConfig {
            members,
            mode,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.members.is_empty() {
            return Err(Error::Config("ensemble needs at least one member".into()));
        }
        if !(self.stack_holdout > 0.0 && self.stack_holdout < 1.0) {
            return Err(Error::Config(format!(
                "stack_holdout must lie in (0,1), got {}",
                self.stack_holdout
            )));
        }
        if self.best_folds < 2 {
            return Err(Error::Config("best_folds must be at least 2".into()));
        }
        Ok(())
    }
}

const META_TREES: usize = 50;

fn subset<T: Clone>(items: &[T], idx: &[usize]) -> Vec<T> {
    idx.iter().map(|&i| items[i].clone()).collect()
}

pub(super) fn train(cfg: &EnsembleConfig, rows: &[Vec<f64>], labels: &[String]) -> Result<Model> {
    cfg.validate()?;
    match cfg.mode {
        EnsembleMode::Vote => Ok(Model::Vote {
            members: cfg
                .members
                .iter()
                .map(|m| Model::train(m, rows, labels))
                .collect::<Result<_>>()?,
        }),
        EnsembleMode::Stack => train_stack(cfg, rows, labels),
        EnsembleMode::Best => train_best(cfg, rows, labels),
    }
}

/// Member predictions one-hot encoded over each member's output classes.
pub(super) fn stack_features(members: &[Model], member_classes: &[Vec<String>], row: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(member_classes.iter().map(Vec::len).sum());
    for (m, classes) in members.iter().zip(member_classes) {
        let p = m.predict_row(row);
        out.extend(classes.iter().map(|c| if *c == p { 1.0 } else { 0.0 }));
    }
    out
}

fn train_stack(cfg: &EnsembleConfig, rows: &[Vec<f64>], labels: &[String]) -> Result<Model> {
    let (fit_idx, meta_idx) = holdout(rows.len(), cfg.stack_holdout, cfg.seed)?;
    let fit_rows = subset(rows, &fit_idx);
    let fit_labels = subset(labels, &fit_idx);
    let members: Vec<Model> = cfg
        .members
        .iter()
        .map(|m| Model::train(m, &fit_rows, &fit_labels))
        .collect::<Result<_>>()?;
    let member_classes: Vec<Vec<String>> = members.iter().map(Model::classes).collect();
    let meta_rows: Vec<Vec<f64>> = meta_idx
        .iter()
        .map(|&i| stack_features(&members, &member_classes, &rows[i]))
        .collect();
    let meta_labels = subset(labels, &meta_idx);
    let (classes, y) = encode_labels(&meta_labels);
    let forest_cfg = ForestConfig {
        num_trees: META_TREES,
        seed: rng::derive(cfg.seed, 1),
        ..Default::default()
    };
    let data = super::TrainSet {
        rows: &meta_rows,
        y: &y,
        n_classes: classes.len(),
    };
    let forest = RandomForest::train(&data, &forest_cfg)?;
    Ok(Model::Stack {
        members,
        member_classes,
        meta: Box::new(Model::Forest { classes, forest }),
    })
}

/// Pooled k-fold accuracy per member; a member that fails to train on a
/// fold scores zero on that fold.
pub(super) fn cross_validate(cfg: &EnsembleConfig, rows: &[Vec<f64>], labels: &[String]) -> Result<Vec<f64>> {
    let n = rows.len();
    if n < 2 {
        return Err(Error::InsufficientData(
            "cross-validation needs at least two rows".into(),
        ));
    }
    let folds = cfg.best_folds.min(n);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng::rng(cfg.seed));
    let mut correct = vec![0usize; cfg.members.len()];
    for f in 0..folds {
        let (mut tr, mut te) = (Vec::new(), Vec::new());
        for (pos, &i) in order.iter().enumerate() {
            if pos % folds == f {
                te.push(i)
            } else {
                tr.push(i)
            }
        }
        let tr_rows = subset(rows, &tr);
        let tr_labels = subset(labels, &tr);
        for (m, spec) in cfg.members.iter().enumerate() {
            match Model::train(spec, &tr_rows, &tr_labels) {
                Ok(model) => correct[m] += te.iter().filter(|&&i| model.predict_row(&rows[i]) == labels[i]).count(),
                Err(e) => log::debug!("member {m} failed on fold {f}: {e}"),
            }
        }
    }
    Ok(correct.into_iter().map(|c| c as f64 / n as f64).collect())
}

fn train_best(cfg: &EnsembleConfig, rows: &[Vec<f64>], labels: &[String]) -> Result<Model> {
    let acc = cross_validate(cfg, rows, labels)?;
    let index = (0..acc.len()).fold(0, |b, m| if acc[m] > acc[b] { m } else { b });
    Ok(Model::Best {
        index,
        model: Box::new(Model::train(&cfg.members[index], rows, labels)?),
    })
}
