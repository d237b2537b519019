//! Native classifiers: CART trees, random forests, SAMME boosting and the
//! vote / stack / best-of meta-ensembles.
//!
//! Every learner is described by a serializable [`LearnerSpec`] template and
//! trained into an immutable [`Model`]. [`NativeLearner`] wraps both behind
//! the pipeline [`Learner`] trait and checks the feature schema at predict
//! time. Labels are arbitrary strings; internally they are indexed in sorted
//! order, which is also the tie-breaking order for every vote.

mod boost;
mod ensemble;
mod forest;
mod tree;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::table::FeatureTable;
use crate::transformer::Learner;

pub use boost::{AdaBoost, BoostConfig};
pub use ensemble::{EnsembleConfig, EnsembleMode};
pub use forest::{FeatureSubset, ForestConfig, RandomForest};
pub use tree::{Node, Tree, TreeConfig};

use tree::TrainSet;

/// Untrained learner template.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum LearnerSpec {
    Tree(TreeConfig),
    Forest(ForestConfig),
    Adaboost(BoostConfig),
    Ensemble(EnsembleConfig),
    /// Always predicts the most frequent training label.
    Majority,
}

impl LearnerSpec {
    pub fn kind_name(&self) -> &'static str {
        match self {
            LearnerSpec::Tree(_) => "tree",
            LearnerSpec::Forest(_) => "forest",
            LearnerSpec::Adaboost(_) => "adaboost",
            LearnerSpec::Ensemble(e) => match e.mode {
                EnsembleMode::Vote => "vote",
                EnsembleMode::Stack => "stack",
                EnsembleMode::Best => "best",
            },
            LearnerSpec::Majority => "majority",
        }
    }
}

/// Sorted class names and per-row class indices.
pub(crate) fn encode_labels(labels: &[String]) -> (Vec<String>, Vec<usize>) {
    let classes: Vec<String> = labels.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let y = labels
        .iter()
        .map(|l| classes.binary_search(l).expect("label present"))
        .collect();
    (classes, y)
}

/// Plurality over class indices; ties go to the lowest index.
pub(crate) fn vote_index(votes: impl Iterator<Item = usize>, n_classes: usize) -> usize {
    let mut counts = vec![0usize; n_classes];
    for v in votes {
        counts[v] += 1;
    }
    (0..n_classes).fold(0, |b, c| if counts[c] > counts[b] { c } else { b })
}

/// Most frequent label; ties go to the lexicographically smallest.
pub fn mode_label<'a>(labels: impl IntoIterator<Item = &'a str>) -> Option<String> {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for l in labels {
        *counts.entry(l).or_default() += 1;
    }
    let mut best: Option<(&str, usize)> = None;
    for (l, c) in counts {
        if best.is_none_or(|(_, bc)| c > bc) {
            best = Some((l, c));
        }
    }
    best.map(|(l, _)| l.to_string())
}

/// A trained classifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Model {
    Tree {
        classes: Vec<String>,
        tree: Tree,
    },
    Forest {
        classes: Vec<String>,
        forest: RandomForest,
    },
    Adaboost {
        classes: Vec<String>,
        boost: AdaBoost,
    },
    Majority {
        label: String,
    },
    Vote {
        members: Vec<Model>,
    },
    Stack {
        members: Vec<Model>,
        /// One-hot layout of the meta features: output classes per member.
        member_classes: Vec<Vec<String>>,
        meta: Box<Model>,
    },
    Best {
        index: usize,
        model: Box<Model>,
    },
}

impl Model {
    pub fn train(spec: &LearnerSpec, rows: &[Vec<f64>], labels: &[String]) -> Result<Model> {
        if rows.is_empty() {
            return Err(Error::EmptyInput);
        }
        if rows.len() != labels.len() {
            return Err(Error::LengthMismatch {
                left: rows.len(),
                right: labels.len(),
            });
        }
        let width = rows[0].len();
        if rows.iter().any(|r| r.len() != width) {
            return Err(Error::Schema("rows have differing widths".into()));
        }
        let (classes, y) = encode_labels(labels);
        let data = TrainSet {
            rows,
            y: &y,
            n_classes: classes.len(),
        };
        match spec {
            LearnerSpec::Tree(cfg) => {
                cfg.validate()?;
                let tree = tree::grow(&data, &vec![1.0; rows.len()], *cfg, usize::MAX, None);
                Ok(Model::Tree { classes, tree })
            }
            LearnerSpec::Forest(cfg) => Ok(Model::Forest {
                forest: RandomForest::train(&data, cfg)?,
                classes,
            }),
            LearnerSpec::Adaboost(cfg) => Ok(Model::Adaboost {
                boost: AdaBoost::train(&data, cfg)?,
                classes,
            }),
            LearnerSpec::Majority => Ok(Model::Majority {
                label: mode_label(labels.iter().map(String::as_str)).expect("non-empty"),
            }),
            LearnerSpec::Ensemble(cfg) => ensemble::train(cfg, rows, labels),
        }
    }

    pub fn predict_row(&self, row: &[f64]) -> String {
        match self {
            Model::Tree { classes, tree } => classes[tree.predict_row(row)].clone(),
            Model::Forest { classes, forest } => classes[forest.predict_row(row, classes.len())].clone(),
            Model::Adaboost { classes, boost } => classes[boost.predict_row(row, classes.len())].clone(),
            Model::Majority { label } => label.clone(),
            Model::Vote { members } => {
                let votes: Vec<String> = members.iter().map(|m| m.predict_row(row)).collect();
                mode_label(votes.iter().map(String::as_str)).expect("ensembles have members")
            }
            Model::Stack {
                members,
                member_classes,
                meta,
            } => meta.predict_row(&ensemble::stack_features(members, member_classes, row)),
            Model::Best { model, .. } => model.predict_row(row),
        }
    }

    pub fn predict_rows(&self, rows: &[Vec<f64>]) -> Vec<String> {
        rows.iter().map(|r| self.predict_row(r)).collect()
    }

    /// Labels this model can emit, sorted.
    pub fn classes(&self) -> Vec<String> {
        match self {
            Model::Tree { classes, .. } | Model::Forest { classes, .. } | Model::Adaboost { classes, .. } => {
                classes.clone()
            }
            Model::Majority { label } => vec![label.clone()],
            Model::Vote { members } => members
                .iter()
                .flat_map(Model::classes)
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect(),
            Model::Stack { meta, .. } => meta.classes(),
            Model::Best { model, .. } => model.classes(),
        }
    }

    /// Structural checks after deserialization.
    pub fn validate(&self, n_features: usize) -> Result<()> {
        match self {
            Model::Tree { classes, tree } => tree.validate(classes.len(), n_features),
            Model::Forest { classes, forest } => forest.validate(classes.len(), n_features),
            Model::Adaboost { classes, boost } => boost.validate(classes.len(), n_features),
            Model::Majority { .. } => Ok(()),
            Model::Vote { members } if members.is_empty() => Err(Error::Format("vote ensemble has no members".into())),
            Model::Vote { members } => members.iter().try_for_each(|m| m.validate(n_features)),
            Model::Stack {
                members,
                member_classes,
                meta,
            } => {
                if members.len() != member_classes.len() {
                    return Err(Error::Format("stack layout does not match members".into()));
                }
                members.iter().try_for_each(|m| m.validate(n_features))?;
                meta.validate(member_classes.iter().map(Vec::len).sum())
            }
            Model::Best { model, .. } => model.validate(n_features),
        }
    }
}

/// A trained model together with the feature names it was trained on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedModel {
    pub features: Vec<String>,
    pub model: Model,
}

impl FittedModel {
    pub fn predict(&self, table: &FeatureTable) -> Result<Vec<String>> {
        if table.names() != self.features.as_slice() {
            return Err(Error::Schema(format!(
                "model expects features {:?}, got {:?}",
                self.features,
                table.names()
            )));
        }
        if table.nrows() == 0 {
            return Ok(Vec::new());
        }
        Ok(self.model.predict_rows(&table.numeric_rows()?))
    }
}

/// Pipeline adapter for the native learners.
#[derive(Debug, Clone)]
pub struct NativeLearner {
    name: String,
    spec: LearnerSpec,
    fitted: Option<Arc<FittedModel>>,
}

impl NativeLearner {
    pub fn new(spec: LearnerSpec) -> Self {
        NativeLearner {
            name: spec.kind_name().to_string(),
            spec,
            fitted: None,
        }
    }

    pub fn named(name: impl Into<String>, spec: LearnerSpec) -> Self {
        NativeLearner {
            name: name.into(),
            spec,
            fitted: None,
        }
    }

    pub fn from_fitted(name: impl Into<String>, spec: LearnerSpec, fitted: FittedModel) -> Self {
        NativeLearner {
            name: name.into(),
            spec,
            fitted: Some(Arc::new(fitted)),
        }
    }

    pub fn spec(&self) -> &LearnerSpec {
        &self.spec
    }

    pub fn fitted(&self) -> Option<&FittedModel> {
        self.fitted.as_deref()
    }

    /// Typed counterpart of [`Learner::fit`].
    pub fn train(&self, features: &FeatureTable, labels: &[String]) -> Result<NativeLearner> {
        if features.nrows() == 0 {
            return Err(Error::EmptyInput);
        }
        if features.nrows() != labels.len() {
            return Err(Error::LengthMismatch {
                left: features.nrows(),
                right: labels.len(),
            });
        }
        let model = Model::train(&self.spec, &features.numeric_rows()?, labels)?;
        Ok(NativeLearner {
            name: self.name.clone(),
            spec: self.spec.clone(),
            fitted: Some(Arc::new(FittedModel {
                features: features.names().to_vec(),
                model,
            })),
        })
    }
}

impl Learner for NativeLearner {
    fn name(&self) -> &str {
        &self.name
    }

    fn is_fitted(&self) -> bool {
        self.fitted.is_some()
    }

    fn fit(&self, features: &FeatureTable, labels: &[String]) -> Result<Box<dyn Learner>> {
        Ok(Box::new(self.train(features, labels)?))
    }

    fn predict(&self, features: &FeatureTable) -> Result<Vec<String>> {
        self.fitted
            .as_ref()
            .ok_or_else(|| Error::NotFitted(self.name.clone()))?
            .predict(features)
    }

    fn clone_box(&self) -> Box<dyn Learner> {
        Box::new(self.clone())
    }
}

pub fn train_tree(x: &FeatureTable, y: &[String], cfg: TreeConfig) -> Result<NativeLearner> {
    NativeLearner::new(LearnerSpec::Tree(cfg)).train(x, y)
}

pub fn train_forest(x: &FeatureTable, y: &[String], cfg: ForestConfig) -> Result<NativeLearner> {
    NativeLearner::new(LearnerSpec::Forest(cfg)).train(x, y)
}

pub fn train_adaboost(x: &FeatureTable, y: &[String], cfg: BoostConfig) -> Result<NativeLearner> {
    NativeLearner::new(LearnerSpec::Adaboost(cfg)).train(x, y)
}

pub fn ensemble_train(x: &FeatureTable, y: &[String], cfg: EnsembleConfig) -> Result<NativeLearner> {
    NativeLearner::new(LearnerSpec::Ensemble(cfg)).train(x, y)
}

pub fn predict(learner: &NativeLearner, x: &FeatureTable) -> Result<Vec<String>> {
    Learner::predict(learner, x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_breaks_ties_lexicographically() {
        assert_eq!(mode_label(["a", "a", "b"]).unwrap(), "a");
        assert_eq!(mode_label(["b", "a"]).unwrap(), "a");
        assert_eq!(mode_label(["c", "b", "c", "b"]).unwrap(), "b");
        assert!(mode_label([]).is_none());
    }

    #[test]
    fn spec_json_shape() {
        let spec: LearnerSpec = serde_json::from_str(r#"{"type":"forest","num_trees":500}"#).unwrap();
        match spec {
            LearnerSpec::Forest(cfg) => {
                assert_eq!(cfg.num_trees, 500);
                assert!(cfg.bootstrap);
            }
            other => panic!("{other:?}"),
        }
        let spec: LearnerSpec = serde_json::from_str(
            r#"{"type":"ensemble","mode":"vote","members":[{"type":"tree"},{"type":"majority"}]}"#,
        )
        .unwrap();
        assert_eq!(spec.kind_name(), "vote");
    }

    fn labels(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn line() -> (Vec<Vec<f64>>, Vec<String>) {
        let rows: Vec<Vec<f64>> = (-5..5).map(|i| vec![i as f64]).collect();
        let y = rows
            .iter()
            .map(|r| if r[0] < 0.0 { "a" } else { "b" }.to_string())
            .collect();
        (rows, y)
    }

    #[test]
    fn degenerate_forest_is_a_tree() {
        let rows: Vec<Vec<f64>> = (0..30).map(|i| vec![(i * 7 % 13) as f64, (i % 5) as f64]).collect();
        let y: Vec<String> = (0..30).map(|i| ["x", "y", "z"][i * 11 % 3].to_string()).collect();
        let tree = Model::train(&LearnerSpec::Tree(TreeConfig::default()), &rows, &y).unwrap();
        let forest = Model::train(
            &LearnerSpec::Forest(ForestConfig {
                num_trees: 1,
                bootstrap: false,
                feature_subset: FeatureSubset::All,
                ..Default::default()
            }),
            &rows,
            &y,
        )
        .unwrap();
        assert_eq!(tree.predict_rows(&rows), forest.predict_rows(&rows));
    }

    #[test]
    fn boosting_beats_a_stump_on_xor() {
        let mut rows = Vec::new();
        let mut y = Vec::new();
        let mut push = |n: usize, x: f64, z: f64, label: &str| {
            for i in 0..n {
                let j = i as f64 * 0.01;
                rows.push(vec![x + j, z - j]);
                y.push(label.to_string());
            }
        };
        push(40, 1.0, 1.0, "a");
        push(10, -1.0, -1.0, "a");
        push(25, 1.0, -1.0, "b");
        push(25, -1.0, 1.0, "b");
        let acc = |m: &Model| m.predict_rows(&rows).iter().zip(&y).filter(|(p, t)| p == t).count() as f64 / 100.0;
        let stump = Model::train(&LearnerSpec::Tree(TreeConfig::stump()), &rows, &y).unwrap();
        let boost = Model::train(&LearnerSpec::Adaboost(BoostConfig::default()), &rows, &y).unwrap();
        assert!(acc(&boost) > acc(&stump), "{} vs {}", acc(&boost), acc(&stump));
        if let Model::Adaboost { boost, .. } = &boost {
            assert!(boost.stage_weights().iter().all(|a| a.is_finite() && *a > 0.0));
        }
    }

    #[test]
    fn boosting_stops_on_perfect_stump() {
        let (rows, y) = line();
        let spec = LearnerSpec::Adaboost(BoostConfig {
            num_iterations: 1,
            seed: 0,
        });
        let m = Model::train(&spec, &rows, &y).unwrap();
        assert_eq!(m.predict_rows(&rows), y);
        let single = Model::train(&spec, &rows, &labels(&["a"; 10]));
        assert!(matches!(single, Err(Error::DegenerateLabels(_))));
    }

    #[test]
    fn best_prefers_the_strong_member() {
        let (rows, y) = line();
        let cfg = EnsembleConfig::new(
            EnsembleMode::Best,
            vec![LearnerSpec::Majority, LearnerSpec::Tree(TreeConfig::default())],
        );
        match Model::train(&LearnerSpec::Ensemble(cfg), &rows, &y).unwrap() {
            Model::Best { index, .. } => assert_eq!(index, 1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn vote_and_stack_on_separable_data() {
        let (rows, y) = line();
        let members = vec![
            LearnerSpec::Tree(TreeConfig::default()),
            LearnerSpec::Forest(ForestConfig::with_trees(5, 1)),
            LearnerSpec::Majority,
        ];
        let vote = Model::train(
            &LearnerSpec::Ensemble(EnsembleConfig::new(EnsembleMode::Vote, members.clone())),
            &rows,
            &y,
        )
        .unwrap();
        assert_eq!(vote.predict_rows(&rows), y);
        let stack = Model::train(
            &LearnerSpec::Ensemble(EnsembleConfig::new(EnsembleMode::Stack, members)),
            &rows,
            &y,
        )
        .unwrap();
        assert!(stack.validate(1).is_ok());
        assert_eq!(stack.predict_rows(&rows).len(), rows.len());
    }

    #[test]
    fn learner_checks_schema_and_handles_empty_input() {
        let (rows, y) = line();
        let x = FeatureTable::from_rows(vec!["x".into()], &rows, None).unwrap();
        let fitted = train_tree(&x, &y, TreeConfig::default()).unwrap();
        assert_eq!(predict(&fitted, &x).unwrap(), y);
        let renamed = FeatureTable::from_rows(vec!["z".into()], &rows, None).unwrap();
        assert!(matches!(predict(&fitted, &renamed), Err(Error::Schema(_))));
        let empty = FeatureTable::from_rows(vec!["x".into()], &[], None).unwrap();
        assert!(predict(&fitted, &empty).unwrap().is_empty());
        assert!(matches!(
            predict(&NativeLearner::new(LearnerSpec::Majority), &x),
            Err(Error::NotFitted(_))
        ));
    }
}
