//! CART classification trees with Gini splits and purity-based pruning.

use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TreeConfig {
    /// `None` grows until leaves are pure or too small to split.
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    /// Sibling leaves whose merged majority share reaches this value are
    /// merged; 1.0 disables pruning, 0.0 collapses the tree to one leaf.
    pub prune_purity: f64,
}

impl Default for TreeConfig {
    fn default() -> Self {
        TreeConfig {
            max_depth: None,
            min_samples_leaf: 1,
            prune_purity: 1.0,
        }
    }
}

impl TreeConfig {
    pub fn stump() -> Self {
        TreeConfig {
            max_depth: Some(1),
            ..Default::default()
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.max_depth == Some(0) {
            return Err(Error::Config("max_depth must be at least 1".into()));
        }
        if self.min_samples_leaf == 0 {
            return Err(Error::Config("min_samples_leaf must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.prune_purity) {
            return Err(Error::Config("prune_purity must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "lowercase")]
pub enum Node {
    Leaf {
        class: usize,
        counts: Vec<f64>,
    },
    /// Rows with `x[feature] <= threshold` go left; everything else,
    /// including NaN, goes right.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

/// Flat node arena; the root is node 0. Class indices refer to the owning
/// model's sorted class list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    nodes: Vec<Node>,
}

impl Tree {
    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], i: usize) -> usize {
            match &nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf { .. })).count()
    }

    pub fn predict_row(&self, row: &[f64]) -> usize {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf { class, .. } => return *class,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    i = if row.get(*feature).is_some_and(|x| *x <= *threshold) {
                        *left
                    } else {
                        *right
                    };
                }
            }
        }
    }

    pub(crate) fn validate(&self, n_classes: usize, n_features: usize) -> Result<()> {
        if self.nodes.is_empty() {
            return Err(Error::Format("tree has no nodes".into()));
        }
        for (i, n) in self.nodes.iter().enumerate() {
            match n {
                Node::Leaf { class, .. } if *class >= n_classes => {
                    return Err(Error::Format(format!("leaf {i} names class {class} of {n_classes}")))
                }
                Node::Split {
                    feature, left, right, ..
                } if *feature >= n_features
                    || *left <= i
                    || *right <= i
                    || *left >= self.nodes.len()
                    || *right >= self.nodes.len() =>
                {
                    return Err(Error::Format(format!("split node {i} is malformed")))
                }
                _ => {}
            }
        }
        Ok(())
    }
}

fn argmax(counts: &[f64]) -> usize {
    let mut best = 0;
    for (i, c) in counts.iter().enumerate() {
        if *c > counts[best] {
            best = i;
        }
    }
    best
}

fn gini(counts: &[f64], total: f64) -> f64 {
    if total <= 0.0 {
        return 0.0;
    }
    1.0 - counts.iter().map(|c| (c / total) * (c / total)).sum::<f64>()
}

/// Training inputs shared by every tree of a model.
pub(crate) struct TrainSet<'a> {
    pub rows: &'a [Vec<f64>],
    pub y: &'a [usize],
    pub n_classes: usize,
}

impl TrainSet<'_> {
    pub fn n_features(&self) -> usize {
        self.rows.first().map(Vec::len).unwrap_or(0)
    }
}

struct Builder<'a, 'r> {
    data: &'a TrainSet<'a>,
    weights: &'a [f64],
    cfg: TreeConfig,
    max_features: usize,
    rng: Option<&'r mut Rng>,
    nodes: Vec<Node>,
}

struct Candidate {
    gain: f64,
    feature: usize,
    threshold: f64,
}

impl Builder<'_, '_> {
    fn counts(&self, idx: &[usize]) -> Vec<f64> {
        let mut c = vec![0.0; self.data.n_classes];
        for &i in idx {
            c[self.data.y[i]] += self.weights[i];
        }
        c
    }

    fn features(&mut self) -> Vec<usize> {
        let p = self.data.n_features();
        match self.rng.as_deref_mut() {
            Some(rng) if self.max_features < p => {
                let mut f = sample(rng, p, self.max_features).into_vec();
                f.sort_unstable();
                f
            }
            _ => (0..p).collect(),
        }
    }

    fn best_split(&mut self, idx: &[usize], counts: &[f64]) -> Option<Candidate> {
        let total: f64 = counts.iter().sum();
        let parent = gini(counts, total);
        let min_leaf = self.cfg.min_samples_leaf;
        let mut best: Option<Candidate> = None;
        let mut sorted: Vec<(f64, usize)> = Vec::with_capacity(idx.len());
        for f in self.features() {
            sorted.clear();
            sorted.extend(
                idx.iter()
                    .map(|&i| (self.data.rows[i][f], i))
                    .filter(|(x, _)| !x.is_nan()),
            );
            if sorted.len() < 2 {
                continue;
            }
            sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut left = vec![0.0; self.data.n_classes];
            let mut left_w = 0.0;
            for p in 0..sorted.len() - 1 {
                let (x, i) = sorted[p];
                left[self.data.y[i]] += self.weights[i];
                left_w += self.weights[i];
                let next = sorted[p + 1].0;
                if next <= x {
                    continue;
                }
                let n_left = p + 1;
                let n_right = idx.len() - n_left;
                if n_left < min_leaf || n_right < min_leaf {
                    continue;
                }
                let right: Vec<f64> = counts.iter().zip(&left).map(|(c, l)| c - l).collect();
                let right_w = total - left_w;
                let child = (left_w / total) * gini(&left, left_w) + (right_w / total) * gini(&right, right_w);
                let gain = parent - child;
                if gain > best.as_ref().map_or(1e-12, |b| b.gain) {
                    let mut threshold = x + (next - x) / 2.0;
                    if threshold >= next {
                        threshold = x;
                    }
                    best = Some(Candidate {
                        gain,
                        feature: f,
                        threshold,
                    });
                }
            }
        }
        best
    }

    fn build(&mut self, idx: Vec<usize>, depth: usize) -> usize {
        let counts = self.counts(&idx);
        let at = self.nodes.len();
        self.nodes.push(Node::Leaf {
            class: argmax(&counts),
            counts: counts.clone(),
        });
        let pure = counts.iter().filter(|c| **c > 0.0).count() <= 1;
        let depth_ok = self.cfg.max_depth.is_none_or(|d| depth < d);
        if pure || !depth_ok || idx.len() < 2 * self.cfg.min_samples_leaf {
            return at;
        }
        let Some(split) = self.best_split(&idx, &counts) else {
            return at;
        };
        let (l, r): (Vec<usize>, Vec<usize>) = idx
            .iter()
            .partition(|&&i| self.data.rows[i][split.feature] <= split.threshold);
        let left = self.build(l, depth + 1);
        let right = self.build(r, depth + 1);
        if let (Node::Leaf { counts: lc, .. }, Node::Leaf { counts: rc, .. }) = (&self.nodes[left], &self.nodes[right])
        {
            let merged: Vec<f64> = lc.iter().zip(rc).map(|(a, b)| a + b).collect();
            let total: f64 = merged.iter().sum();
            if total > 0.0 && merged[argmax(&merged)] / total >= self.cfg.prune_purity {
                self.nodes.truncate(at + 1);
                self.nodes[at] = Node::Leaf {
                    class: argmax(&merged),
                    counts: merged,
                };
                return at;
            }
        }
        self.nodes[at] = Node::Split {
            feature: split.feature,
            threshold: split.threshold,
            left,
            right,
        };
        at
    }
}

/// Grows one tree. Rows with zero weight are ignored; `max_features` below
/// the feature count draws a fresh random feature subset at every split.
pub(crate) fn grow(
    data: &TrainSet<'_>,
    weights: &[f64],
    cfg: TreeConfig,
    max_features: usize,
    rng: Option<&mut Rng>,
) -> Tree {
    let idx: Vec<usize> = (0..data.rows.len()).filter(|&i| weights[i] > 0.0).collect();
    let mut b = Builder {
        data,
        weights,
        cfg,
        max_features,
        rng,
        nodes: Vec::new(),
    };
    b.build(idx, 0);
    Tree { nodes: b.nodes }
}
