//! CART classification trees grown best-first under a split budget.
//!
//! Splits maximize the weighted Gini impurity decrease. Candidate thresholds
//! are midpoints between consecutive distinct feature values, and a record
//! goes left when `x[feature] <= threshold`. At every step the leaf whose
//! best split has the largest decrease is expanded, until `max_splits`
//! internal nodes exist or no leaf can be improved. Because expansion order
//! only depends on the data, a tree with budget `k` is the tree with budget
//! `k - 1` plus one more split.

use serde::{Deserialize, Serialize};

use crate::embedding::{EmbeddingDataset, GenderLabel};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        label: GenderLabel,
        /// Male share of the training weight that reached this leaf.
        score: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    /// Root at index 0.
    pub nodes: Vec<Node>,
    pub max_splits: usize,
    pub dimension: usize,
}

/// Dense training view shared by trees and ensembles.
#[derive(Debug, Clone)]
pub(crate) struct Design {
    pub x: Vec<f64>,
    pub y: Vec<GenderLabel>,
    pub dim: usize,
}

impl Design {
    pub fn new(data: &EmbeddingDataset) -> Self {
        Self {
            x: data.feature_matrix(),
            y: data.labels(),
            dim: data.dimension(),
        }
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.x[i * self.dim..(i + 1) * self.dim]
    }
}

/// Weighted Gini impurity times node weight: `2 m (w - m) / w`.
fn impurity(weight: f64, male: f64) -> f64 {
    if weight <= 0.0 {
        0.0
    } else {
        2.0 * male * (weight - male) / weight
    }
}

#[derive(Debug, Clone, Copy)]
struct SplitCandidate {
    feature: usize,
    threshold: f64,
    decrease: f64,
}

struct Leaf {
    node: usize,
    members: Vec<usize>,
    best: Option<SplitCandidate>,
}

fn leaf_node(design: &Design, weights: &[f64], members: &[usize]) -> Node {
    let (total, male) = members.iter().fold((0.0, 0.0), |(t, m), &i| {
        let w = weights[i];
        (
            t + w,
            if design.y[i] == GenderLabel::Male {
                m + w
            } else {
                m
            },
        )
    });
    let score = if total > 0.0 { male / total } else { 0.0 };
    Node::Leaf {
        label: if score > 0.5 {
            GenderLabel::Male
        } else {
            GenderLabel::Female
        },
        score,
    }
}

fn best_split(design: &Design, weights: &[f64], members: &[usize]) -> Option<SplitCandidate> {
    if members.len() < 2 {
        return None;
    }
    let (total, male) = members.iter().fold((0.0, 0.0), |(t, m), &i| {
        let w = weights[i];
        (
            t + w,
            if design.y[i] == GenderLabel::Male {
                m + w
            } else {
                m
            },
        )
    });
    let parent = impurity(total, male);
    if parent <= 0.0 {
        return None;
    }
    let min_gain = 1e-12 * total;
    let mut best: Option<SplitCandidate> = None;
    let mut column: Vec<(f64, f64, bool)> = Vec::with_capacity(members.len());
    for feature in 0..design.dim {
        column.clear();
        column.extend(members.iter().map(|&i| {
            (
                design.x[i * design.dim + feature],
                weights[i],
                design.y[i] == GenderLabel::Male,
            )
        }));
        column.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (mut left_w, mut left_m) = (0.0, 0.0);
        for k in 0..column.len() - 1 {
            let (value, w, is_male) = column[k];
            left_w += w;
            if is_male {
                left_m += w;
            }
            let next = column[k + 1].0;
            if next == value {
                continue;
            }
            let decrease =
                parent - impurity(left_w, left_m) - impurity(total - left_w, male - left_m);
            if decrease > min_gain && best.is_none_or(|b| decrease > b.decrease) {
                best = Some(SplitCandidate {
                    feature,
                    threshold: 0.5 * (value + next),
                    decrease,
                });
            }
        }
    }
    best
}

pub(crate) fn grow(design: &Design, weights: &[f64], max_splits: usize) -> Result<DecisionTree> {
    if max_splits == 0 {
        return Err(Error::Contract("max_splits must be at least 1".into()));
    }
    if weights.len() != design.len() {
        return Err(Error::Contract(format!(
            "{} weights for {} records",
            weights.len(),
            design.len()
        )));
    }
    if weights.iter().any(|w| !(*w >= 0.0 && w.is_finite())) {
        return Err(Error::Contract(
            "tree weights must be finite and nonnegative".into(),
        ));
    }
    let members: Vec<usize> = (0..design.len()).filter(|&i| weights[i] > 0.0).collect();
    if members.is_empty() {
        return Err(Error::Contract("total training weight is zero".into()));
    }

    let mut nodes = vec![leaf_node(design, weights, &members)];
    let mut leaves = vec![Leaf {
        node: 0,
        best: best_split(design, weights, &members),
        members,
    }];
    let mut splits = 0;
    while splits < max_splits {
        // Largest decrease; ties go to the leaf created first.
        let mut pick: Option<(usize, f64)> = None;
        for (pos, leaf) in leaves.iter().enumerate() {
            if let Some(s) = leaf.best {
                if pick.is_none_or(|(_, d)| s.decrease > d) {
                    pick = Some((pos, s.decrease));
                }
            }
        }
        let Some((pos, _)) = pick else { break };
        let leaf = leaves.remove(pos);
        let split = leaf.best.expect("picked leaf has a split");
        let (left_members, right_members): (Vec<usize>, Vec<usize>) = leaf
            .members
            .iter()
            .partition(|&&i| design.x[i * design.dim + split.feature] <= split.threshold);

        let left = nodes.len();
        nodes.push(leaf_node(design, weights, &left_members));
        let right = nodes.len();
        nodes.push(leaf_node(design, weights, &right_members));
        nodes[leaf.node] = Node::Split {
            feature: split.feature,
            threshold: split.threshold,
            left,
            right,
        };
        for (node, members) in [(left, left_members), (right, right_members)] {
            leaves.push(Leaf {
                node,
                best: best_split(design, weights, &members),
                members,
            });
        }
        // Keep creation order so ties resolve to the older leaf.
        leaves.sort_by_key(|l| l.node);
        splits += 1;
    }
    Ok(DecisionTree {
        nodes,
        max_splits,
        dimension: design.dim,
    })
}

/// Trains a tree on `data` with per-record `weights` (nonnegative, normalized
/// internally).
pub fn tree_train(
    data: &EmbeddingDataset,
    weights: &[f64],
    max_splits: usize,
) -> Result<DecisionTree> {
    data.require_nonempty()?;
    grow(&Design::new(data), weights, max_splits)
}

impl DecisionTree {
    pub fn split_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Node::Split { .. }))
            .count()
    }

    pub(crate) fn leaf_unchecked(&self, x: &[f64]) -> (GenderLabel, f64) {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    at = if x[*feature] <= *threshold {
                        *left
                    } else {
                        *right
                    }
                }
                Node::Leaf { label, score } => return (*label, *score),
            }
        }
    }

    /// Leaf label and male score for `x`.
    pub fn predict(&self, x: &[f64]) -> Result<(GenderLabel, f64)> {
        Error::check_dim(self.dimension, x.len())?;
        Ok(self.leaf_unchecked(x))
    }
}
