//! Exhaustive-scan k-nearest neighbors.
//!
//! Distance ties go to the earlier training record; vote ties go to female.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::embedding::{EmbeddingDataset, GenderLabel};
use crate::error::{Error, Result};

/// Offset in inverse-distance weights `1 / (dist + eps)`.
pub const INVERSE_DISTANCE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Metric {
    Euclidean,
    Cosine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Weighting {
    Uniform,
    InverseDistance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    pub k: usize,
    pub metric: Metric,
    pub weighting: Weighting,
    dimension: usize,
    /// Row-major training features.
    features: Vec<f64>,
    labels: Vec<GenderLabel>,
    norms: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Candidate {
    dist: f64,
    index: usize,
}

impl Eq for Candidate {}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.dist
            .total_cmp(&other.dist)
            .then(self.index.cmp(&other.index))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl KnnModel {
    pub fn fit(
        data: &EmbeddingDataset,
        k: usize,
        metric: Metric,
        weighting: Weighting,
    ) -> Result<Self> {
        data.require_nonempty()?;
        if k == 0 || k > data.len() {
            return Err(Error::Contract(format!(
                "k = {k} must lie in 1..={} (training set size)",
                data.len()
            )));
        }
        let features = data.feature_matrix();
        let dim = data.dimension();
        let norms: Vec<f64> = features
            .chunks_exact(dim)
            .map(|row| row.iter().map(|v| v * v).sum::<f64>().sqrt())
            .collect();
        if metric == Metric::Cosine {
            if let Some(index) = norms.iter().position(|&n| n == 0.0) {
                return Err(Error::Degenerate {
                    index,
                    reason: "zero-norm training vector under cosine distance".into(),
                });
            }
        }
        Ok(Self {
            k,
            metric,
            weighting,
            dimension: dim,
            features,
            labels: data.labels(),
            norms,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn training_len(&self) -> usize {
        self.labels.len()
    }
}

/// Label and male weight fraction among the `k` nearest training records.
pub fn knn_predict(model: &KnnModel, x: &[f64]) -> Result<(GenderLabel, f64)> {
    Error::check_dim(model.dimension, x.len())?;
    let query_norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if model.metric == Metric::Cosine && query_norm == 0.0 {
        return Err(Error::Degenerate {
            index: 0,
            reason: "zero-norm query under cosine distance".into(),
        });
    }

    // Max-heap of the k best so far; the root is the worst kept candidate.
    let mut heap: BinaryHeap<Candidate> = BinaryHeap::with_capacity(model.k + 1);
    for (index, row) in model.features.chunks_exact(model.dimension).enumerate() {
        let dist = match model.metric {
            Metric::Euclidean => row
                .iter()
                .zip(x)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt(),
            Metric::Cosine => {
                let dot: f64 = row.iter().zip(x).map(|(a, b)| a * b).sum();
                1.0 - dot / (model.norms[index] * query_norm)
            }
        };
        let candidate = Candidate { dist, index };
        if heap.len() < model.k {
            heap.push(candidate);
        } else if candidate < *heap.peek().expect("heap is full") {
            heap.pop();
            heap.push(candidate);
        }
    }

    let (mut male, mut female) = (0.0, 0.0);
    for c in heap {
        let w = match model.weighting {
            Weighting::Uniform => 1.0,
            Weighting::InverseDistance => 1.0 / (c.dist + INVERSE_DISTANCE_EPS),
        };
        match model.labels[c.index] {
            GenderLabel::Male => male += w,
            GenderLabel::Female => female += w,
        }
    }
    let label = if male > female {
        GenderLabel::Male
    } else {
        GenderLabel::Female
    };
    Ok((label, male / (male + female)))
}
