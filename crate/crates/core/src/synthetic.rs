//! Two-cluster synthetic embeddings for tests and offline benchmarks.

use rand::RngExt;
use rand_distr::{Distribution, Normal};

use crate::embedding::{EmbeddingDataset, EmbeddingRecord, GenderLabel};
use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterSpec {
    pub dimension: usize,
    /// Female mean is `-offset` in every component, Male mean `+offset`.
    pub offset: f64,
    pub sigma: f64,
    /// Probability that a record is Male.
    pub male_fraction: f64,
}

impl Default for ClusterSpec {
    fn default() -> Self {
        Self {
            dimension: crate::embedding::ARCFACE_DIM,
            offset: 0.1,
            sigma: 0.05,
            male_fraction: 0.5,
        }
    }
}

impl ClusterSpec {
    /// Mean of the given class, as a single repeated component.
    pub fn mean_component(&self, label: GenderLabel) -> f64 {
        label.sign() * self.offset
    }

    /// Bayes-optimal rule for the isotropic two-Gaussian mixture with equal
    /// priors: the sign of the sum of components.
    pub fn bayes_label(&self, x: &[f32]) -> GenderLabel {
        let s: f64 = x.iter().map(|&v| f64::from(v)).sum();
        if s > 0.0 {
            GenderLabel::Male
        } else {
            GenderLabel::Female
        }
    }
}

/// Draws `n` labeled records. The same seed always yields the same dataset.
pub fn gaussian_clusters(
    spec: &ClusterSpec,
    n: usize,
    seed: u64,
    tag: &str,
) -> Result<EmbeddingDataset> {
    if !(spec.sigma > 0.0 && spec.sigma.is_finite()) {
        return Err(Error::Contract(format!(
            "sigma must be positive, got {}",
            spec.sigma
        )));
    }
    if !(0.0..=1.0).contains(&spec.male_fraction) {
        return Err(Error::Contract(format!(
            "male_fraction must lie in [0, 1], got {}",
            spec.male_fraction
        )));
    }
    let noise = Normal::new(0.0, spec.sigma).map_err(|e| Error::Contract(e.to_string()))?;
    let mut rng = rng::stream(seed);
    let mut dataset = EmbeddingDataset::new(spec.dimension, tag)?;
    for _ in 0..n {
        let label = if rng.random::<f64>() < spec.male_fraction {
            GenderLabel::Male
        } else {
            GenderLabel::Female
        };
        let mean = spec.mean_component(label);
        let features = (0..spec.dimension)
            .map(|_| (mean + noise.sample(&mut rng)) as f32)
            .collect();
        dataset.push(EmbeddingRecord::new(features, label))?;
    }
    Ok(dataset)
}

/// Training and validation sets drawn from independent streams of `seed`.
pub fn train_validation(
    spec: &ClusterSpec,
    n_train: usize,
    n_validation: usize,
    seed: u64,
) -> Result<(EmbeddingDataset, EmbeddingDataset)> {
    Ok((
        gaussian_clusters(spec, n_train, rng::derive_seed(seed, 0), "synthetic-train")?,
        gaussian_clusters(
            spec,
            n_validation,
            rng::derive_seed(seed, 1),
            "synthetic-validation",
        )?,
    ))
}
