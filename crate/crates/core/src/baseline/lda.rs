//! Two-class linear discriminant with a full pooled covariance.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::embedding::{EmbeddingDataset, GenderLabel};
use crate::error::{Error, Result};

/// Relative ridge added to the pooled covariance diagonal: `RIDGE * trace / d`.
pub const LDA_RIDGE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LdaModel {
    /// `[female, male]` sample means.
    pub class_means: [Vec<f64>; 2],
    /// Lower Cholesky factor of the regularized pooled covariance, row-major.
    pub cholesky: Vec<f64>,
    /// `[ln P(female), ln P(male)]` from class frequencies.
    pub log_priors: [f64; 2],
    /// Discriminant direction `Sigma^-1 (mu_m - mu_f)`.
    pub weights: Vec<f64>,
    pub intercept: f64,
}

/// Class means, counts and within-class scatter of a dataset. Sub-models on a
/// feature subset can be built from these without another pass over the data.
#[derive(Debug, Clone)]
pub struct ClassMoments {
    pub dimension: usize,
    pub counts: [usize; 2],
    pub means: [Vec<f64>; 2],
    /// Within-class scatter, d x d.
    pub scatter: DMatrix<f64>,
}

impl ClassMoments {
    pub fn from_dataset(data: &EmbeddingDataset) -> Result<Self> {
        data.require_both_classes(2)?;
        let dim = data.dimension();
        let counts = data.class_counts();
        let mut means = [vec![0.0; dim], vec![0.0; dim]];
        for r in data.records() {
            for (m, &v) in means[r.label as usize].iter_mut().zip(&r.features) {
                *m += f64::from(v);
            }
        }
        for (mean, &count) in means.iter_mut().zip(&counts) {
            for m in mean.iter_mut() {
                *m /= count as f64;
            }
        }
        let centered = DMatrix::from_fn(data.len(), dim, |i, j| {
            let r = &data.records()[i];
            f64::from(r.features[j]) - means[r.label as usize][j]
        });
        let scatter = centered.tr_mul(&centered);
        Ok(Self {
            dimension: dim,
            counts,
            means,
            scatter,
        })
    }
}

pub fn lda_fit(data: &EmbeddingDataset) -> Result<LdaModel> {
    let moments = ClassMoments::from_dataset(data)?;
    let all: Vec<usize> = (0..moments.dimension).collect();
    lda_from_moments(&moments, &all)
}

/// LDA restricted to the given feature indices.
pub fn lda_from_moments(moments: &ClassMoments, features: &[usize]) -> Result<LdaModel> {
    let d = features.len();
    if d == 0 {
        return Err(Error::Contract("LDA needs at least one feature".into()));
    }
    let n = moments.counts[0] + moments.counts[1];
    let mut cov = DMatrix::from_fn(d, d, |i, j| {
        moments.scatter[(features[i], features[j])] / (n - 2) as f64
    });
    let trace = cov.trace();
    let ridge = if trace > 0.0 {
        LDA_RIDGE * trace / d as f64
    } else {
        1e-12
    };
    for i in 0..d {
        cov[(i, i)] += ridge;
    }
    let chol = cov
        .cholesky()
        .ok_or_else(|| Error::Training("pooled covariance is not positive definite".into()))?;

    let class_means = [
        features
            .iter()
            .map(|&j| moments.means[0][j])
            .collect::<Vec<_>>(),
        features
            .iter()
            .map(|&j| moments.means[1][j])
            .collect::<Vec<_>>(),
    ];
    let diff = DVector::from_iterator(d, (0..d).map(|i| class_means[1][i] - class_means[0][i]));
    let weights = chol.solve(&diff);
    let total = n as f64;
    let log_priors = [
        (moments.counts[0] as f64 / total).ln(),
        (moments.counts[1] as f64 / total).ln(),
    ];
    let midpoint_proj: f64 = (0..d)
        .map(|i| weights[i] * 0.5 * (class_means[0][i] + class_means[1][i]))
        .sum();
    let l = chol.l();
    Ok(LdaModel {
        cholesky: (0..d)
            .flat_map(|i| (0..d).map(move |j| (i, j)))
            .map(|(i, j)| l[(i, j)])
            .collect(),
        intercept: log_priors[1] - log_priors[0] - midpoint_proj,
        weights: weights.iter().copied().collect(),
        class_means,
        log_priors,
    })
}

/// Log posterior odds, male versus female. Affine in `x`.
pub fn lda_score(model: &LdaModel, x: &[f64]) -> Result<f64> {
    Error::check_dim(model.weights.len(), x.len())?;
    Ok(model.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + model.intercept)
}

impl LdaModel {
    pub fn dimension(&self) -> usize {
        self.weights.len()
    }

    pub fn predict(&self, x: &[f64]) -> Result<GenderLabel> {
        Ok(if lda_score(self, x)? > 0.0 {
            GenderLabel::Male
        } else {
            GenderLabel::Female
        })
    }

    /// Decision boundary for a one-dimensional model.
    pub fn threshold_1d(&self) -> Option<f64> {
        (self.weights.len() == 1 && self.weights[0] != 0.0)
            .then(|| -self.intercept / self.weights[0])
    }
}
