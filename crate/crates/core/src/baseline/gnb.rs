//! Gaussian naive Bayes.

use serde::{Deserialize, Serialize};

use super::logreg::sigmoid;
use crate::embedding::{EmbeddingDataset, GenderLabel};
use crate::error::{Error, Result};

/// Lower bound on every per-class feature variance.
pub const VARIANCE_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GnbModel {
    /// `[female, male]` per-feature means.
    pub means: [Vec<f64>; 2],
    /// `[female, male]` per-feature maximum-likelihood variances, floored.
    pub variances: [Vec<f64>; 2],
    pub log_priors: [f64; 2],
}

pub fn gnb_fit(data: &EmbeddingDataset) -> Result<GnbModel> {
    data.require_both_classes(2)?;
    let dim = data.dimension();
    let counts = data.class_counts();
    let mut means = [vec![0.0; dim], vec![0.0; dim]];
    for r in data.records() {
        for (m, &v) in means[r.label as usize].iter_mut().zip(&r.features) {
            *m += f64::from(v);
        }
    }
    for c in 0..2 {
        means[c].iter_mut().for_each(|m| *m /= counts[c] as f64);
    }
    let mut variances = [vec![0.0; dim], vec![0.0; dim]];
    for r in data.records() {
        let c = r.label as usize;
        for ((s, &v), m) in variances[c].iter_mut().zip(&r.features).zip(&means[c]) {
            let d = f64::from(v) - m;
            *s += d * d;
        }
    }
    for c in 0..2 {
        variances[c]
            .iter_mut()
            .for_each(|s| *s = (*s / counts[c] as f64).max(VARIANCE_FLOOR));
    }
    let n = data.len() as f64;
    Ok(GnbModel {
        means,
        variances,
        log_priors: [(counts[0] as f64 / n).ln(), (counts[1] as f64 / n).ln()],
    })
}

impl GnbModel {
    pub fn dimension(&self) -> usize {
        self.means[0].len()
    }

    fn log_joint(&self, class: usize, x: &[f64]) -> f64 {
        let ll: f64 = x
            .iter()
            .zip(&self.means[class])
            .zip(&self.variances[class])
            .map(|((v, m), s)| {
                let d = v - m;
                -0.5 * (std::f64::consts::TAU * s).ln() - d * d / (2.0 * s)
            })
            .sum();
        ll + self.log_priors[class]
    }

    /// `ln P(male | x) - ln P(female | x)`.
    pub fn log_odds(&self, x: &[f64]) -> Result<f64> {
        Error::check_dim(self.dimension(), x.len())?;
        Ok(self.log_joint(1, x) - self.log_joint(0, x))
    }

    pub fn predict(&self, x: &[f64]) -> Result<GenderLabel> {
        Ok(if self.log_odds(x)? > 0.0 {
            GenderLabel::Male
        } else {
            GenderLabel::Female
        })
    }
}

/// Posterior probability of `Male`.
pub fn gnb_posterior(model: &GnbModel, x: &[f64]) -> Result<f64> {
    model.log_odds(x).map(sigmoid)
}
