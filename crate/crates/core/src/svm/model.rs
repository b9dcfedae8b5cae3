use serde::{Deserialize, Serialize};

use super::kernel::KernelSpec;
use crate::embedding::GenderLabel;
use crate::error::{Error, Result};

/// Trained dual solution. Only records with a positive multiplier are kept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub support_vectors: Vec<Vec<f64>>,
    /// -1 for female, +1 for male.
    pub support_labels: Vec<f64>,
    pub alphas: Vec<f64>,
    pub bias: f64,
    /// Box constraint the model was trained with.
    pub c: f64,
    pub kernel: KernelSpec,
}

impl SvmModel {
    pub fn dimension(&self) -> usize {
        self.kernel.dimension
    }

    /// `|sum_i alpha_i y_i|`, zero for an exact dual-feasible solution.
    pub fn equality_residual(&self) -> f64 {
        self.alphas
            .iter()
            .zip(&self.support_labels)
            .map(|(a, y)| a * y)
            .sum::<f64>()
            .abs()
    }
}

/// `f(x) = sum_i alpha_i y_i K(x_i, x) + b`.
pub fn svm_decision(model: &SvmModel, x: &[f64]) -> Result<f64> {
    Error::check_dim(model.dimension(), x.len())?;
    let sum: f64 = model
        .support_vectors
        .iter()
        .zip(&model.support_labels)
        .zip(&model.alphas)
        .map(|((sv, y), a)| a * y * model.kernel.eval_unchecked(sv, x))
        .sum();
    Ok(sum + model.bias)
}

/// Male when `f(x) > 0`; `f(x) == 0` resolves to female.
pub fn svm_predict(model: &SvmModel, x: &[f64]) -> Result<GenderLabel> {
    Ok(if svm_decision(model, x)? > 0.0 {
        GenderLabel::Male
    } else {
        GenderLabel::Female
    })
}
