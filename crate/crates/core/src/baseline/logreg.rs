//! L2-regularized logistic regression fit by full-batch gradient descent
//! with a backtracking (Armijo) line search, starting from zero weights.

use serde::{Deserialize, Serialize};

use crate::embedding::{EmbeddingDataset, GenderLabel};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogRegModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub l2_lambda: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogRegConfig {
    /// First trial step of the line search.
    pub initial_step: f64,
    pub max_epochs: usize,
    /// Stop once the gradient's infinity norm drops to this value.
    pub grad_tol: f64,
}

impl Default for LogRegConfig {
    fn default() -> Self {
        Self {
            initial_step: 1.0,
            max_epochs: 300,
            grad_tol: 1e-6,
        }
    }
}

/// Training state for a dataset: design matrix and 0/1 targets.
struct Problem {
    x: Vec<f64>,
    y: Vec<f64>,
    dim: usize,
    lambda: f64,
}

/// `ln(1 + e^z)` without overflow.
pub(crate) fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

impl Problem {
    fn new(data: &EmbeddingDataset, lambda: f64) -> Self {
        Self {
            x: data.feature_matrix(),
            y: data
                .records()
                .iter()
                .map(|r| f64::from(r.label.code()))
                .collect(),
            dim: data.dimension(),
            lambda,
        }
    }

    fn rows(&self) -> impl Iterator<Item = (&[f64], f64)> {
        self.x.chunks_exact(self.dim).zip(self.y.iter().copied())
    }

    /// Parameters are `[w_0 .. w_{d-1}, b]`.
    fn loss(&self, theta: &[f64]) -> f64 {
        let (w, b) = theta.split_at(self.dim);
        let n = self.y.len() as f64;
        let data: f64 = self
            .rows()
            .map(|(x, y)| {
                let z = dot(w, x) + b[0];
                softplus(z) - y * z
            })
            .sum::<f64>()
            / n;
        data + 0.5 * self.lambda * dot(w, w)
    }

    fn loss_grad(&self, theta: &[f64]) -> (f64, Vec<f64>) {
        let (w, b) = theta.split_at(self.dim);
        let n = self.y.len() as f64;
        let mut grad = vec![0.0; self.dim + 1];
        let mut loss = 0.0;
        for (x, y) in self.rows() {
            let z = dot(w, x) + b[0];
            loss += softplus(z) - y * z;
            let r = sigmoid(z) - y;
            for (g, xi) in grad[..self.dim].iter_mut().zip(x) {
                *g += r * xi;
            }
            grad[self.dim] += r;
        }
        for g in &mut grad {
            *g /= n;
        }
        for (g, wi) in grad[..self.dim].iter_mut().zip(w) {
            *g += self.lambda * wi;
        }
        (loss / n + 0.5 * self.lambda * dot(w, w), grad)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, g| m.max(g.abs()))
}

/// Mean cross-entropy plus `lambda/2 |w|^2` and its gradient over `(w, b)`.
pub fn logreg_loss_grad(model: &LogRegModel, data: &EmbeddingDataset) -> Result<(f64, Vec<f64>)> {
    data.require_nonempty()?;
    Error::check_dim(model.weights.len(), data.dimension())?;
    let problem = Problem::new(data, model.l2_lambda);
    let mut theta = model.weights.clone();
    theta.push(model.bias);
    Ok(problem.loss_grad(&theta))
}

pub fn logreg_train(
    data: &EmbeddingDataset,
    lambda: f64,
    config: &LogRegConfig,
) -> Result<LogRegModel> {
    data.require_both_classes(1)?;
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::Contract(format!(
            "lambda = {lambda} must be nonnegative"
        )));
    }
    let problem = Problem::new(data, lambda);
    let mut theta = vec![0.0; data.dimension() + 1];
    let (mut loss, mut grad) = problem.loss_grad(&theta);
    let mut step = config.initial_step;
    for _ in 0..config.max_epochs {
        let g2 = dot(&grad, &grad);
        if inf_norm(&grad) <= config.grad_tol {
            break;
        }
        let mut accepted = None;
        while step > 1e-20 {
            let trial: Vec<f64> = theta.iter().zip(&grad).map(|(t, g)| t - step * g).collect();
            let trial_loss = problem.loss(&trial);
            if trial_loss <= loss - 0.5 * step * g2 {
                accepted = Some(trial);
                break;
            }
            step *= 0.5;
        }
        let Some(next) = accepted else { break };
        theta = next;
        (loss, grad) = problem.loss_grad(&theta);
        if !loss.is_finite() {
            return Err(Error::Numeric("logistic loss became non-finite".into()));
        }
        step *= 2.0;
    }
    let bias = theta.pop().expect("bias slot");
    Ok(LogRegModel {
        weights: theta,
        bias,
        l2_lambda: lambda,
    })
}

impl LogRegModel {
    pub fn logit(&self, x: &[f64]) -> Result<f64> {
        Error::check_dim(self.weights.len(), x.len())?;
        Ok(dot(&self.weights, x) + self.bias)
    }

    /// Male when the logit is positive; zero resolves to female.
    pub fn predict(&self, x: &[f64]) -> Result<GenderLabel> {
        Ok(if self.logit(x)? > 0.0 {
            GenderLabel::Male
        } else {
            GenderLabel::Female
        })
    }
}
