//! Feed-forward network: ReLU hidden layers and one logistic output unit,
//! trained on mean binary cross-entropy by mini-batch gradient descent with
//! classical momentum.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::baseline::{sigmoid, softplus};
use crate::embedding::{EmbeddingDataset, GenderLabel};
use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MlpArchitecture {
    pub input_dim: usize,
    pub hidden_sizes: Vec<usize>,
}

impl MlpArchitecture {
    pub fn new(input_dim: usize, hidden_sizes: Vec<usize>) -> Result<Self> {
        if input_dim == 0 || hidden_sizes.is_empty() || hidden_sizes.contains(&0) {
            return Err(Error::Contract(format!(
                "invalid MLP shape: input {input_dim}, hidden {hidden_sizes:?}"
            )));
        }
        Ok(Self {
            input_dim,
            hidden_sizes,
        })
    }

    /// `(fan_in, fan_out)` of each layer, output layer last.
    fn layer_shapes(&self) -> Vec<(usize, usize)> {
        let mut dims = vec![self.input_dim];
        dims.extend_from_slice(&self.hidden_sizes);
        dims.push(1);
        dims.windows(2).map(|w| (w[0], w[1])).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    /// `fan_out x fan_in`.
    pub weights: DMatrix<f64>,
    pub biases: DVector<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    pub architecture: MlpArchitecture,
    pub layers: Vec<Layer>,
}

/// Gradient with the same layout as [`MlpModel::layers`].
#[derive(Debug, Clone, PartialEq)]
pub struct MlpGradient {
    pub layers: Vec<Layer>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MlpTrainConfig {
    pub step_size: f64,
    pub momentum: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for MlpTrainConfig {
    fn default() -> Self {
        Self {
            step_size: 1e-3,
            momentum: 0.9,
            epochs: 50,
            batch_size: 256,
            seed: 0,
        }
    }
}

fn flatten(layers: &[Layer]) -> Vec<f64> {
    let mut out = Vec::new();
    for l in layers {
        out.extend(l.weights.iter());
        out.extend(l.biases.iter());
    }
    out
}

impl MlpGradient {
    /// Flattened in the order of [`MlpModel::parameters`].
    pub fn to_vec(&self) -> Vec<f64> {
        flatten(&self.layers)
    }
}

impl MlpModel {
    pub fn zeros(architecture: MlpArchitecture) -> Self {
        let layers = architecture
            .layer_shapes()
            .into_iter()
            .map(|(fan_in, fan_out)| Layer {
                weights: DMatrix::zeros(fan_out, fan_in),
                biases: DVector::zeros(fan_out),
            })
            .collect();
        Self {
            architecture,
            layers,
        }
    }

    /// He initialization: weights ~ N(0, 2 / fan_in), zero biases.
    pub fn initialize(architecture: MlpArchitecture, seed: u64) -> Self {
        let mut model = Self::zeros(architecture);
        let mut rng = rng::stream(seed);
        for layer in &mut model.layers {
            let std = (2.0 / layer.weights.ncols() as f64).sqrt();
            let normal = Normal::new(0.0, std).expect("positive std");
            for w in layer.weights.iter_mut() {
                *w = normal.sample(&mut rng);
            }
        }
        model
    }

    pub fn dimension(&self) -> usize {
        self.architecture.input_dim
    }

    /// All weights then biases of each layer, column-major weights.
    pub fn parameters(&self) -> Vec<f64> {
        flatten(&self.layers)
    }

    pub fn set_parameters(&mut self, values: &[f64]) -> Result<()> {
        let total: usize = self
            .layers
            .iter()
            .map(|l| l.weights.len() + l.biases.len())
            .sum();
        Error::check_dim(total, values.len())?;
        let mut at = 0;
        for l in &mut self.layers {
            for w in l.weights.iter_mut() {
                *w = values[at];
                at += 1;
            }
            for b in l.biases.iter_mut() {
                *b = values[at];
                at += 1;
            }
        }
        Ok(())
    }

    pub fn predict(&self, x: &[f64]) -> Result<GenderLabel> {
        let (_, logit) = mlp_forward(self, x)?;
        Ok(if logit > 0.0 {
            GenderLabel::Male
        } else {
            GenderLabel::Female
        })
    }
}

/// Male probability and output logit for one input.
pub fn mlp_forward(model: &MlpModel, x: &[f64]) -> Result<(f64, f64)> {
    Error::check_dim(model.dimension(), x.len())?;
    let mut h = DVector::from_column_slice(x);
    let last = model.layers.len() - 1;
    for (i, layer) in model.layers.iter().enumerate() {
        h = &layer.weights * h + &layer.biases;
        if i < last {
            h.apply(|v| *v = v.max(0.0));
        }
    }
    let logit = h[0];
    Ok((sigmoid(logit), logit))
}

/// Mean binary cross-entropy `softplus(z) - y z` and its gradient. Rows of
/// `x` are samples; `y` holds 0/1 targets.
fn batch_loss_grad(model: &MlpModel, x: &DMatrix<f64>, y: &[f64]) -> (f64, MlpGradient) {
    let n = y.len() as f64;
    // Activations per layer, samples as rows.
    let mut acts: Vec<DMatrix<f64>> = Vec::with_capacity(model.layers.len() + 1);
    acts.push(x.clone());
    let last = model.layers.len() - 1;
    for (i, layer) in model.layers.iter().enumerate() {
        let mut z = acts[i].clone() * layer.weights.transpose();
        for mut row in z.row_iter_mut() {
            row += layer.biases.transpose();
        }
        if i < last {
            z.apply(|v| *v = v.max(0.0));
        }
        acts.push(z);
    }
    let logits = &acts[model.layers.len()];
    let mut loss = 0.0;
    let mut delta = DMatrix::zeros(y.len(), 1);
    for (k, &target) in y.iter().enumerate() {
        let z = logits[(k, 0)];
        loss += softplus(z) - target * z;
        delta[(k, 0)] = (sigmoid(z) - target) / n;
    }

    let mut grads = Vec::with_capacity(model.layers.len());
    for i in (0..model.layers.len()).rev() {
        let layer = &model.layers[i];
        let weights = delta.transpose() * &acts[i];
        let biases = DVector::from_iterator(delta.ncols(), delta.column_iter().map(|c| c.sum()));
        grads.push(Layer { weights, biases });
        if i > 0 {
            let mut back = &delta * &layer.weights;
            back.zip_apply(&acts[i], |d, a| {
                if a <= 0.0 {
                    *d = 0.0;
                }
            });
            delta = back;
        }
    }
    grads.reverse();
    (loss / n, MlpGradient { layers: grads })
}

fn design(data: &EmbeddingDataset, rows: &[usize]) -> (DMatrix<f64>, Vec<f64>) {
    let dim = data.dimension();
    let recs = data.records();
    let x = DMatrix::from_fn(rows.len(), dim, |i, j| f64::from(recs[rows[i]].features[j]));
    let y = rows
        .iter()
        .map(|&i| f64::from(recs[i].label.code()))
        .collect();
    (x, y)
}

pub fn mlp_loss_grad(model: &MlpModel, batch: &EmbeddingDataset) -> Result<(f64, MlpGradient)> {
    batch.require_nonempty()?;
    Error::check_dim(model.dimension(), batch.dimension())?;
    let rows: Vec<usize> = (0..batch.len()).collect();
    let (x, y) = design(batch, &rows);
    Ok(batch_loss_grad(model, &x, &y))
}

/// Trained model plus the mean mini-batch loss of each epoch.
#[derive(Debug, Clone)]
pub struct MlpOutcome {
    pub model: MlpModel,
    pub loss_trace: Vec<f64>,
    pub initial_loss: f64,
    pub final_loss: f64,
}

pub fn mlp_train(
    data: &EmbeddingDataset,
    arch: &MlpArchitecture,
    config: &MlpTrainConfig,
) -> Result<MlpModel> {
    mlp_train_traced(data, arch, config).map(|o| o.model)
}

pub fn mlp_train_traced(
    data: &EmbeddingDataset,
    arch: &MlpArchitecture,
    config: &MlpTrainConfig,
) -> Result<MlpOutcome> {
    data.require_both_classes(1)?;
    Error::check_dim(arch.input_dim, data.dimension())?;
    if config.step_size.is_nan()
        || config.step_size <= 0.0
        || !(0.0..1.0).contains(&config.momentum)
        || config.batch_size == 0
    {
        return Err(Error::Contract(format!(
            "invalid MLP training config {config:?}"
        )));
    }
    let mut model = MlpModel::initialize(arch.clone(), rng::derive_seed(config.seed, 0));
    let all: Vec<usize> = (0..data.len()).collect();
    let (full_x, full_y) = design(data, &all);
    let initial_loss = batch_loss_grad(&model, &full_x, &full_y).0;

    let batch = config.batch_size.min(data.len());
    let mut shuffle_rng = rng::sub_stream(config.seed, 1);
    let mut velocity = MlpModel::zeros(arch.clone());
    let mut order = all.clone();
    let mut loss_trace = Vec::with_capacity(config.epochs);
    for epoch in 0..config.epochs {
        order.shuffle(&mut shuffle_rng);
        let mut epoch_loss = 0.0;
        for chunk in order.chunks(batch) {
            let (x, y) = design(data, chunk);
            let (loss, grad) = batch_loss_grad(&model, &x, &y);
            if !loss.is_finite() {
                return Err(Error::Training(format!(
                    "MLP loss diverged at epoch {epoch}; try a smaller step size than {}",
                    config.step_size
                )));
            }
            epoch_loss += loss * chunk.len() as f64;
            for ((layer, v), g) in model
                .layers
                .iter_mut()
                .zip(&mut velocity.layers)
                .zip(&grad.layers)
            {
                v.weights *= config.momentum;
                v.weights -= config.step_size * &g.weights;
                v.biases *= config.momentum;
                v.biases -= config.step_size * &g.biases;
                layer.weights += &v.weights;
                layer.biases += &v.biases;
            }
        }
        loss_trace.push(epoch_loss / data.len() as f64);
    }
    let final_loss = batch_loss_grad(&model, &full_x, &full_y).0;
    if !final_loss.is_finite() {
        return Err(Error::Training(format!(
            "MLP loss diverged; try a smaller step size than {}",
            config.step_size
        )));
    }
    Ok(MlpOutcome {
        model,
        loss_trace,
        initial_loss,
        final_loss,
    })
}
