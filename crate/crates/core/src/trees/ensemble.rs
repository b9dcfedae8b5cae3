//! Bagged trees, AdaBoost, RUSBoost and random-subspace discriminant.

use rand::seq::index;
use rand::RngExt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::{grow, DecisionTree, Design};
use crate::baseline::{lda_from_moments, lda_score, sigmoid, ClassMoments, LdaModel};
use crate::embedding::{EmbeddingDataset, GenderLabel};
use crate::error::{Error, Result};
use crate::rng;

pub const DEFAULT_LEARNERS: usize = 30;
pub const DEFAULT_BOOST_LEARN_RATE: f64 = 0.1;
/// Split budget for boosted trees.
pub const DEFAULT_BOOST_MAX_SPLITS: usize = 20;

/// Error used in place of an exact zero when computing a learner weight.
const MIN_ROUND_ERROR: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EnsembleKind {
    Bagging,
    AdaBoost,
    RusBoost,
    SubspaceDiscriminant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum BaseLearner {
    Tree(DecisionTree),
    Lda(LdaModel),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Learner {
    pub model: BaseLearner,
    pub weight: f64,
    /// Feature indices the learner sees (random-subspace members only).
    pub features: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleModel {
    pub kind: EnsembleKind,
    pub learners: Vec<Learner>,
    /// Configured size; boosting may stop with fewer learners.
    pub n_learners: usize,
    pub seed: u64,
    pub dimension: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaggingParams {
    pub n_learners: usize,
    pub max_splits: usize,
    pub seed: u64,
    /// When false every learner sees the full training set (test hook).
    pub bootstrap: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoostParams {
    pub n_learners: usize,
    pub max_splits: usize,
    pub learn_rate: f64,
    pub seed: u64,
}

impl Default for BoostParams {
    fn default() -> Self {
        Self {
            n_learners: DEFAULT_LEARNERS,
            max_splits: DEFAULT_BOOST_MAX_SPLITS,
            learn_rate: DEFAULT_BOOST_LEARN_RATE,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubspaceParams {
    pub n_learners: usize,
    pub subspace_dim: usize,
    pub seed: u64,
}

impl SubspaceParams {
    /// Defaults with `subspace_dim = floor(d / 2)` (at least 1).
    pub fn for_dimension(dimension: usize) -> Self {
        Self {
            n_learners: DEFAULT_LEARNERS,
            subspace_dim: (dimension / 2).max(1),
            seed: 0,
        }
    }
}

/// Per-round diagnostics from boosting.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BoostTrace {
    /// Weighted training error of each round's tree.
    pub round_errors: Vec<f64>,
    /// Sum of the sample weights after each round's update.
    pub weight_sums: Vec<f64>,
    /// Smallest sample weight after each round.
    pub min_weights: Vec<f64>,
    /// `[female, male]` counts of the records each round's tree was fit on.
    pub subsample_counts: Vec<[usize; 2]>,
}

fn check_learners(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::Contract(
            "an ensemble needs at least one learner".into(),
        ))
    } else {
        Ok(())
    }
}

pub fn bagging_train(data: &EmbeddingDataset, params: &BaggingParams) -> Result<EnsembleModel> {
    data.require_nonempty()?;
    check_learners(params.n_learners)?;
    let design = Design::new(data);
    let n = design.len();
    let learners = (0..params.n_learners)
        .into_par_iter()
        .map(|t| {
            let weights = if params.bootstrap {
                let mut rng = rng::sub_stream(params.seed, t as u64);
                let mut counts = vec![0u32; n];
                for _ in 0..n {
                    counts[rng.random_range(0..n)] += 1;
                }
                counts.iter().map(|&c| f64::from(c) / n as f64).collect()
            } else {
                vec![1.0 / n as f64; n]
            };
            grow(&design, &weights, params.max_splits).map(|tree| Learner {
                model: BaseLearner::Tree(tree),
                weight: 1.0,
                features: None,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EnsembleModel {
        kind: EnsembleKind::Bagging,
        learners,
        n_learners: params.n_learners,
        seed: params.seed,
        dimension: design.dim,
    })
}

/// `learn_rate * ln((1 - eps) / eps) / 2`.
pub fn adaboost_learner_weight(error: f64, learn_rate: f64) -> f64 {
    let e = error.clamp(MIN_ROUND_ERROR, 1.0 - MIN_ROUND_ERROR);
    learn_rate * 0.5 * ((1.0 - e) / e).ln()
}

pub fn adaboost_train(data: &EmbeddingDataset, params: &BoostParams) -> Result<EnsembleModel> {
    boost(data, params, false).map(|(m, _)| m)
}

pub fn adaboost_train_traced(
    data: &EmbeddingDataset,
    params: &BoostParams,
) -> Result<(EnsembleModel, BoostTrace)> {
    boost(data, params, false)
}

pub fn rusboost_train(data: &EmbeddingDataset, params: &BoostParams) -> Result<EnsembleModel> {
    boost(data, params, true).map(|(m, _)| m)
}

pub fn rusboost_train_traced(
    data: &EmbeddingDataset,
    params: &BoostParams,
) -> Result<(EnsembleModel, BoostTrace)> {
    boost(data, params, true)
}

/// Majority-class records drawn without replacement with probability
/// proportional to weight (exponential-key method), plus every minority record.
fn undersample(design: &Design, weights: &[f64], rng: &mut rng::StreamRng) -> Vec<usize> {
    let mut by_class: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    for (i, &label) in design.y.iter().enumerate() {
        by_class[label as usize].push(i);
    }
    let (minority, majority) = if by_class[0].len() < by_class[1].len() {
        (0, 1)
    } else {
        (1, 0)
    };
    let take = by_class[minority].len();
    let mut keyed: Vec<(f64, usize)> = by_class[majority]
        .iter()
        .map(|&i| {
            let u: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
            (u.ln() / weights[i], i)
        })
        .collect();
    keyed.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut chosen: Vec<usize> = keyed[..take].iter().map(|&(_, i)| i).collect();
    chosen.extend_from_slice(&by_class[minority]);
    chosen.sort_unstable();
    chosen
}

fn boost(
    data: &EmbeddingDataset,
    params: &BoostParams,
    undersampled: bool,
) -> Result<(EnsembleModel, BoostTrace)> {
    data.require_both_classes(1)?;
    check_learners(params.n_learners)?;
    if !(params.learn_rate > 0.0 && params.learn_rate.is_finite()) {
        return Err(Error::Contract(format!(
            "learn_rate = {} must be positive",
            params.learn_rate
        )));
    }
    let design = Design::new(data);
    let n = design.len();
    let mut weights = vec![1.0 / n as f64; n];
    let mut learners = Vec::new();
    let mut trace = BoostTrace::default();

    for t in 0..params.n_learners {
        let fit_weights = if undersampled {
            let mut rng = rng::sub_stream(params.seed, t as u64);
            let chosen = undersample(&design, &weights, &mut rng);
            let mut counts = [0usize; 2];
            let mut w = vec![0.0; n];
            for &i in &chosen {
                counts[design.y[i] as usize] += 1;
                w[i] = weights[i];
            }
            trace.subsample_counts.push(counts);
            w
        } else {
            trace.subsample_counts.push(data.class_counts());
            weights.clone()
        };
        let tree = grow(&design, &fit_weights, params.max_splits)?;
        let predictions: Vec<GenderLabel> = (0..n)
            .map(|i| tree.leaf_unchecked(design.row(i)).0)
            .collect();
        let error: f64 = (0..n)
            .filter(|&i| predictions[i] != design.y[i])
            .map(|i| weights[i])
            .sum();
        trace.round_errors.push(error);

        if error >= 0.5 {
            if learners.is_empty() {
                // No better-than-chance learner exists; keep one so the
                // ensemble can still vote.
                learners.push(Learner {
                    model: BaseLearner::Tree(tree),
                    weight: 1.0,
                    features: None,
                });
            }
            break;
        }
        let beta = adaboost_learner_weight(error, params.learn_rate);
        learners.push(Learner {
            model: BaseLearner::Tree(tree),
            weight: beta,
            features: None,
        });
        if error == 0.0 {
            break;
        }
        for i in 0..n {
            let agree = design.y[i].sign() * predictions[i].sign();
            weights[i] *= (-beta * agree).exp();
        }
        let sum: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= sum);
        trace.weight_sums.push(weights.iter().sum());
        trace
            .min_weights
            .push(weights.iter().copied().fold(f64::INFINITY, f64::min));
    }
    let kind = if undersampled {
        EnsembleKind::RusBoost
    } else {
        EnsembleKind::AdaBoost
    };
    Ok((
        EnsembleModel {
            kind,
            learners,
            n_learners: params.n_learners,
            seed: params.seed,
            dimension: design.dim,
        },
        trace,
    ))
}

pub fn subspace_discriminant_train(
    data: &EmbeddingDataset,
    params: &SubspaceParams,
) -> Result<EnsembleModel> {
    check_learners(params.n_learners)?;
    let d = data.dimension();
    if params.subspace_dim == 0 || params.subspace_dim > d {
        return Err(Error::Contract(format!(
            "subspace_dim = {} must lie in 1..={d}",
            params.subspace_dim
        )));
    }
    let moments = ClassMoments::from_dataset(data)?;
    let learners = (0..params.n_learners)
        .into_par_iter()
        .map(|t| {
            let mut rng = rng::sub_stream(params.seed, t as u64);
            let mut features = index::sample(&mut rng, d, params.subspace_dim).into_vec();
            features.sort_unstable();
            lda_from_moments(&moments, &features).map(|lda| Learner {
                model: BaseLearner::Lda(lda),
                weight: 1.0,
                features: Some(features),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EnsembleModel {
        kind: EnsembleKind::SubspaceDiscriminant,
        learners,
        n_learners: params.n_learners,
        seed: params.seed,
        dimension: d,
    })
}

/// Combined label and male score in `[0, 1]`; ties resolve to female.
///
/// * bagging: mean leaf score, male above 0.5
/// * boosting: weighted male vote share, male when `sum beta_t h_t > 0`
/// * subspace: mean log posterior odds, male above 0, score is its sigmoid
pub fn ensemble_predict(model: &EnsembleModel, x: &[f64]) -> Result<(GenderLabel, f64)> {
    Error::check_dim(model.dimension, x.len())?;
    let male_if = |b: bool| {
        if b {
            GenderLabel::Male
        } else {
            GenderLabel::Female
        }
    };
    match model.kind {
        EnsembleKind::Bagging => {
            let sum: f64 = model
                .learners
                .iter()
                .map(|l| tree_of(l).leaf_unchecked(x).1)
                .sum();
            let score = sum / model.learners.len() as f64;
            Ok((male_if(score > 0.5), score))
        }
        EnsembleKind::AdaBoost | EnsembleKind::RusBoost => {
            let (mut male, mut total) = (0.0, 0.0);
            for l in &model.learners {
                total += l.weight;
                if tree_of(l).leaf_unchecked(x).0 == GenderLabel::Male {
                    male += l.weight;
                }
            }
            let score = if total > 0.0 { male / total } else { 0.5 };
            Ok((male_if(male > total - male), score))
        }
        EnsembleKind::SubspaceDiscriminant => {
            let mut sum = 0.0;
            let mut sub = Vec::new();
            for l in &model.learners {
                let BaseLearner::Lda(lda) = &l.model else {
                    return Err(Error::Contract(
                        "subspace learner is not a discriminant".into(),
                    ));
                };
                sub.clear();
                match &l.features {
                    Some(idx) => sub.extend(idx.iter().map(|&j| x[j])),
                    None => sub.extend_from_slice(x),
                }
                sum += lda_score(lda, &sub)?;
            }
            let mean = sum / model.learners.len() as f64;
            Ok((male_if(mean > 0.0), sigmoid(mean)))
        }
    }
}

fn tree_of(learner: &Learner) -> &DecisionTree {
    match &learner.model {
        BaseLearner::Tree(t) => t,
        BaseLearner::Lda(_) => unreachable!("tree ensembles hold only trees"),
    }
}
