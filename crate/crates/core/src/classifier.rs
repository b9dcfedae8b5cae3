//! One type over every trainable model family.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baseline::{
    gnb_fit, knn_predict, lda_fit, lda_score, logreg_train, GnbModel, KnnModel, LdaModel,
    LogRegConfig, LogRegModel, Metric, Weighting,
};
use crate::embedding::{EmbeddingDataset, GenderLabel};
use crate::error::{Error, Result};
use crate::mlp::{mlp_forward, mlp_train, MlpArchitecture, MlpModel, MlpTrainConfig};
use crate::svm::{smo_train, svm_decision, KernelKind, KernelSpec, SmoParams, SvmModel};
use crate::trees::{
    adaboost_train, bagging_train, ensemble_predict, rusboost_train, subspace_discriminant_train,
    tree_train, BaggingParams, BoostParams, DecisionTree, EnsembleModel, SubspaceParams,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Svm,
    LogisticRegression,
    Lda,
    Knn,
    Mlp,
    NaiveBayes,
    DecisionTree,
    Ensemble,
}

impl Family {
    pub const ALL: [Family; 8] = [
        Family::Svm,
        Family::LogisticRegression,
        Family::Lda,
        Family::Knn,
        Family::Mlp,
        Family::NaiveBayes,
        Family::DecisionTree,
        Family::Ensemble,
    ];

    /// Stable one-byte tag used in model files.
    pub fn code(self) -> u8 {
        match self {
            Family::Svm => 1,
            Family::LogisticRegression => 2,
            Family::Lda => 3,
            Family::Knn => 4,
            Family::Mlp => 5,
            Family::NaiveBayes => 6,
            Family::DecisionTree => 7,
            Family::Ensemble => 8,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.code() == code)
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Svm => "svm",
            Family::LogisticRegression => "logreg",
            Family::Lda => "lda",
            Family::Knn => "knn",
            Family::Mlp => "mlp",
            Family::NaiveBayes => "naive_bayes",
            Family::DecisionTree => "tree",
            Family::Ensemble => "ensemble",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Full training configuration of one model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "algo", rename_all = "snake_case")]
pub enum ModelConfig {
    Svm {
        kernel: KernelKind,
        /// Kernel scale; `None` means the square root of the dimension.
        scale: Option<f64>,
        smo: SmoParams,
    },
    LogisticRegression {
        lambda: f64,
        solver: LogRegConfig,
    },
    Lda,
    Knn {
        k: usize,
        metric: Metric,
        weighting: Weighting,
    },
    Mlp {
        hidden: Vec<usize>,
        train: MlpTrainConfig,
    },
    NaiveBayes,
    DecisionTree {
        max_splits: usize,
    },
    BaggedTrees(BaggingParams),
    AdaBoostTrees(BoostParams),
    RusBoostTrees(BoostParams),
    SubspaceDiscriminant(SubspaceParams),
}

impl ModelConfig {
    pub fn family(&self) -> Family {
        match self {
            ModelConfig::Svm { .. } => Family::Svm,
            ModelConfig::LogisticRegression { .. } => Family::LogisticRegression,
            ModelConfig::Lda => Family::Lda,
            ModelConfig::Knn { .. } => Family::Knn,
            ModelConfig::Mlp { .. } => Family::Mlp,
            ModelConfig::NaiveBayes => Family::NaiveBayes,
            ModelConfig::DecisionTree { .. } => Family::DecisionTree,
            ModelConfig::BaggedTrees(_)
            | ModelConfig::AdaBoostTrees(_)
            | ModelConfig::RusBoostTrees(_)
            | ModelConfig::SubspaceDiscriminant(_) => Family::Ensemble,
        }
    }

    pub fn train(&self, data: &EmbeddingDataset) -> Result<Classifier> {
        data.require_nonempty()?;
        let d = data.dimension();
        Ok(match self {
            ModelConfig::Svm { kernel, scale, smo } => {
                let spec = match scale {
                    Some(s) => KernelSpec::with_scale(*kernel, d, *s)?,
                    None => KernelSpec::new(*kernel, d)?,
                };
                Classifier::Svm(smo_train(data, &spec, smo)?)
            }
            ModelConfig::LogisticRegression { lambda, solver } => {
                Classifier::LogisticRegression(logreg_train(data, *lambda, solver)?)
            }
            ModelConfig::Lda => Classifier::Lda(lda_fit(data)?),
            ModelConfig::Knn {
                k,
                metric,
                weighting,
            } => Classifier::Knn(KnnModel::fit(data, *k, *metric, *weighting)?),
            ModelConfig::Mlp { hidden, train } => {
                let arch = MlpArchitecture::new(d, hidden.clone())?;
                Classifier::Mlp(mlp_train(data, &arch, train)?)
            }
            ModelConfig::NaiveBayes => Classifier::NaiveBayes(gnb_fit(data)?),
            ModelConfig::DecisionTree { max_splits } => {
                let weights = vec![1.0; data.len()];
                Classifier::DecisionTree(tree_train(data, &weights, *max_splits)?)
            }
            ModelConfig::BaggedTrees(p) => Classifier::Ensemble(bagging_train(data, p)?),
            ModelConfig::AdaBoostTrees(p) => Classifier::Ensemble(adaboost_train(data, p)?),
            ModelConfig::RusBoostTrees(p) => Classifier::Ensemble(rusboost_train(data, p)?),
            ModelConfig::SubspaceDiscriminant(p) => {
                Classifier::Ensemble(subspace_discriminant_train(data, p)?)
            }
        })
    }
}

/// Predicted label with a real-valued score; larger scores favor Male.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub label: GenderLabel,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Classifier {
    Svm(SvmModel),
    LogisticRegression(LogRegModel),
    Lda(LdaModel),
    Knn(KnnModel),
    Mlp(MlpModel),
    NaiveBayes(GnbModel),
    DecisionTree(DecisionTree),
    Ensemble(EnsembleModel),
}

fn by_sign(score: f64) -> GenderLabel {
    if score > 0.0 {
        GenderLabel::Male
    } else {
        GenderLabel::Female
    }
}

impl Classifier {
    pub fn family(&self) -> Family {
        match self {
            Classifier::Svm(_) => Family::Svm,
            Classifier::LogisticRegression(_) => Family::LogisticRegression,
            Classifier::Lda(_) => Family::Lda,
            Classifier::Knn(_) => Family::Knn,
            Classifier::Mlp(_) => Family::Mlp,
            Classifier::NaiveBayes(_) => Family::NaiveBayes,
            Classifier::DecisionTree(_) => Family::DecisionTree,
            Classifier::Ensemble(_) => Family::Ensemble,
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            Classifier::Svm(m) => m.dimension(),
            Classifier::LogisticRegression(m) => m.weights.len(),
            Classifier::Lda(m) => m.dimension(),
            Classifier::Knn(m) => m.dimension(),
            Classifier::Mlp(m) => m.dimension(),
            Classifier::NaiveBayes(m) => m.dimension(),
            Classifier::DecisionTree(m) => m.dimension,
            Classifier::Ensemble(m) => m.dimension,
        }
    }

    /// Label and score for one input. Scores are the decision value (SVM),
    /// logit (logistic regression, MLP), discriminant or log-odds (LDA,
    /// naive Bayes), male vote share (KNN, trees) or ensemble score.
    pub fn predict(&self, x: &[f64]) -> Result<Prediction> {
        Error::check_dim(self.dimension(), x.len())?;
        let (label, score) = match self {
            Classifier::Svm(m) => {
                let s = svm_decision(m, x)?;
                (by_sign(s), s)
            }
            Classifier::LogisticRegression(m) => {
                let s = m.logit(x)?;
                (by_sign(s), s)
            }
            Classifier::Lda(m) => {
                let s = lda_score(m, x)?;
                (by_sign(s), s)
            }
            Classifier::Knn(m) => knn_predict(m, x)?,
            Classifier::Mlp(m) => {
                let (_, logit) = mlp_forward(m, x)?;
                (by_sign(logit), logit)
            }
            Classifier::NaiveBayes(m) => {
                let s = m.log_odds(x)?;
                (by_sign(s), s)
            }
            Classifier::DecisionTree(m) => m.predict(x)?,
            Classifier::Ensemble(m) => ensemble_predict(m, x)?,
        };
        Ok(Prediction { label, score })
    }

    /// Predictions for every record, in record order.
    pub fn predict_dataset(&self, data: &EmbeddingDataset) -> Result<Vec<Prediction>> {
        Error::check_dim(self.dimension(), data.dimension())?;
        data.records()
            .par_iter()
            .map(|r| self.predict(&r.features_f64()))
            .collect()
    }
}
