//! Discriminative and distance-based baselines.

mod gnb;
mod knn;
mod lda;
mod logreg;

pub use gnb::{gnb_fit, gnb_posterior, GnbModel, VARIANCE_FLOOR};
pub use knn::{knn_predict, KnnModel, Metric, Weighting, INVERSE_DISTANCE_EPS};
pub use lda::{lda_fit, lda_from_moments, lda_score, ClassMoments, LdaModel, LDA_RIDGE};
pub use logreg::{logreg_loss_grad, logreg_train, LogRegConfig, LogRegModel};

pub(crate) use logreg::{sigmoid, softplus};
