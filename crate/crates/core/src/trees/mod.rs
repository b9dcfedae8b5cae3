//! Decision trees and tree/discriminant ensembles.

mod ensemble;
mod tree;

pub use ensemble::{
    adaboost_learner_weight, adaboost_train, adaboost_train_traced, bagging_train,
    ensemble_predict, rusboost_train, rusboost_train_traced, subspace_discriminant_train,
    BaggingParams, BaseLearner, BoostParams, BoostTrace, EnsembleKind, EnsembleModel, Learner,
    SubspaceParams, DEFAULT_BOOST_LEARN_RATE, DEFAULT_BOOST_MAX_SPLITS, DEFAULT_LEARNERS,
};
pub use tree::{tree_train, DecisionTree, Node};
