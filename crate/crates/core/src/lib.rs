//! Gender classification on frozen face-recognition embeddings.
//!
//! Face images go through a pretrained ArcFace network ([`extract`]) to get
//! 512-d embeddings ([`embedding`]). Classical learners are trained on those
//! vectors: kernel SVM ([`svm`]), logistic regression, linear discriminant,
//! naive Bayes and KNN ([`baseline`]), CART trees and ensembles ([`trees`]),
//! and a small MLP ([`mlp`]). [`eval`] implements the reported metrics, and
//! [`artifact`] / [`bench`] provide model persistence and the benchmark suite.

pub mod artifact;
pub mod baseline;
pub mod bench;
pub mod classifier;
pub mod embedding;
pub mod error;
pub mod eval;
pub mod extract;
pub mod mlp;
pub mod rng;
pub mod svm;
pub mod synthetic;
pub mod trees;

pub use classifier::{Classifier, Family, Prediction};
pub use embedding::{EmbeddingDataset, EmbeddingRecord, GenderLabel};
pub use error::{Error, Result};
