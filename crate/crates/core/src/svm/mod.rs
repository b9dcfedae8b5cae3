//! Kernel SVM trained with sequential minimal optimization.

mod kernel;
mod model;
mod smo;

pub use kernel::{KernelKind, KernelSpec};
pub use model::{svm_decision, svm_predict, SvmModel};
pub use smo::{smo_train, smo_train_traced, SmoOutcome, SmoParams};
