//! Accuracy, macro-averaged recall/precision/F-measure, ROC/AUC and latency.

mod latency;
mod metrics;
mod report;
mod roc;

pub use latency::{measure_latency, LatencyStats};
pub use metrics::{
    accuracy, confusion_from_predictions, degenerate_terms, f_measure, format_accuracy_pct,
    format_f1_pct, macro_recall_precision, ConfusionCounts,
};
pub use report::{EvalReport, RocPair};
pub use roc::{roc_curve, RocCurve};
