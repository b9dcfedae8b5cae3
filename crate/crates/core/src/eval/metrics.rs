use serde::{Deserialize, Serialize};

use crate::embedding::GenderLabel;
use crate::error::{Error, Result};

/// The four counts of a binary gender confusion matrix.
///
/// `false_females` are males predicted female; `false_males` are females
/// predicted male.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    #[serde(rename = "tf")]
    pub true_females: u64,
    #[serde(rename = "tm")]
    pub true_males: u64,
    #[serde(rename = "ff")]
    pub false_females: u64,
    #[serde(rename = "fm")]
    pub false_males: u64,
}

impl ConfusionCounts {
    pub const fn new(
        true_females: u64,
        true_males: u64,
        false_females: u64,
        false_males: u64,
    ) -> Self {
        Self {
            true_females,
            true_males,
            false_females,
            false_males,
        }
    }

    pub fn total(&self) -> u64 {
        self.true_females + self.true_males + self.false_females + self.false_males
    }

    pub fn record(&mut self, truth: GenderLabel, predicted: GenderLabel) {
        match (truth, predicted) {
            (GenderLabel::Female, GenderLabel::Female) => self.true_females += 1,
            (GenderLabel::Male, GenderLabel::Male) => self.true_males += 1,
            (GenderLabel::Male, GenderLabel::Female) => self.false_females += 1,
            (GenderLabel::Female, GenderLabel::Male) => self.false_males += 1,
        }
    }
}

pub fn confusion_from_predictions(
    truth: &[GenderLabel],
    predicted: &[GenderLabel],
) -> Result<ConfusionCounts> {
    if truth.len() != predicted.len() {
        return Err(Error::Contract(format!(
            "{} truth labels but {} predictions",
            truth.len(),
            predicted.len()
        )));
    }
    if truth.is_empty() {
        return Err(Error::Contract("no predictions to count".into()));
    }
    let mut counts = ConfusionCounts::default();
    for (&t, &p) in truth.iter().zip(predicted) {
        counts.record(t, p);
    }
    Ok(counts)
}

pub fn accuracy(c: &ConfusionCounts) -> Result<f64> {
    let total = c.total();
    if total == 0 {
        return Err(Error::Contract(
            "accuracy of an empty confusion matrix".into(),
        ));
    }
    Ok((c.true_males + c.true_females) as f64 / total as f64)
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Class-averaged recall and precision.
///
/// A per-class term whose denominator is zero contributes 0; see
/// [`degenerate_terms`].
pub fn macro_recall_precision(c: &ConfusionCounts) -> (f64, f64) {
    let recall = 0.5
        * (ratio(c.true_females, c.true_females + c.false_males)
            + ratio(c.true_males, c.true_males + c.false_females));
    let precision = 0.5
        * (ratio(c.true_females, c.true_females + c.false_females)
            + ratio(c.true_males, c.true_males + c.false_males));
    (recall, precision)
}

/// Names of the per-class metric terms that had a zero denominator.
pub fn degenerate_terms(c: &ConfusionCounts) -> Vec<String> {
    let mut out = Vec::new();
    if c.true_females + c.false_males == 0 {
        out.push("recall[female]".to_string());
    }
    if c.true_males + c.false_females == 0 {
        out.push("recall[male]".to_string());
    }
    if c.true_females + c.false_females == 0 {
        out.push("precision[female]".to_string());
    }
    if c.true_males + c.false_males == 0 {
        out.push("precision[male]".to_string());
    }
    out
}

/// Harmonic mean of macro recall and macro precision; 0 when both are 0.
pub fn f_measure(c: &ConfusionCounts) -> f64 {
    let (recall, precision) = macro_recall_precision(c);
    if recall + precision == 0.0 {
        0.0
    } else {
        2.0 * recall * precision / (recall + precision)
    }
}

/// Accuracy as a percentage rounded to one decimal, as printed in result tables.
pub fn format_accuracy_pct(acc: f64) -> String {
    format!("{:.1}", acc * 100.0)
}

/// F-measure as a percentage rounded to two decimals.
pub fn format_f1_pct(f1: f64) -> String {
    format!("{:.2}", f1 * 100.0)
}
