use serde::{Deserialize, Serialize};

use super::{
    accuracy, confusion_from_predictions, degenerate_terms, f_measure, format_accuracy_pct,
    format_f1_pct, macro_recall_precision, roc_curve, ConfusionCounts, LatencyStats, RocCurve,
};
use crate::embedding::GenderLabel;
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocPair {
    pub female: RocCurve,
    pub male: RocCurve,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub confusion: ConfusionCounts,
    pub accuracy: f64,
    pub macro_recall: f64,
    pub macro_precision: f64,
    pub f_measure: f64,
    pub roc: RocPair,
    pub latency: LatencyStats,
    pub model_tag: String,
    /// Metric terms that fell back to 0 because of a zero denominator.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub degenerate_terms: Vec<String>,
}

impl EvalReport {
    /// `male_scores` are continuous scores where larger means "more male";
    /// the female curve is built from their negation.
    pub fn build(
        truth: &[GenderLabel],
        predicted: &[GenderLabel],
        male_scores: &[f64],
        latency: LatencyStats,
        model_tag: impl Into<String>,
    ) -> Result<Self> {
        let confusion = confusion_from_predictions(truth, predicted)?;
        let (macro_recall, macro_precision) = macro_recall_precision(&confusion);
        let female_scores: Vec<f64> = male_scores.iter().map(|s| -s).collect();
        Ok(Self {
            accuracy: accuracy(&confusion)?,
            macro_recall,
            macro_precision,
            f_measure: f_measure(&confusion),
            roc: RocPair {
                female: roc_curve(truth, &female_scores, GenderLabel::Female)?,
                male: roc_curve(truth, male_scores, GenderLabel::Male)?,
            },
            latency,
            model_tag: model_tag.into(),
            degenerate_terms: degenerate_terms(&confusion),
            confusion,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization is infallible")
    }

    /// One line in the style of a results table row.
    pub fn summary_line(&self) -> String {
        let c = &self.confusion;
        format!(
            "{}  TF={} TM={} FF={} FM={}  acc={}%  F1={}%  AUC(f)={:.4} AUC(m)={:.4}",
            self.model_tag,
            c.true_females,
            c.true_males,
            c.false_females,
            c.false_males,
            format_accuracy_pct(self.accuracy),
            format_f1_pct(self.f_measure),
            self.roc.female.auc,
            self.roc.male.auc,
        )
    }

    /// ROC points as CSV with header `positive,fpr,tpr`.
    pub fn roc_csv(&self) -> String {
        let mut out = String::from("positive,fpr,tpr\n");
        for curve in [&self.roc.female, &self.roc.male] {
            for [fpr, tpr] in &curve.points {
                out.push_str(&format!("{},{fpr},{tpr}\n", curve.positive));
            }
        }
        out
    }
}
