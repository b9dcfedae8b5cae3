use serde::{Deserialize, Serialize};

use crate::embedding::GenderLabel;
use crate::error::{Error, Result};

/// ROC curve for one positive class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    pub positive: GenderLabel,
    /// `[false-positive rate, true-positive rate]` pairs from (0,0) to (1,1).
    pub points: Vec<[f64; 2]>,
    pub auc: f64,
}

/// Sweeps a threshold over the distinct scores in descending order.
///
/// Higher scores mean "more positive". Tied scores move the curve in a single
/// diagonal step, so the trapezoidal area equals the Mann-Whitney statistic
/// with ties counted as one half.
pub fn roc_curve(truth: &[GenderLabel], scores: &[f64], positive: GenderLabel) -> Result<RocCurve> {
    if truth.len() != scores.len() {
        return Err(Error::Contract(format!(
            "{} labels but {} scores",
            truth.len(),
            scores.len()
        )));
    }
    if let Some(i) = scores.iter().position(|s| !s.is_finite()) {
        return Err(Error::Contract(format!("score {i} is not finite")));
    }
    let n_pos = truth.iter().filter(|&&t| t == positive).count() as u64;
    let n_neg = truth.len() as u64 - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::Contract(
            "ROC needs both classes in the truth labels".into(),
        ));
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    let mut points = vec![[0.0, 0.0]];
    // Twice the area in units of (1/n_neg) x (1/n_pos), kept exact.
    let mut twice_area: u128 = 0;
    let (mut tp, mut fp) = (0u64, 0u64);
    let mut i = 0;
    while i < order.len() {
        let threshold = scores[order[i]];
        let (tp_before, fp_before) = (tp, fp);
        while i < order.len() && scores[order[i]] == threshold {
            if truth[order[i]] == positive {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        twice_area += u128::from(fp - fp_before) * u128::from(tp + tp_before);
        points.push([fp as f64 / n_neg as f64, tp as f64 / n_pos as f64]);
    }
    let auc = twice_area as f64 / (2.0 * n_pos as f64 * n_neg as f64);
    Ok(RocCurve {
        positive,
        points,
        auc,
    })
}
