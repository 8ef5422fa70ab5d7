use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::model::SliceProbs;
use crate::phase::PhaseLabel;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub threshold: f64,
    pub fpr: f64,
    pub tpr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    pub auc: f64,
    /// From `(0, 0)` at threshold +inf down to `(1, 1)`, one point per
    /// distinct score.
    pub points: Vec<RocPoint>,
}

/// One-vs-rest ROC for `class`, scoring each item by its `class` score.
pub fn roc_auc(
    truth: &[PhaseLabel],
    scores: &[SliceProbs],
    class: PhaseLabel,
) -> Result<RocCurve, EvalError> {
    if truth.len() != scores.len() {
        return Err(EvalError::LengthMismatch {
            truth: truth.len(),
            pred: scores.len(),
        });
    }
    let s: Vec<f64> = scores.iter().map(|p| p.get(class)).collect();
    let pos: Vec<bool> = truth.iter().map(|&t| t == class).collect();
    auc_from_scores(&s, &pos).ok_or(EvalError::DegenerateClass(class))
}

/// Mann-Whitney AUC with mid-ranks for ties, plus the ROC curve. `None` when
/// either class is absent.
pub fn auc_from_scores(scores: &[f64], positive: &[bool]) -> Option<RocCurve> {
    let n_pos = positive.iter().filter(|&&p| p).count();
    let n_neg = positive.len() - n_pos;
    if n_pos == 0 || n_neg == 0 || scores.len() != positive.len() {
        return None;
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    let mut pos_rank_sum = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        // Ranks i+1..=j+1 share their mean.
        let mid = (i + j) as f64 / 2.0 + 1.0;
        pos_rank_sum += mid * order[i..=j].iter().filter(|&&k| positive[k]).count() as f64;
        i = j + 1;
    }
    let (p, n) = (n_pos as f64, n_neg as f64);
    let auc = (pos_rank_sum - p * (p + 1.0) / 2.0) / (p * n);

    let mut points = vec![RocPoint {
        threshold: f64::INFINITY,
        fpr: 0.0,
        tpr: 0.0,
    }];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut k = order.len();
    while k > 0 {
        let threshold = scores[order[k - 1]];
        while k > 0 && scores[order[k - 1]] == threshold {
            if positive[order[k - 1]] {
                tp += 1;
            } else {
                fp += 1;
            }
            k -= 1;
        }
        points.push(RocPoint {
            threshold,
            fpr: fp as f64 / n,
            tpr: tp as f64 / p,
        });
    }
    Some(RocCurve { auc, points })
}
