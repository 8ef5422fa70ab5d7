use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::phase::{PhaseLabel, NUM_PHASES};

/// Counts indexed `[truth][predicted]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionMatrix(pub [[u64; NUM_PHASES]; NUM_PHASES]);

impl ConfusionMatrix {
    pub fn add(&mut self, truth: PhaseLabel, pred: PhaseLabel) {
        self.0[truth.ordinal()][pred.ordinal()] += 1;
    }

    pub fn total(&self) -> u64 {
        self.0.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..NUM_PHASES).map(|i| self.0[i][i]).sum()
    }

    /// One-vs-rest `(tp, fp, fn, tn)` for class `c`.
    pub fn one_vs_rest(&self, c: usize) -> (u64, u64, u64, u64) {
        let tp = self.0[c][c];
        let predicted: u64 = (0..NUM_PHASES).map(|t| self.0[t][c]).sum();
        let actual: u64 = self.0[c].iter().sum();
        let fp = predicted - tp;
        let fn_ = actual - tp;
        (tp, fp, fn_, self.total() - tp - fp - fn_)
    }
}

pub fn confusion(truth: &[PhaseLabel], pred: &[PhaseLabel]) -> Result<ConfusionMatrix, EvalError> {
    if truth.len() != pred.len() {
        return Err(EvalError::LengthMismatch {
            truth: truth.len(),
            pred: pred.len(),
        });
    }
    if truth.is_empty() {
        return Err(EvalError::Empty);
    }
    let mut cm = ConfusionMatrix::default();
    for (&t, &p) in truth.iter().zip(pred) {
        cm.add(t, p);
    }
    Ok(cm)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MacroMetrics {
    pub accuracy: f64,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    pub per_class: [ClassMetrics; NUM_PHASES],
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Per-class precision/recall/F1 and their unweighted means. Empty
/// denominators give 0, and F1 is 0 when precision and recall are both 0.
pub fn macro_metrics(cm: &ConfusionMatrix) -> MacroMetrics {
    let per_class: [ClassMetrics; NUM_PHASES] = std::array::from_fn(|c| {
        let (tp, fp, fn_, tn) = cm.one_vs_rest(c);
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        ClassMetrics {
            tp,
            fp,
            fn_,
            tn,
            precision,
            recall,
            f1,
        }
    });
    let mean = |f: fn(&ClassMetrics) -> f64| per_class.iter().map(f).sum::<f64>() / NUM_PHASES as f64;
    MacroMetrics {
        accuracy: ratio(cm.trace(), cm.total()),
        macro_precision: mean(|m| m.precision),
        macro_recall: mean(|m| m.recall),
        macro_f1: mean(|m| m.f1),
        per_class,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Accuracy,
    MacroPrecision,
    MacroRecall,
    MacroF1,
}

impl Metric {
    pub const ALL: [Metric; 4] = [
        Metric::Accuracy,
        Metric::MacroPrecision,
        Metric::MacroRecall,
        Metric::MacroF1,
    ];

    pub fn of(self, m: &MacroMetrics) -> f64 {
        match self {
            Metric::Accuracy => m.accuracy,
            Metric::MacroPrecision => m.macro_precision,
            Metric::MacroRecall => m.macro_recall,
            Metric::MacroF1 => m.macro_f1,
        }
    }
}
