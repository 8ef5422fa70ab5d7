use serde::{Deserialize, Serialize};

use super::bootstrap::{bootstrap_ci, BootstrapCI};
use super::metrics::{confusion, macro_metrics, ConfusionMatrix, MacroMetrics, Metric};
use super::roc::roc_auc;
use super::EvalError;
use crate::model::SliceProbs;
use crate::phase::PhaseLabel;
use crate::pipeline::SweepRow;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassAuc {
    pub phase: PhaseLabel,
    /// `None` when the class has no positives or no negatives.
    pub auc: Option<f64>,
}

/// Metrics for one evaluation level (scans or slices).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelReport {
    pub items: usize,
    pub confusion: ConfusionMatrix,
    pub metrics: MacroMetrics,
    pub intervals: Vec<BootstrapCI>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub auc: Option<Vec<ClassAuc>>,
}

impl LevelReport {
    /// Confusion, macro metrics and a bootstrap interval for every
    /// [`Metric`], plus one-vs-rest AUCs when scores are supplied.
    pub fn evaluate(
        truth: &[PhaseLabel],
        pred: &[PhaseLabel],
        scores: Option<&[SliceProbs]>,
        resamples: usize,
        level: f64,
        seed: u64,
    ) -> Result<Self, EvalError> {
        let cm = confusion(truth, pred)?;
        let items: Vec<_> = truth.iter().copied().zip(pred.iter().copied()).collect();
        let intervals = Metric::ALL
            .iter()
            .map(|&m| bootstrap_ci(&items, m, resamples, level, seed))
            .collect::<Result<Vec<_>, _>>()?;
        let auc = match scores {
            Some(s) => Some(
                PhaseLabel::ALL
                    .iter()
                    .map(|&phase| match roc_auc(truth, s, phase) {
                        Ok(curve) => Ok(ClassAuc {
                            phase,
                            auc: Some(curve.auc),
                        }),
                        Err(EvalError::DegenerateClass(_)) => Ok(ClassAuc { phase, auc: None }),
                        Err(e) => Err(e),
                    })
                    .collect::<Result<Vec<_>, _>>()?,
            ),
            None => None,
        };
        Ok(Self {
            items: truth.len(),
            confusion: cm,
            metrics: macro_metrics(&cm),
            intervals,
            auc,
        })
    }
}

/// Serialized as pretty JSON by the CLI.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EvalReport {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan_level: Option<LevelReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slice_level: Option<LevelReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_sweep: Option<Vec<SweepRow>>,
}
