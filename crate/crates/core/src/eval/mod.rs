//! Classification metrics, percentile-bootstrap confidence intervals,
//! one-vs-rest ROC analysis and study-level train/test splitting.

mod bootstrap;
mod labels;
mod metrics;
mod report;
mod roc;
mod split;

pub use bootstrap::{bootstrap_ci, percentile, BootstrapCI};
pub use labels::{read_labels, write_labels, LabelRecord};
pub use metrics::{confusion, macro_metrics, ClassMetrics, ConfusionMatrix, MacroMetrics, Metric};
pub use report::{ClassAuc, EvalReport, LevelReport};
pub use roc::{auc_from_scores, roc_auc, RocCurve, RocPoint};
pub use split::{study_split, StudySplit};

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("truth has {truth} items, predictions have {pred}")]
    LengthMismatch { truth: usize, pred: usize },
    #[error("nothing to evaluate")]
    Empty,
    #[error("class {0} needs at least one positive and one negative item")]
    DegenerateClass(crate::PhaseLabel),
    #[error("need at least 2 studies to split, found {0}")]
    TooFewStudies(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("label file row {row}: {message}")]
    Schema { row: usize, message: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
