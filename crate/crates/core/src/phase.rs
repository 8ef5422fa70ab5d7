use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Contrast-enhancement phase of a CT series.
///
/// The ordinal order is fixed and is what every tie-break in the crate falls
/// back to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseLabel {
    NonContrast = 0,
    Arterial = 1,
    Venous = 2,
    Other = 3,
}

pub const NUM_PHASES: usize = 4;

impl PhaseLabel {
    pub const ALL: [PhaseLabel; NUM_PHASES] = [
        PhaseLabel::NonContrast,
        PhaseLabel::Arterial,
        PhaseLabel::Venous,
        PhaseLabel::Other,
    ];

    pub fn ordinal(self) -> usize {
        self as usize
    }

    pub fn from_ordinal(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    /// Name used in CSV files and reports.
    pub fn as_str(self) -> &'static str {
        match self {
            PhaseLabel::NonContrast => "non_contrast",
            PhaseLabel::Arterial => "arterial",
            PhaseLabel::Venous => "venous",
            PhaseLabel::Other => "other",
        }
    }
}

impl fmt::Display for PhaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown phase label {0:?} (expected non_contrast, arterial, venous or other)")]
pub struct UnknownPhase(pub String);

impl FromStr for PhaseLabel {
    type Err = UnknownPhase;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "non_contrast" => Ok(PhaseLabel::NonContrast),
            "arterial" => Ok(PhaseLabel::Arterial),
            "venous" => Ok(PhaseLabel::Venous),
            "other" => Ok(PhaseLabel::Other),
            other => Err(UnknownPhase(other.to_string())),
        }
    }
}
