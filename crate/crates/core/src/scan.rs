use crate::phase::PhaseLabel;
use crate::preprocess::Image2D;

/// One axial slice in Hounsfield units.
#[derive(Debug, Clone, PartialEq)]
pub struct CtSlice {
    pub instance_number: i32,
    pub hu: Image2D,
}

/// The ordered slices of one series.
#[derive(Debug, Clone, PartialEq)]
pub struct CtScan {
    pub series_uid: String,
    pub study_uid: String,
    pub slices: Vec<CtSlice>,
    pub label: Option<PhaseLabel>,
}

impl CtScan {
    pub fn len(&self) -> usize {
        self.slices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slices.is_empty()
    }
}
