use std::collections::BTreeSet;

use super::dataset::DicomDataset;
use super::tag::{tags, DicomTag};
use super::{DicomError, Result};

/// Nonempty set of attributes that survive de-identification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Whitelist(BTreeSet<DicomTag>);

impl Whitelist {
    pub fn new(tags: impl IntoIterator<Item = DicomTag>) -> Result<Self> {
        let set: BTreeSet<_> = tags.into_iter().collect();
        if set.is_empty() {
            return Err(DicomError::InvalidWhitelist("whitelist is empty".into()));
        }
        Ok(Self(set))
    }

    /// Attributes needed to rebuild HU volumes plus slice geometry.
    pub fn default_ct() -> Self {
        Self(BTreeSet::from([
            tags::SOP_CLASS_UID,
            tags::SOP_INSTANCE_UID,
            tags::STUDY_INSTANCE_UID,
            tags::SERIES_INSTANCE_UID,
            tags::INSTANCE_NUMBER,
            tags::MODALITY,
            tags::ROWS,
            tags::COLUMNS,
            tags::BITS_ALLOCATED,
            tags::BITS_STORED,
            tags::PIXEL_REPRESENTATION,
            tags::RESCALE_SLOPE,
            tags::RESCALE_INTERCEPT,
            tags::WINDOW_CENTER,
            tags::WINDOW_WIDTH,
            tags::SLICE_THICKNESS,
            tags::PIXEL_SPACING,
            tags::IMAGE_POSITION_PATIENT,
            tags::IMAGE_ORIENTATION_PATIENT,
            tags::PIXEL_DATA,
        ]))
    }

    /// One tag per line; blank lines and `#` comments ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let tag = line
                .parse::<DicomTag>()
                .map_err(|e| DicomError::InvalidWhitelist(format!("line {}: {e}", lineno + 1)))?;
            set.insert(tag);
        }
        Self::new(set)
    }

    pub fn contains(&self, tag: DicomTag) -> bool {
        self.0.contains(&tag)
    }

    pub fn iter(&self) -> impl Iterator<Item = DicomTag> + '_ {
        self.0.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Copy of `ds` holding only whitelisted elements, in their original order.
pub fn anonymize(ds: &DicomDataset, whitelist: &Whitelist) -> DicomDataset {
    let kept = ds
        .elements()
        .iter()
        .filter(|e| whitelist.contains(e.tag()))
        .cloned()
        .collect();
    DicomDataset::new(ds.transfer_syntax(), kept)
}
