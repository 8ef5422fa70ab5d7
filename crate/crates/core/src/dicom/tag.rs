use std::fmt;
use std::str::FromStr;

/// A `(group, element)` attribute tag. Ordering is lexicographic on the pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DicomTag {
    pub group: u16,
    pub element: u16,
}

impl DicomTag {
    pub const fn new(group: u16, element: u16) -> Self {
        Self { group, element }
    }

    pub fn is_group_length(self) -> bool {
        self.element == 0
    }

    /// Item, item delimiter and sequence delimiter tags.
    pub fn is_delimiter(self) -> bool {
        self.group == 0xFFFE
    }
}

impl fmt::Display for DicomTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:04X},{:04X})", self.group, self.element)
    }
}

impl FromStr for DicomTag {
    type Err = String;

    /// Accepts `(0010,0010)`, `0010,0010` and `00100010`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().trim_start_matches('(').trim_end_matches(')');
        let (g, e) = match t.split_once(',') {
            Some((g, e)) => (g.trim(), e.trim()),
            None if t.len() == 8 => t.split_at(4),
            None => return Err(format!("cannot parse tag {s:?}")),
        };
        if g.len() != 4 || e.len() != 4 {
            return Err(format!("cannot parse tag {s:?}"));
        }
        let group = u16::from_str_radix(g, 16).map_err(|_| format!("bad group in {s:?}"))?;
        let element = u16::from_str_radix(e, 16).map_err(|_| format!("bad element in {s:?}"))?;
        Ok(Self { group, element })
    }
}

/// Tags this crate reads or writes by name.
pub mod tags {
    use super::DicomTag;

    pub const TRANSFER_SYNTAX_UID: DicomTag = DicomTag::new(0x0002, 0x0010);
    pub const SOP_CLASS_UID: DicomTag = DicomTag::new(0x0008, 0x0016);
    pub const SOP_INSTANCE_UID: DicomTag = DicomTag::new(0x0008, 0x0018);
    pub const STUDY_DATE: DicomTag = DicomTag::new(0x0008, 0x0020);
    pub const ACCESSION_NUMBER: DicomTag = DicomTag::new(0x0008, 0x0050);
    pub const MODALITY: DicomTag = DicomTag::new(0x0008, 0x0060);
    pub const INSTITUTION_NAME: DicomTag = DicomTag::new(0x0008, 0x0080);
    pub const REFERRING_PHYSICIAN_NAME: DicomTag = DicomTag::new(0x0008, 0x0090);
    pub const PATIENT_NAME: DicomTag = DicomTag::new(0x0010, 0x0010);
    pub const PATIENT_ID: DicomTag = DicomTag::new(0x0010, 0x0020);
    pub const PATIENT_BIRTH_DATE: DicomTag = DicomTag::new(0x0010, 0x0030);
    pub const PATIENT_SEX: DicomTag = DicomTag::new(0x0010, 0x0040);
    pub const SLICE_THICKNESS: DicomTag = DicomTag::new(0x0018, 0x0050);
    pub const STUDY_INSTANCE_UID: DicomTag = DicomTag::new(0x0020, 0x000D);
    pub const SERIES_INSTANCE_UID: DicomTag = DicomTag::new(0x0020, 0x000E);
    pub const INSTANCE_NUMBER: DicomTag = DicomTag::new(0x0020, 0x0013);
    pub const IMAGE_POSITION_PATIENT: DicomTag = DicomTag::new(0x0020, 0x0032);
    pub const IMAGE_ORIENTATION_PATIENT: DicomTag = DicomTag::new(0x0020, 0x0037);
    pub const SAMPLES_PER_PIXEL: DicomTag = DicomTag::new(0x0028, 0x0002);
    pub const PHOTOMETRIC_INTERPRETATION: DicomTag = DicomTag::new(0x0028, 0x0004);
    pub const ROWS: DicomTag = DicomTag::new(0x0028, 0x0010);
    pub const COLUMNS: DicomTag = DicomTag::new(0x0028, 0x0011);
    pub const PIXEL_SPACING: DicomTag = DicomTag::new(0x0028, 0x0030);
    pub const BITS_ALLOCATED: DicomTag = DicomTag::new(0x0028, 0x0100);
    pub const BITS_STORED: DicomTag = DicomTag::new(0x0028, 0x0101);
    pub const HIGH_BIT: DicomTag = DicomTag::new(0x0028, 0x0102);
    pub const PIXEL_REPRESENTATION: DicomTag = DicomTag::new(0x0028, 0x0103);
    pub const WINDOW_CENTER: DicomTag = DicomTag::new(0x0028, 0x1050);
    pub const WINDOW_WIDTH: DicomTag = DicomTag::new(0x0028, 0x1051);
    pub const RESCALE_INTERCEPT: DicomTag = DicomTag::new(0x0028, 0x1052);
    pub const RESCALE_SLOPE: DicomTag = DicomTag::new(0x0028, 0x1053);
    pub const PIXEL_DATA: DicomTag = DicomTag::new(0x7FE0, 0x0010);

    pub const ITEM: DicomTag = DicomTag::new(0xFFFE, 0xE000);
    pub const ITEM_DELIMITATION: DicomTag = DicomTag::new(0xFFFE, 0xE00D);
    pub const SEQUENCE_DELIMITATION: DicomTag = DicomTag::new(0xFFFE, 0xE0DD);
}
