use super::element::{DicomElement, Vr};
use super::tag::{tags, DicomTag};
use super::{DicomError, Result};

pub const EXPLICIT_VR_LE: &str = "1.2.840.10008.1.2.1";
pub const IMPLICIT_VR_LE: &str = "1.2.840.10008.1.2";

/// A flat dataset: elements plus the transfer syntax they were (or will be)
/// encoded with.
///
/// [`DicomDataset::new`] does not validate; call [`DicomDataset::validate`]
/// or go through [`DicomDataset::insert`], which keeps tags sorted and
/// unique.
#[derive(Debug, Clone, PartialEq)]
pub struct DicomDataset {
    transfer_syntax: String,
    elements: Vec<DicomElement>,
}

impl Default for DicomDataset {
    fn default() -> Self {
        Self::empty()
    }
}

impl DicomDataset {
    pub fn new(transfer_syntax: impl Into<String>, elements: Vec<DicomElement>) -> Self {
        Self {
            transfer_syntax: transfer_syntax.into(),
            elements,
        }
    }

    /// Empty explicit-VR little-endian dataset.
    pub fn empty() -> Self {
        Self::new(EXPLICIT_VR_LE, Vec::new())
    }

    pub fn transfer_syntax(&self) -> &str {
        &self.transfer_syntax
    }

    pub fn elements(&self) -> &[DicomElement] {
        &self.elements
    }

    pub fn into_elements(self) -> Vec<DicomElement> {
        self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn tags(&self) -> impl Iterator<Item = DicomTag> + '_ {
        self.elements.iter().map(DicomElement::tag)
    }

    pub fn get(&self, tag: DicomTag) -> Option<&DicomElement> {
        self.elements
            .binary_search_by_key(&tag, DicomElement::tag)
            .ok()
            .map(|i| &self.elements[i])
            .or_else(|| self.elements.iter().find(|e| e.tag() == tag))
    }

    pub fn contains(&self, tag: DicomTag) -> bool {
        self.get(tag).is_some()
    }

    /// Inserts in tag order, replacing any element with the same tag.
    pub fn insert(&mut self, element: DicomElement) {
        match self
            .elements
            .binary_search_by_key(&element.tag(), DicomElement::tag)
        {
            Ok(i) => self.elements[i] = element,
            Err(i) => self.elements.insert(i, element),
        }
    }

    pub fn with(mut self, element: DicomElement) -> Self {
        self.insert(element);
        self
    }

    pub fn remove(&mut self, tag: DicomTag) -> Option<DicomElement> {
        let i = self.elements.iter().position(|e| e.tag() == tag)?;
        Some(self.elements.remove(i))
    }

    pub fn text(&self, tag: DicomTag) -> Option<String> {
        self.get(tag).and_then(DicomElement::as_text)
    }

    pub fn require(&self, tag: DicomTag) -> Result<&DicomElement> {
        self.get(tag).ok_or(DicomError::MissingAttribute(tag))
    }

    /// Re-labels the dataset as explicit VR little endian, updating the
    /// transfer-syntax element if one is present.
    pub fn to_explicit_vr(mut self) -> Self {
        self.transfer_syntax = EXPLICIT_VR_LE.to_string();
        if self.contains(tags::TRANSFER_SYNTAX_UID) {
            self.insert(DicomElement::text(
                tags::TRANSFER_SYNTAX_UID,
                Vr::UI,
                EXPLICIT_VR_LE,
            ));
        }
        self
    }

    /// Checks the structural invariants:
    ///
    /// * tags strictly ascending, no delimiter tags, no sequences;
    /// * every value consistent with its VR;
    /// * a transfer-syntax element, if present, agrees with the dataset's syntax;
    /// * when Rows or Columns is present: PixelData present and
    ///   `rows * cols * bits_allocated / 8` bytes long (one pad byte allowed).
    pub fn validate(&self) -> Result<()> {
        for pair in self.elements.windows(2) {
            if pair[0].tag() >= pair[1].tag() {
                return Err(DicomError::InvalidDataset(format!(
                    "tags not strictly ascending: {} then {}",
                    pair[0].tag(),
                    pair[1].tag()
                )));
            }
        }
        for e in &self.elements {
            if e.tag().is_delimiter() {
                return Err(DicomError::InvalidDataset(format!(
                    "delimiter tag {} outside a sequence",
                    e.tag()
                )));
            }
            if e.vr() == Vr::SQ {
                return Err(DicomError::InvalidDataset(format!(
                    "sequence element {} is not supported",
                    e.tag()
                )));
            }
            e.check()
                .map_err(|err| DicomError::InvalidDataset(err.to_string()))?;
        }
        if let Some(ts) = self.text(tags::TRANSFER_SYNTAX_UID) {
            if ts != self.transfer_syntax {
                return Err(DicomError::InvalidDataset(format!(
                    "TransferSyntaxUID element {ts} disagrees with dataset syntax {}",
                    self.transfer_syntax
                )));
            }
        }
        self.validate_pixel_geometry()
    }

    fn validate_pixel_geometry(&self) -> Result<()> {
        let rows = self.get(tags::ROWS);
        let cols = self.get(tags::COLUMNS);
        if rows.is_none() && cols.is_none() {
            return Ok(());
        }
        let invalid = |msg: String| DicomError::InvalidDataset(msg);
        let (rows, cols) = match (rows, cols) {
            (Some(r), Some(c)) => (r.first_u16()?, c.first_u16()?),
            _ => return Err(invalid("Rows and Columns must appear together".into())),
        };
        let pixels = self
            .get(tags::PIXEL_DATA)
            .ok_or_else(|| invalid("Rows/Columns present without PixelData".into()))?;
        let bits = self
            .get(tags::BITS_ALLOCATED)
            .ok_or_else(|| invalid("Rows/Columns present without BitsAllocated".into()))?
            .first_u16()?;
        if !matches!(bits, 8 | 16 | 32) {
            return Err(invalid(format!("unsupported BitsAllocated {bits}")));
        }
        let expected = usize::from(rows) * usize::from(cols) * usize::from(bits / 8);
        let actual = pixels.len();
        if actual != expected && actual != expected + expected % 2 {
            return Err(invalid(format!(
                "PixelData holds {actual} bytes, geometry needs {expected}"
            )));
        }
        Ok(())
    }
}
