use std::fmt;

use super::tag::DicomTag;
use super::{DicomError, Result};

/// Two-letter value representation code.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Vr(pub [u8; 2]);

const KNOWN_VRS: [&[u8; 2]; 34] = [
    b"AE", b"AS", b"AT", b"CS", b"DA", b"DS", b"DT", b"FD", b"FL", b"IS", b"LO", b"LT", b"OB",
    b"OD", b"OF", b"OL", b"OV", b"OW", b"PN", b"SH", b"SL", b"SQ", b"SS", b"ST", b"SV", b"TM",
    b"UC", b"UI", b"UL", b"UN", b"UR", b"US", b"UT", b"UV",
];

impl Vr {
    pub const AE: Vr = Vr(*b"AE");
    pub const AS: Vr = Vr(*b"AS");
    pub const CS: Vr = Vr(*b"CS");
    pub const DA: Vr = Vr(*b"DA");
    pub const DS: Vr = Vr(*b"DS");
    pub const IS: Vr = Vr(*b"IS");
    pub const LO: Vr = Vr(*b"LO");
    pub const OB: Vr = Vr(*b"OB");
    pub const OW: Vr = Vr(*b"OW");
    pub const PN: Vr = Vr(*b"PN");
    pub const SH: Vr = Vr(*b"SH");
    pub const SQ: Vr = Vr(*b"SQ");
    pub const SS: Vr = Vr(*b"SS");
    pub const TM: Vr = Vr(*b"TM");
    pub const UI: Vr = Vr(*b"UI");
    pub const UL: Vr = Vr(*b"UL");
    pub const UN: Vr = Vr(*b"UN");
    pub const US: Vr = Vr(*b"US");

    pub fn from_bytes(b: [u8; 2]) -> Option<Self> {
        KNOWN_VRS.iter().any(|k| **k == b).then_some(Vr(b))
    }

    pub fn as_str(&self) -> &str {
        std::str::from_utf8(&self.0).unwrap_or("??")
    }

    /// VRs whose explicit-VR header carries two reserved bytes and a 32-bit length.
    pub fn has_long_length(self) -> bool {
        matches!(
            &self.0,
            b"OB" | b"OD" | b"OF" | b"OL" | b"OV" | b"OW" | b"SQ" | b"SV" | b"UC" | b"UN" | b"UR"
                | b"UT" | b"UV"
        )
    }

    pub fn is_text(self) -> bool {
        matches!(
            &self.0,
            b"AE" | b"AS" | b"CS" | b"DA" | b"DS" | b"DT" | b"IS" | b"LO" | b"LT" | b"PN" | b"SH"
                | b"ST" | b"TM" | b"UC" | b"UI" | b"UR" | b"UT"
        )
    }

    /// Byte used to pad odd-length values to even length.
    pub fn padding(self) -> u8 {
        if self.is_text() && self != Vr::UI {
            b' '
        } else {
            0
        }
    }

    /// Size of one binary numeric value, if the VR is a fixed-width binary type.
    fn numeric_width(self) -> Option<usize> {
        match &self.0 {
            b"US" | b"SS" => Some(2),
            b"UL" | b"SL" | b"FL" | b"AT" => Some(4),
            b"FD" | b"SV" | b"UV" => Some(8),
            _ => None,
        }
    }
}

impl fmt::Debug for Vr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Vr({})", self.as_str())
    }
}

impl fmt::Display for Vr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Decoded view over an element's bytes.
#[derive(Debug, Clone, PartialEq)]
pub enum ElementView<'a> {
    Text(String),
    Decimal(Vec<f64>),
    Integer(Vec<i64>),
    Pixels(&'a [u8]),
    Bytes(&'a [u8]),
}

/// One data element. The stored value is always even-length: odd inputs are
/// padded with the VR's padding byte on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct DicomElement {
    tag: DicomTag,
    vr: Vr,
    value: Vec<u8>,
}

impl DicomElement {
    pub fn new(tag: DicomTag, vr: Vr, mut value: Vec<u8>) -> Self {
        if value.len() % 2 == 1 {
            value.push(vr.padding());
        }
        Self { tag, vr, value }
    }

    pub fn text(tag: DicomTag, vr: Vr, s: &str) -> Self {
        Self::new(tag, vr, s.as_bytes().to_vec())
    }

    pub fn u16(tag: DicomTag, v: u16) -> Self {
        Self::new(tag, Vr::US, v.to_le_bytes().to_vec())
    }

    pub fn decimal(tag: DicomTag, v: f64) -> Self {
        Self::text(tag, Vr::DS, &format_decimal_string(v))
    }

    pub fn decimals(tag: DicomTag, vs: &[f64]) -> Self {
        let parts: Vec<String> = vs.iter().map(|v| format_decimal_string(*v)).collect();
        Self::text(tag, Vr::DS, &parts.join("\\"))
    }

    pub fn integer(tag: DicomTag, v: i64) -> Self {
        Self::text(tag, Vr::IS, &v.to_string())
    }

    pub fn tag(&self) -> DicomTag {
        self.tag
    }

    pub fn vr(&self) -> Vr {
        self.vr
    }

    pub fn bytes(&self) -> &[u8] {
        &self.value
    }

    pub fn len(&self) -> usize {
        self.value.len()
    }

    pub fn is_empty(&self) -> bool {
        self.value.is_empty()
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.value
    }

    /// Text with trailing padding removed (and leading spaces for numeric strings).
    pub fn as_text(&self) -> Option<String> {
        if !self.vr.is_text() {
            return None;
        }
        let s = String::from_utf8_lossy(&self.value);
        let s = s.trim_end_matches(['\0', ' ']);
        let s = if self.vr == Vr::DS || self.vr == Vr::IS {
            s.trim_start()
        } else {
            s
        };
        Some(s.to_string())
    }

    pub fn as_decimals(&self) -> Result<Vec<f64>> {
        let text = self.expect_vr(Vr::DS)?;
        split_multi(&text)
            .map(|part| {
                part.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| self.invalid(format!("{part:?} is not a finite decimal")))
            })
            .collect()
    }

    pub fn as_integers(&self) -> Result<Vec<i64>> {
        let text = self.expect_vr(Vr::IS)?;
        split_multi(&text)
            .map(|part| {
                part.parse::<i64>()
                    .map_err(|_| self.invalid(format!("{part:?} is not an integer string")))
            })
            .collect()
    }

    pub fn as_u16s(&self) -> Result<Vec<u16>> {
        if self.vr != Vr::US {
            return Err(self.invalid(format!("expected VR US, found {}", self.vr)));
        }
        Ok(self
            .value
            .chunks_exact(2)
            .map(|c| u16::from_le_bytes([c[0], c[1]]))
            .collect())
    }

    pub fn first_decimal(&self) -> Result<f64> {
        self.as_decimals()?
            .first()
            .copied()
            .ok_or_else(|| self.invalid("empty decimal string".into()))
    }

    pub fn first_integer(&self) -> Result<i64> {
        self.as_integers()?
            .first()
            .copied()
            .ok_or_else(|| self.invalid("empty integer string".into()))
    }

    pub fn first_u16(&self) -> Result<u16> {
        self.as_u16s()?
            .first()
            .copied()
            .ok_or_else(|| self.invalid("empty US value".into()))
    }

    pub fn view(&self) -> ElementView<'_> {
        if self.tag == super::tags::PIXEL_DATA {
            return ElementView::Pixels(&self.value);
        }
        match &self.vr.0 {
            b"DS" => match self.as_decimals() {
                Ok(v) => ElementView::Decimal(v),
                Err(_) => ElementView::Bytes(&self.value),
            },
            b"IS" => match self.as_integers() {
                Ok(v) => ElementView::Integer(v),
                Err(_) => ElementView::Bytes(&self.value),
            },
            b"US" => ElementView::Integer(
                self.as_u16s().unwrap_or_default().into_iter().map(i64::from).collect(),
            ),
            b"SS" => ElementView::Integer(
                self.value
                    .chunks_exact(2)
                    .map(|c| i64::from(i16::from_le_bytes([c[0], c[1]])))
                    .collect(),
            ),
            b"UL" => ElementView::Integer(
                self.value
                    .chunks_exact(4)
                    .map(|c| i64::from(u32::from_le_bytes([c[0], c[1], c[2], c[3]])))
                    .collect(),
            ),
            _ if self.vr.is_text() => ElementView::Text(self.as_text().unwrap_or_default()),
            _ => ElementView::Bytes(&self.value),
        }
    }

    /// Checks the value against its VR: decimal strings must hold finite
    /// numbers and fixed-width binary values must be whole multiples of the
    /// value width.
    pub fn check(&self) -> Result<()> {
        if self.vr == Vr::DS {
            self.as_decimals()?;
        }
        if self.vr == Vr::IS {
            self.as_integers()?;
        }
        if let Some(w) = self.vr.numeric_width() {
            if self.value.len() % w != 0 {
                return Err(self.invalid(format!(
                    "length {} is not a multiple of {w}",
                    self.value.len()
                )));
            }
        }
        Ok(())
    }

    fn expect_vr(&self, vr: Vr) -> Result<String> {
        if self.vr != vr {
            return Err(self.invalid(format!("expected VR {vr}, found {}", self.vr)));
        }
        Ok(self.as_text().unwrap_or_default())
    }

    fn invalid(&self, reason: String) -> DicomError {
        DicomError::InvalidValue {
            tag: self.tag,
            reason,
        }
    }
}

fn split_multi(text: &str) -> impl Iterator<Item = &str> {
    text.split('\\').map(str::trim).filter(|p| !p.is_empty())
}

/// Formats a number within the 16-character limit of a decimal string.
pub(crate) fn format_decimal_string(v: f64) -> String {
    let plain = format!("{v}");
    if plain.len() <= 16 {
        return plain;
    }
    for precision in (0..=15).rev() {
        let s = format!("{v:.precision$e}");
        if s.len() <= 16 {
            return s;
        }
    }
    format!("{v:.0e}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dicom::tags;

    #[test]
    fn odd_text_is_padded_with_space() {
        let e = DicomElement::text(tags::PATIENT_NAME, Vr::PN, "ABC");
        assert_eq!(e.bytes(), b"ABC ");
        assert_eq!(e.as_text().unwrap(), "ABC");
    }

    #[test]
    fn odd_uid_is_padded_with_nul() {
        let e = DicomElement::text(tags::SERIES_INSTANCE_UID, Vr::UI, "1.2.3");
        assert_eq!(e.bytes(), b"1.2.3\0");
        assert_eq!(e.as_text().unwrap(), "1.2.3");
    }

    #[test]
    fn decimal_strings_decode() {
        let e = DicomElement::text(tags::PIXEL_SPACING, Vr::DS, " 0.5\\0.75 ");
        assert_eq!(e.as_decimals().unwrap(), vec![0.5, 0.75]);
        assert_eq!(e.view(), ElementView::Decimal(vec![0.5, 0.75]));
        let bad = DicomElement::text(tags::RESCALE_SLOPE, Vr::DS, "inf");
        assert!(bad.check().is_err());
        let nan = DicomElement::text(tags::RESCALE_SLOPE, Vr::DS, "abc");
        assert!(nan.as_decimals().is_err());
    }

    #[test]
    fn long_decimals_stay_within_sixteen_chars() {
        for v in [0.1 + 0.2, -1024.0, 1.0 / 3.0, 1e-300, 123_456_789.125] {
            let s = format_decimal_string(v);
            assert!(s.len() <= 16, "{s}");
            let back: f64 = s.parse().unwrap();
            assert!((back - v).abs() <= v.abs() * 1e-9);
        }
        assert_eq!(format_decimal_string(-1024.0), "-1024");
    }

    #[test]
    fn binary_width_is_checked() {
        let e = DicomElement::new(tags::ROWS, Vr::UL, vec![1, 0]);
        assert!(e.check().is_err());
        let ok = DicomElement::u16(tags::ROWS, 512);
        assert_eq!(ok.first_u16().unwrap(), 512);
        assert_eq!(ok.view(), ElementView::Integer(vec![512]));
    }

    #[test]
    fn vr_classes() {
        assert!(Vr::OB.has_long_length());
        assert!(Vr::SQ.has_long_length());
        assert!(!Vr::US.has_long_length());
        assert_eq!(Vr::from_bytes(*b"ZZ"), None);
        assert_eq!(Vr::from_bytes(*b"DS"), Some(Vr::DS));
    }
}
