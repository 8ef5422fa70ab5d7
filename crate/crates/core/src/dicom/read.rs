use super::dataset::{DicomDataset, EXPLICIT_VR_LE, IMPLICIT_VR_LE};
use super::element::{DicomElement, Vr};
use super::tag::{tags, DicomTag};
use super::{DicomError, Result};

const PREAMBLE_LEN: usize = 128;
const UNDEFINED_LENGTH: u32 = 0xFFFF_FFFF;
const MAX_SEQUENCE_DEPTH: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Encoding {
    Explicit,
    Implicit,
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn remaining(&self) -> usize {
        self.bytes.len() - self.pos
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if n > self.remaining() {
            return Err(DicomError::TruncatedFile {
                offset: self.pos,
                needed: n,
                available: self.remaining(),
            });
        }
        let out = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    fn u16(&mut self) -> Result<u16> {
        let b = self.take(2)?;
        Ok(u16::from_le_bytes([b[0], b[1]]))
    }

    fn u32(&mut self) -> Result<u32> {
        let b = self.take(4)?;
        Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
    }

    fn tag(&mut self) -> Result<DicomTag> {
        Ok(DicomTag::new(self.u16()?, self.u16()?))
    }

    fn peek_group(&self) -> Option<u16> {
        (self.remaining() >= 2)
            .then(|| u16::from_le_bytes([self.bytes[self.pos], self.bytes[self.pos + 1]]))
    }

    fn malformed(&self, offset: usize, reason: impl Into<String>) -> DicomError {
        DicomError::MalformedElement {
            offset,
            reason: reason.into(),
        }
    }
}

/// An element header as read from the stream.
struct Header {
    offset: usize,
    tag: DicomTag,
    vr: Vr,
    length: u32,
}

/// Parses a Part 10 file (with or without the 128-byte preamble and `DICM`
/// magic) encoded in explicit or implicit VR little endian.
///
/// Sequences are skipped. The returned dataset satisfies
/// [`DicomDataset::validate`].
pub fn parse_dicom(bytes: &[u8]) -> Result<DicomDataset> {
    let start = find_start(bytes)?;
    let mut cur = Cursor { bytes, pos: start };
    let mut elements = Vec::new();

    // File meta group is always explicit VR.
    while cur.peek_group() == Some(0x0002) {
        if let Some(e) = read_element(&mut cur, Encoding::Explicit, 0)? {
            elements.push(e);
        }
    }
    let declared = elements
        .iter()
        .find(|e| e.tag() == tags::TRANSFER_SYNTAX_UID)
        .and_then(DicomElement::as_text);
    let (encoding, syntax) = match declared.as_deref() {
        Some(EXPLICIT_VR_LE) => (Encoding::Explicit, EXPLICIT_VR_LE),
        Some(IMPLICIT_VR_LE) => (Encoding::Implicit, IMPLICIT_VR_LE),
        Some(other) => return Err(DicomError::UnsupportedTransferSyntax(other.to_string())),
        None if looks_explicit(&cur) => (Encoding::Explicit, EXPLICIT_VR_LE),
        None => (Encoding::Implicit, IMPLICIT_VR_LE),
    };

    while cur.remaining() > 0 {
        if let Some(e) = read_element(&mut cur, encoding, 0)? {
            elements.push(e);
        }
    }

    elements.sort_by_key(DicomElement::tag);
    if let Some(pair) = elements.windows(2).find(|p| p[0].tag() == p[1].tag()) {
        return Err(DicomError::MalformedElement {
            offset: 0,
            reason: format!("duplicate tag {}", pair[0].tag()),
        });
    }
    let ds = DicomDataset::new(syntax, elements);
    ds.validate()?;
    Ok(ds)
}

fn find_start(bytes: &[u8]) -> Result<usize> {
    if bytes.len() >= PREAMBLE_LEN + 4 && &bytes[PREAMBLE_LEN..PREAMBLE_LEN + 4] == b"DICM" {
        return Ok(PREAMBLE_LEN + 4);
    }
    if plausible_first_element(bytes) {
        return Ok(0);
    }
    Err(DicomError::BadMagic)
}

/// A bare dataset must open with an even, non-delimiter group followed by
/// either a known VR or an implicit length that fits the input.
fn plausible_first_element(bytes: &[u8]) -> bool {
    if bytes.len() < 8 {
        return false;
    }
    let group = u16::from_le_bytes([bytes[0], bytes[1]]);
    if group == 0 || group % 2 == 1 || group == 0xFFFE {
        return false;
    }
    if Vr::from_bytes([bytes[4], bytes[5]]).is_some() {
        return true;
    }
    let len = u32::from_le_bytes([bytes[4], bytes[5], bytes[6], bytes[7]]);
    len == UNDEFINED_LENGTH || (len as usize) <= bytes.len() - 8
}

fn looks_explicit(cur: &Cursor<'_>) -> bool {
    cur.remaining() >= 6
        && Vr::from_bytes([cur.bytes[cur.pos + 4], cur.bytes[cur.pos + 5]]).is_some()
}

fn read_header(cur: &mut Cursor<'_>, encoding: Encoding) -> Result<Header> {
    let offset = cur.pos;
    let tag = cur.tag()?;
    if tag.is_delimiter() {
        let length = cur.u32()?;
        return Ok(Header {
            offset,
            tag,
            vr: Vr::UN,
            length,
        });
    }
    match encoding {
        Encoding::Explicit => {
            let raw = cur.take(2)?;
            let vr = Vr::from_bytes([raw[0], raw[1]]).ok_or_else(|| {
                cur.malformed(offset, format!("unknown VR {:?} for {tag}", raw))
            })?;
            let length = if vr.has_long_length() {
                cur.take(2)?;
                cur.u32()?
            } else {
                u32::from(cur.u16()?)
            };
            Ok(Header {
                offset,
                tag,
                vr,
                length,
            })
        }
        Encoding::Implicit => {
            let length = cur.u32()?;
            Ok(Header {
                offset,
                tag,
                vr: implicit_vr(tag),
                length,
            })
        }
    }
}

/// Reads one element. Returns `None` for skipped sequences.
fn read_element(
    cur: &mut Cursor<'_>,
    encoding: Encoding,
    depth: usize,
) -> Result<Option<DicomElement>> {
    let h = read_header(cur, encoding)?;
    if h.tag.is_delimiter() {
        return Err(cur.malformed(h.offset, format!("unexpected delimiter {}", h.tag)));
    }
    if h.vr == Vr::SQ || (h.length == UNDEFINED_LENGTH && h.vr == Vr::UN) {
        skip_value(cur, encoding, h.length, depth)?;
        return Ok(None);
    }
    if h.length == UNDEFINED_LENGTH {
        if h.tag == tags::PIXEL_DATA {
            return Err(DicomError::UnsupportedTransferSyntax(
                "encapsulated pixel data".into(),
            ));
        }
        return Err(cur.malformed(h.offset, format!("undefined length on {} {}", h.tag, h.vr)));
    }
    let value = cur.take(h.length as usize)?.to_vec();
    Ok(Some(DicomElement::new(h.tag, h.vr, value)))
}

fn skip_value(cur: &mut Cursor<'_>, encoding: Encoding, length: u32, depth: usize) -> Result<()> {
    if length != UNDEFINED_LENGTH {
        cur.take(length as usize)?;
        return Ok(());
    }
    if depth >= MAX_SEQUENCE_DEPTH {
        return Err(cur.malformed(cur.pos, "sequences nested too deeply"));
    }
    // Undefined-length sequence: items until the sequence delimiter.
    loop {
        let h = read_header(cur, encoding)?;
        match h.tag {
            t if t == tags::SEQUENCE_DELIMITATION => return Ok(()),
            t if t == tags::ITEM => {
                if h.length == UNDEFINED_LENGTH {
                    skip_item_elements(cur, encoding, depth + 1)?;
                } else {
                    cur.take(h.length as usize)?;
                }
            }
            other => {
                return Err(cur.malformed(h.offset, format!("expected item tag, found {other}")))
            }
        }
    }
}

fn skip_item_elements(cur: &mut Cursor<'_>, encoding: Encoding, depth: usize) -> Result<()> {
    loop {
        let start = cur.pos;
        let h = read_header(cur, encoding)?;
        if h.tag == tags::ITEM_DELIMITATION {
            return Ok(());
        }
        if h.tag.is_delimiter() {
            return Err(cur.malformed(h.offset, format!("unexpected delimiter {}", h.tag)));
        }
        if h.vr == Vr::SQ || h.length == UNDEFINED_LENGTH {
            skip_value(cur, encoding, h.length, depth)?;
        } else {
            cur.take(h.length as usize)?;
        }
        debug_assert!(cur.pos > start);
    }
}

/// VR lookup for implicit-VR streams. Unknown tags decode as UN.
fn implicit_vr(tag: DicomTag) -> Vr {
    if tag.is_group_length() {
        return Vr::UL;
    }
    match (tag.group, tag.element) {
        (0x0008, 0x0016) | (0x0008, 0x0018) | (0x0020, 0x000D) | (0x0020, 0x000E) => Vr::UI,
        (0x0008, 0x0020) | (0x0010, 0x0030) => Vr::DA,
        (0x0008, 0x0030) => Vr::TM,
        (0x0008, 0x0050) | (0x0020, 0x0010) => Vr::SH,
        (0x0008, 0x0060) | (0x0010, 0x0040) | (0x0028, 0x0004) => Vr::CS,
        (0x0008, 0x0070) | (0x0008, 0x0080) | (0x0010, 0x0020) => Vr::LO,
        (0x0008, 0x0090) | (0x0010, 0x0010) => Vr::PN,
        (0x0010, 0x1010) => Vr::AS,
        (0x0018, 0x0050)
        | (0x0020, 0x0032)
        | (0x0020, 0x0037)
        | (0x0028, 0x0030)
        | (0x0028, 0x1050)
        | (0x0028, 0x1051)
        | (0x0028, 0x1052)
        | (0x0028, 0x1053) => Vr::DS,
        (0x0020, 0x0011) | (0x0020, 0x0013) => Vr::IS,
        (0x0028, 0x0002)
        | (0x0028, 0x0010)
        | (0x0028, 0x0011)
        | (0x0028, 0x0100)
        | (0x0028, 0x0101)
        | (0x0028, 0x0102)
        | (0x0028, 0x0103) => Vr::US,
        (0x7FE0, 0x0010) => Vr::OW,
        _ => Vr::UN,
    }
}
