use super::dataset::{DicomDataset, EXPLICIT_VR_LE};
use super::{DicomError, Result};

/// Encodes `ds` as an explicit-VR little-endian Part 10 byte stream
/// (zeroed preamble, `DICM`, then every element in order). No elements are
/// added: a dataset without a file meta group is written without one.
pub fn write_fixture(ds: &DicomDataset) -> Result<Vec<u8>> {
    ds.validate()?;
    if ds.transfer_syntax() != EXPLICIT_VR_LE {
        return Err(DicomError::InvalidDataset(format!(
            "writer emits explicit VR little endian only, dataset is {}",
            ds.transfer_syntax()
        )));
    }
    let payload: usize = ds.elements().iter().map(|e| 12 + e.len()).sum();
    let mut out = Vec::with_capacity(132 + payload);
    out.resize(128, 0);
    out.extend_from_slice(b"DICM");
    for e in ds.elements() {
        let tag = e.tag();
        out.extend_from_slice(&tag.group.to_le_bytes());
        out.extend_from_slice(&tag.element.to_le_bytes());
        out.extend_from_slice(&e.vr().0);
        if e.vr().has_long_length() {
            let len = u32::try_from(e.len())
                .ok()
                .filter(|l| *l != u32::MAX)
                .ok_or_else(|| DicomError::InvalidDataset(format!("{tag} value too long")))?;
            out.extend_from_slice(&[0, 0]);
            out.extend_from_slice(&len.to_le_bytes());
        } else {
            let len = u16::try_from(e.len()).map_err(|_| {
                DicomError::InvalidDataset(format!(
                    "{tag} value of {} bytes exceeds the 16-bit length of VR {}",
                    e.len(),
                    e.vr()
                ))
            })?;
            out.extend_from_slice(&len.to_le_bytes());
        }
        out.extend_from_slice(e.bytes());
    }
    Ok(out)
}
