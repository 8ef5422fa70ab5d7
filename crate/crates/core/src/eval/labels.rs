//! Label CSV: header `series_uid,study_uid,phase`, phase one of
//! `non_contrast`, `arterial`, `venous`, `other`.

use std::collections::HashSet;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::phase::PhaseLabel;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelRecord {
    pub series_uid: String,
    pub study_uid: String,
    pub phase: PhaseLabel,
}

pub fn read_labels<R: Read>(reader: R) -> Result<Vec<LabelRecord>, EvalError> {
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr.headers()?.clone();
    for want in ["series_uid", "study_uid", "phase"] {
        if !headers.iter().any(|h| h == want) {
            return Err(EvalError::Schema {
                row: 1,
                message: format!("missing column {want:?}"),
            });
        }
    }
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (i, rec) in rdr.deserialize::<LabelRecord>().enumerate() {
        // Row numbers count the header as row 1.
        let row = i + 2;
        let rec = rec.map_err(|e| EvalError::Schema {
            row,
            message: e.to_string(),
        })?;
        if !seen.insert(rec.series_uid.clone()) {
            return Err(EvalError::Schema {
                row,
                message: format!("duplicate series {}", rec.series_uid),
            });
        }
        out.push(rec);
    }
    Ok(out)
}

pub fn write_labels<W: Write>(writer: W, records: &[LabelRecord]) -> Result<(), EvalError> {
    let mut wtr = csv::Writer::from_writer(writer);
    for r in records {
        wtr.serialize(r)?;
    }
    wtr.flush().map_err(csv::Error::from)?;
    Ok(())
}
