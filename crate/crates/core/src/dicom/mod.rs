//! A deliberately small DICOM subset: uncompressed little-endian Part 10
//! files (explicit or implicit VR), PHI stripping by tag whitelist, and a
//! writer for test fixtures and synthetic exports.
//!
//! Sequences are skipped on read and never retained, so a parsed dataset is
//! a flat, strictly ascending list of elements.

mod anonymize;
mod dataset;
mod element;
mod extract;
mod read;
mod tag;
mod write;

pub use anonymize::{anonymize, Whitelist};
pub use dataset::{DicomDataset, EXPLICIT_VR_LE, IMPLICIT_VR_LE};
pub use element::{DicomElement, ElementView, Vr};
pub use extract::{extract_scan, RescaleSpec};
pub use read::parse_dicom;
pub use tag::{tags, DicomTag};
pub use write::write_fixture;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DicomError {
    #[error("missing DICM magic and input does not start with a data element")]
    BadMagic,
    #[error("truncated file at byte {offset}: need {needed} bytes, {available} available")]
    TruncatedFile {
        offset: usize,
        needed: usize,
        available: usize,
    },
    #[error("unsupported transfer syntax {0}")]
    UnsupportedTransferSyntax(String),
    #[error("malformed element at byte {offset}: {reason}")]
    MalformedElement { offset: usize, reason: String },
    #[error("invalid value in {tag}: {reason}")]
    InvalidValue { tag: DicomTag, reason: String },
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),
    #[error("missing attribute {0}")]
    MissingAttribute(DicomTag),
    #[error("datasets belong to different series ({first} and {other})")]
    MixedSeries { first: String, other: String },
    #[error("duplicate instance number {0}")]
    DuplicateInstanceNumber(i32),
    #[error("no datasets given")]
    EmptySeries,
    #[error("invalid rescale: slope must be nonzero and finite")]
    InvalidRescale,
    #[error("invalid whitelist: {0}")]
    InvalidWhitelist(String),
}

pub type Result<T, E = DicomError> = std::result::Result<T, E>;
