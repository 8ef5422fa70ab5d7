//! Contrast-phase recognition for abdominal CT series.
//!
//! A scan is classified by drawing a seeded random subset of its axial
//! slices, scoring each sampled slice with a slice-level classifier and
//! majority-voting the slice decisions into one scan-level phase. The crate
//! also carries everything needed around that mechanism: a small DICOM
//! reader/writer with PHI stripping, HU windowing and histogram features, a
//! trainable linear baseline, evaluation metrics with bootstrap intervals,
//! and a synthetic phantom generator.

pub mod dicom;
pub mod eval;
pub mod ingest;
pub mod model;
pub mod phase;
pub mod pipeline;
pub mod preprocess;
pub mod rng;
pub mod scan;
pub mod synth;

pub use phase::PhaseLabel;
pub use scan::{CtScan, CtSlice};
