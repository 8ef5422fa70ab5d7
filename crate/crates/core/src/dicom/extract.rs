use std::collections::HashSet;

use super::dataset::DicomDataset;
use super::tag::tags;
use super::{DicomError, Result};
use crate::preprocess::Image2D;
use crate::scan::{CtScan, CtSlice};

/// Linear map from stored pixel values to Hounsfield units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RescaleSpec {
    slope: f64,
    intercept: f64,
}

impl Default for RescaleSpec {
    fn default() -> Self {
        Self {
            slope: 1.0,
            intercept: 0.0,
        }
    }
}

impl RescaleSpec {
    pub fn new(slope: f64, intercept: f64) -> Result<Self> {
        if slope == 0.0 || !slope.is_finite() || !intercept.is_finite() {
            return Err(DicomError::InvalidRescale);
        }
        Ok(Self { slope, intercept })
    }

    /// Reads RescaleSlope / RescaleIntercept, defaulting to 1 and 0.
    pub fn from_dataset(ds: &DicomDataset) -> Result<Self> {
        let slope = match ds.get(tags::RESCALE_SLOPE) {
            Some(e) => e.first_decimal()?,
            None => 1.0,
        };
        let intercept = match ds.get(tags::RESCALE_INTERCEPT) {
            Some(e) => e.first_decimal()?,
            None => 0.0,
        };
        Self::new(slope, intercept)
    }

    pub fn slope(&self) -> f64 {
        self.slope
    }

    pub fn intercept(&self) -> f64 {
        self.intercept
    }

    pub fn apply(&self, raw: f64) -> f64 {
        raw * self.slope + self.intercept
    }
}

/// Assembles one series into a HU volume ordered by InstanceNumber.
pub fn extract_scan(datasets: &[DicomDataset]) -> Result<CtScan> {
    let first = datasets.first().ok_or(DicomError::EmptySeries)?;
    let series_uid = first
        .text(tags::SERIES_INSTANCE_UID)
        .ok_or(DicomError::MissingAttribute(tags::SERIES_INSTANCE_UID))?;
    let study_uid = first
        .text(tags::STUDY_INSTANCE_UID)
        .ok_or(DicomError::MissingAttribute(tags::STUDY_INSTANCE_UID))?;

    let mut seen = HashSet::new();
    let mut slices = Vec::with_capacity(datasets.len());
    for ds in datasets {
        let uid = ds
            .text(tags::SERIES_INSTANCE_UID)
            .ok_or(DicomError::MissingAttribute(tags::SERIES_INSTANCE_UID))?;
        if uid != series_uid {
            return Err(DicomError::MixedSeries {
                first: series_uid,
                other: uid,
            });
        }
        let instance = ds.require(tags::INSTANCE_NUMBER)?.first_integer()?;
        let instance = i32::try_from(instance).map_err(|_| DicomError::InvalidValue {
            tag: tags::INSTANCE_NUMBER,
            reason: format!("{instance} out of range"),
        })?;
        if !seen.insert(instance) {
            return Err(DicomError::DuplicateInstanceNumber(instance));
        }
        slices.push(CtSlice {
            instance_number: instance,
            hu: hounsfield_image(ds)?,
        });
    }
    slices.sort_by_key(|s| s.instance_number);
    Ok(CtScan {
        series_uid,
        study_uid,
        slices,
        label: None,
    })
}

fn hounsfield_image(ds: &DicomDataset) -> Result<Image2D> {
    let rows = ds.require(tags::ROWS)?.first_u16()?;
    let cols = ds.require(tags::COLUMNS)?.first_u16()?;
    let bits = ds.require(tags::BITS_ALLOCATED)?.first_u16()?;
    let signed = match ds.get(tags::PIXEL_REPRESENTATION) {
        Some(e) => e.first_u16()? == 1,
        None => false,
    };
    let rescale = RescaleSpec::from_dataset(ds)?;
    let data = ds.require(tags::PIXEL_DATA)?.bytes();
    let n = usize::from(rows) * usize::from(cols);
    let width = usize::from(bits / 8);
    if data.len() < n * width || !matches!(bits, 8 | 16 | 32) {
        return Err(DicomError::InvalidDataset(format!(
            "PixelData of {} bytes does not fit {rows}x{cols} at {bits} bits",
            data.len()
        )));
    }
    let raw = |c: &[u8]| -> f64 {
        match (width, signed) {
            (1, false) => f64::from(c[0]),
            (1, true) => f64::from(c[0] as i8),
            (2, false) => f64::from(u16::from_le_bytes([c[0], c[1]])),
            (2, true) => f64::from(i16::from_le_bytes([c[0], c[1]])),
            (_, false) => f64::from(u32::from_le_bytes([c[0], c[1], c[2], c[3]])),
            (_, true) => f64::from(i32::from_le_bytes([c[0], c[1], c[2], c[3]])),
        }
    };
    let pixels = data[..n * width]
        .chunks_exact(width)
        .map(|c| rescale.apply(raw(c)))
        .collect();
    Ok(Image2D::new(usize::from(rows), usize::from(cols), pixels)
        .expect("pixel count matches geometry"))
}
