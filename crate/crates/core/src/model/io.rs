//! Model file layout (all little endian):
//!
//! | bytes | field |
//! |-------|-------|
//! | 4 | magic `PHSM` |
//! | 4 | u32 format version (1) |
//! | 4 | u32 histogram bins |
//! | 4 | u32 region grid |
//! | 8 x 4 x dim | f64 weights, class-major |
//! | 8 x 4 | f64 biases |
//! | 4 | u32 CRC-32 (IEEE) of every preceding byte |

use super::linear::LinearModelParams;
use super::{ModelError, NUM_PHASES};
use crate::preprocess::FeatureConfig;

pub const MODEL_MAGIC: &[u8; 4] = b"PHSM";
pub const MODEL_VERSION: u32 = 1;

const HEADER_LEN: usize = 16;

pub fn save_model(params: &LinearModelParams) -> Vec<u8> {
    let cfg = params.features();
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * (params.weights().len() + NUM_PHASES) + 4);
    out.extend_from_slice(MODEL_MAGIC);
    out.extend_from_slice(&MODEL_VERSION.to_le_bytes());
    out.extend_from_slice(&(cfg.bins as u32).to_le_bytes());
    out.extend_from_slice(&(cfg.grid as u32).to_le_bytes());
    for v in params.weights().iter().chain(params.biases()) {
        out.extend_from_slice(&v.to_le_bytes());
    }
    let crc = crc32fast::hash(&out);
    out.extend_from_slice(&crc.to_le_bytes());
    out
}

pub fn load_model(bytes: &[u8]) -> Result<LinearModelParams, ModelError> {
    let corrupt = |msg: &str| ModelError::CorruptPayload(msg.to_string());
    if bytes.len() < HEADER_LEN {
        return Err(corrupt("shorter than the header"));
    }
    if &bytes[..4] != MODEL_MAGIC {
        return Err(corrupt("bad magic"));
    }
    let u32_at = |i: usize| u32::from_le_bytes([bytes[i], bytes[i + 1], bytes[i + 2], bytes[i + 3]]);
    let version = u32_at(4);
    if version != MODEL_VERSION {
        return Err(ModelError::VersionMismatch {
            found: version,
            expected: MODEL_VERSION,
        });
    }
    let features = FeatureConfig::new(u32_at(8) as usize, u32_at(12) as usize)
        .map_err(|e| ModelError::CorruptPayload(e.to_string()))?;
    let n_values = NUM_PHASES * features.dim() + NUM_PHASES;
    let expected_len = HEADER_LEN + 8 * n_values + 4;
    if bytes.len() != expected_len {
        return Err(ModelError::CorruptPayload(format!(
            "payload is {} bytes, expected {expected_len}",
            bytes.len()
        )));
    }
    let body_end = expected_len - 4;
    if crc32fast::hash(&bytes[..body_end]) != u32_at(body_end) {
        return Err(corrupt("checksum mismatch"));
    }
    let values: Vec<f64> = bytes[HEADER_LEN..body_end]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    let (weights, biases) = values.split_at(n_values - NUM_PHASES);
    let biases: [f64; NUM_PHASES] = biases.try_into().expect("four biases");
    LinearModelParams::new(features, weights.to_vec(), biases)
        .map_err(|e| ModelError::CorruptPayload(e.to_string()))
}
