use std::path::Path;

use anyhow::{Context, Result};
use ctphase_core::ingest::load_scans;
use ctphase_core::model::SliceClassifier;
use ctphase_core::pipeline::{predict_scan, SamplerConfig};
use ctphase_core::preprocess::PreprocessConfig;
use ctphase_core::{CtScan, PhaseLabel};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::RunConfig;

/// One line of the prediction CSV.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictionRow {
    pub series_uid: String,
    pub study_uid: String,
    pub predicted_phase: PhaseLabel,
    pub votes_nc: usize,
    pub votes_art: usize,
    pub votes_ven: usize,
    pub votes_other: usize,
    pub k_sampled: usize,
    pub seed: u64,
}

impl PredictionRow {
    pub fn votes(&self) -> [usize; 4] {
        [self.votes_nc, self.votes_art, self.votes_ven, self.votes_other]
    }
}

/// Predicts every scan in parallel; output order follows `scans`.
pub fn predict_rows<C: SliceClassifier>(
    scans: &[CtScan],
    classifier: &C,
    sampler: &SamplerConfig,
    pre: &PreprocessConfig,
) -> Result<Vec<PredictionRow>> {
    scans
        .par_iter()
        .map(|scan| {
            let p = predict_scan(scan, classifier, sampler, pre)
                .with_context(|| format!("predicting series {}", scan.series_uid))?;
            let [votes_nc, votes_art, votes_ven, votes_other] = p.vote_counts;
            Ok(PredictionRow {
                series_uid: scan.series_uid.clone(),
                study_uid: scan.study_uid.clone(),
                predicted_phase: p.phase,
                votes_nc,
                votes_art,
                votes_ven,
                votes_other,
                k_sampled: p.sampled_indices.len(),
                seed: sampler.seed,
            })
        })
        .collect()
}

pub fn cmd_predict(
    data: &Path,
    model: &Path,
    output: &Path,
    labels: Option<&Path>,
    cfg: &RunConfig,
) -> Result<Vec<PredictionRow>> {
    let params = super::read_model(model)?;
    let scans = match labels {
        Some(l) => super::load_labeled_scans(data, l)?,
        None => load_scans(data).with_context(|| format!("loading {}", data.display()))?,
    };
    let rows = predict_rows(&scans, &params, &cfg.sampler, &cfg.preprocess(params.features()))?;
    let mut w = csv::Writer::from_writer(super::create(output)?);
    for row in &rows {
        w.serialize(row)?;
    }
    w.flush().with_context(|| format!("cannot write {}", output.display()))?;
    Ok(rows)
}
