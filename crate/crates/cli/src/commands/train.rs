use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use ctphase_core::model::{save_model, train, TrainConfig};
use ctphase_core::preprocess::{FeatureConfig, FeatureVector, PreprocessConfig};
use ctphase_core::{CtScan, PhaseLabel};
use rayon::prelude::*;

use crate::args::TrainArgs;
use crate::RunConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainSummary {
    pub scans: usize,
    pub slices: usize,
    pub steps: usize,
    pub loss_trace: Vec<f64>,
}

/// Features of every slice, each labeled with its scan's phase, in scan
/// then slice order. Scans must carry labels.
pub fn slice_dataset(scans: &[CtScan], pre: &PreprocessConfig) -> Result<Vec<(FeatureVector, PhaseLabel)>> {
    let per_scan = scans
        .par_iter()
        .map(|scan| {
            let label = scan
                .label
                .with_context(|| format!("scan {} has no label", scan.series_uid))?;
            scan.slices
                .iter()
                .map(|s| Ok((pre.slice_features(&s.hu)?, label)))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(per_scan.into_iter().flatten().collect())
}

pub fn cmd_train(data: &Path, labels: &Path, model: &Path, args: &TrainArgs, cfg: &RunConfig) -> Result<TrainSummary> {
    let features = FeatureConfig::new(args.bins, args.grid)?;
    let scans = super::load_labeled_scans(data, labels)?;
    let dataset = slice_dataset(&scans, &cfg.preprocess(features))?;
    let train_cfg = TrainConfig {
        base_lr: args.lr,
        epochs: args.epochs,
        warmup_steps: args.warmup_steps,
        batch_size: args.batch_size,
        seed: cfg.seed,
        ..TrainConfig::default()
    };
    let outcome = train(&dataset, features, &train_cfg)?;
    let mut out = super::create(model)?;
    out.write_all(&save_model(&outcome.params))
        .and_then(|_| out.flush())
        .with_context(|| format!("cannot write {}", model.display()))?;
    Ok(TrainSummary {
        scans: scans.len(),
        slices: dataset.len(),
        steps: outcome.steps,
        loss_trace: outcome.loss_trace,
    })
}
