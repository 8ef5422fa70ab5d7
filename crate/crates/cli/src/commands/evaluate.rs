use std::collections::HashMap;
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use ctphase_core::eval::{EvalReport, LevelReport};
use ctphase_core::model::SliceProbs;
use ctphase_core::pipeline::{r_sweep_scans, score_all_slices, DEFAULT_R_GRID};

use super::predict::PredictionRow;
use crate::RunConfig;

#[derive(Debug, Clone, Copy, Default)]
pub struct EvaluateOptions<'a> {
    pub data: Option<&'a Path>,
    pub model: Option<&'a Path>,
    pub sweep_seeds: Option<usize>,
    pub level: f64,
}

/// Reads a prediction CSV; errors name the file and 1-based line.
pub fn read_predictions(path: &Path) -> Result<Vec<PredictionRow>> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    let mut rdr = csv::Reader::from_reader(BufReader::new(file));
    let mut rows = Vec::new();
    for (i, rec) in rdr.deserialize::<PredictionRow>().enumerate() {
        let row = rec.with_context(|| format!("{} row {}", path.display(), i + 2))?;
        let k: usize = row.votes().iter().sum();
        if k != row.k_sampled || k == 0 {
            bail!(
                "{} row {}: votes sum to {k} but k_sampled is {}",
                path.display(),
                i + 2,
                row.k_sampled
            );
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Scan-level metrics for every labeled series, plus slice-level metrics and
/// an optional R sweep when the data and model are supplied. Scan-level
/// AUCs score each class by its vote share.
pub fn cmd_evaluate(
    labels_path: &Path,
    predictions: &Path,
    output: &Path,
    opts: &EvaluateOptions<'_>,
    cfg: &RunConfig,
) -> Result<EvalReport> {
    let labels = super::read_label_file(labels_path)?;
    let preds = read_predictions(predictions)?;
    let by_series: HashMap<&str, &PredictionRow> = preds.iter().map(|p| (p.series_uid.as_str(), p)).collect();

    let mut truth = Vec::with_capacity(labels.len());
    let mut pred = Vec::with_capacity(labels.len());
    let mut shares = Vec::with_capacity(labels.len());
    for (i, rec) in labels.iter().enumerate() {
        let p = by_series.get(rec.series_uid.as_str()).with_context(|| {
            format!(
                "{} row {}: no prediction for series {} in {}",
                labels_path.display(),
                i + 2,
                rec.series_uid,
                predictions.display()
            )
        })?;
        truth.push(rec.phase);
        pred.push(p.predicted_phase);
        let k = p.k_sampled as f64;
        let v = p.votes();
        shares.push(SliceProbs::new(v.map(|c| c as f64 / k)).expect("shares lie in [0, 1]"));
    }
    let scan_level = LevelReport::evaluate(&truth, &pred, Some(&shares), cfg.resamples, opts.level, cfg.seed)?;

    let mut report = EvalReport {
        scan_level: Some(scan_level),
        ..EvalReport::default()
    };
    if let (Some(data), Some(model)) = (opts.data, opts.model) {
        let params = super::read_model(model)?;
        let pre = cfg.preprocess(params.features());
        let scans = super::load_labeled_scans(data, labels_path)?;
        let mut slice_truth = Vec::new();
        let mut slice_scores = Vec::new();
        for scan in &scans {
            let probs = score_all_slices(scan, &params, &pre)?;
            slice_truth.extend(std::iter::repeat_n(scan.label.expect("labeled"), probs.len()));
            slice_scores.extend(probs);
        }
        let slice_pred: Vec<_> = slice_scores.iter().map(|p| p.argmax()).collect();
        report.slice_level = Some(LevelReport::evaluate(
            &slice_truth,
            &slice_pred,
            Some(&slice_scores),
            cfg.resamples,
            opts.level,
            cfg.seed,
        )?);
        if let Some(seeds) = opts.sweep_seeds {
            report.r_sweep = Some(r_sweep_scans(&scans, &params, &pre, &DEFAULT_R_GRID, seeds, cfg.seed)?);
        }
    }

    let mut out = super::create(output)?;
    serde_json::to_writer_pretty(&mut out, &report)?;
    out.write_all(b"\n")
        .and_then(|_| out.flush())
        .with_context(|| format!("cannot write {}", output.display()))?;
    Ok(report)
}
