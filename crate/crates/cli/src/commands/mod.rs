mod anonymize;
mod bench;
mod evaluate;
mod predict;
mod sweep;
mod synth;
mod train;

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use anyhow::{Context, Result};
use ctphase_core::eval::{read_labels, LabelRecord};
use ctphase_core::ingest::load_scans;
use ctphase_core::model::{load_model, LinearModelParams};
use ctphase_core::CtScan;

pub use anonymize::{cmd_anonymize, AnonymizeSummary};
pub use bench::{bench_scans, cmd_bench, BenchRow};
pub use evaluate::{cmd_evaluate, read_predictions, EvaluateOptions};
pub use predict::{cmd_predict, predict_rows, PredictionRow};
pub use sweep::cmd_sweep;
pub use synth::{cmd_synth, SynthSummary};
pub use train::{cmd_train, slice_dataset, TrainSummary};

use crate::args::Command;
use crate::RunConfig;

pub(crate) fn dispatch(cmd: Command, cfg: &RunConfig) -> Result<()> {
    match cmd {
        Command::Anonymize {
            input,
            output,
            whitelist,
            ..
        } => {
            let s = cmd_anonymize(&input, &output, whitelist.as_deref())?;
            println!(
                "anonymized {} files, stripped {} attributes, skipped {} non-DICOM files",
                s.processed, s.tags_stripped, s.skipped
            );
        }
        Command::Synth(args) => {
            let s = cmd_synth(&args)?;
            println!(
                "wrote {} scans ({} slices) to {}: {} train / {} test studies",
                s.scans,
                s.files,
                args.output.display(),
                s.train_studies,
                s.test_studies
            );
        }
        Command::Train {
            data,
            labels,
            model,
            train,
            ..
        } => {
            let s = cmd_train(&data, &labels, &model, &train, cfg)?;
            println!(
                "trained on {} slices from {} scans in {} steps; loss {:.4} -> {:.4}",
                s.slices,
                s.scans,
                s.steps,
                s.loss_trace.first().copied().unwrap_or(f64::NAN),
                s.loss_trace.last().copied().unwrap_or(f64::NAN)
            );
        }
        Command::Predict {
            data,
            model,
            output,
            labels,
            ..
        } => {
            let rows = cmd_predict(&data, &model, &output, labels.as_deref(), cfg)?;
            println!("predicted {} scans at R={}", rows.len(), cfg.sampler.r_percent());
        }
        Command::Evaluate {
            labels,
            predictions,
            output,
            data,
            model,
            sweep_seeds,
            level,
            ..
        } => {
            let opts = EvaluateOptions {
                data: data.as_deref(),
                model: model.as_deref(),
                sweep_seeds,
                level,
            };
            let report = cmd_evaluate(&labels, &predictions, &output, &opts, cfg)?;
            if let Some(s) = &report.scan_level {
                let m = &s.metrics;
                println!(
                    "scans: {}  accuracy {:.4}  macro P {:.4}  R {:.4}  F1 {:.4}",
                    s.items, m.accuracy, m.macro_precision, m.macro_recall, m.macro_f1
                );
            }
            if let Some(s) = &report.slice_level {
                println!("slices: {}  macro F1 {:.4}", s.items, s.metrics.macro_f1);
            }
        }
        Command::Sweep {
            data,
            labels,
            model,
            output,
            r_values,
            seeds,
            ..
        } => {
            for row in cmd_sweep(&data, &labels, &model, &output, &r_values, seeds, cfg)? {
                println!(
                    "R={:>5}  F1 {:.4}  [{:.4}, {:.4}]",
                    row.r_percent, row.mean_macro_f1, row.ci_lower, row.ci_upper
                );
            }
        }
        Command::Bench {
            data,
            model,
            r_values,
            output,
            ..
        } => {
            println!("{:>8} {:>8} {:>16} {:>14}", "R", "scans", "seconds/scan", "calls/scan");
            for row in cmd_bench(&data, &model, &r_values, output.as_deref(), cfg)? {
                println!(
                    "{:>8} {:>8} {:>16.6} {:>14.2}",
                    row.r_percent, row.scans, row.mean_seconds_per_scan, row.calls_per_scan
                );
            }
        }
    }
    Ok(())
}

pub(crate) fn read_label_file(path: &Path) -> Result<Vec<LabelRecord>> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    read_labels(BufReader::new(file)).with_context(|| format!("in {}", path.display()))
}

pub(crate) fn read_model(path: &Path) -> Result<LinearModelParams> {
    let bytes = std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    load_model(&bytes).with_context(|| format!("invalid model file {}", path.display()))
}

pub(crate) fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    }
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(BufWriter::new(file))
}

/// Loads the scans under `data` that appear in the label file, labeled and
/// ordered by series UID. Every labeled series must be present.
pub(crate) fn load_labeled_scans(data: &Path, labels_path: &Path) -> Result<Vec<CtScan>> {
    let labels = read_label_file(labels_path)?;
    let scans = load_scans(data).with_context(|| format!("loading {}", data.display()))?;
    select_labeled(scans, &labels, labels_path)
}

pub(crate) fn select_labeled(scans: Vec<CtScan>, labels: &[LabelRecord], labels_path: &Path) -> Result<Vec<CtScan>> {
    let mut by_series: std::collections::HashMap<String, CtScan> =
        scans.into_iter().map(|s| (s.series_uid.clone(), s)).collect();
    let mut out = Vec::with_capacity(labels.len());
    for (i, rec) in labels.iter().enumerate() {
        let mut scan = by_series.remove(&rec.series_uid).with_context(|| {
            format!(
                "{} row {}: series {} not found in the data directory",
                labels_path.display(),
                i + 2,
                rec.series_uid
            )
        })?;
        scan.label = Some(rec.phase);
        out.push(scan);
    }
    out.sort_by(|a, b| a.series_uid.cmp(&b.series_uid));
    Ok(out)
}
