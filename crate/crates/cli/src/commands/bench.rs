use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use ctphase_core::ingest::load_scans;
use ctphase_core::model::SliceClassifier;
use ctphase_core::pipeline::{predict_scan, CountingClassifier, SamplerConfig};
use ctphase_core::preprocess::PreprocessConfig;
use ctphase_core::CtScan;
use serde::Serialize;
use tracing::warn;

use crate::RunConfig;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub r_percent: f64,
    pub scans: usize,
    pub mean_seconds_per_scan: f64,
    pub calls_per_scan: f64,
}

/// Times `predict_scan` on each scan, one scan at a time on the calling
/// thread, after one untimed warmup pass over the first scan.
pub fn bench_scans<C: SliceClassifier>(
    scans: &[CtScan],
    classifier: &C,
    pre: &PreprocessConfig,
    r_values: &[f64],
    seed: u64,
) -> Result<Vec<BenchRow>> {
    if scans.is_empty() {
        bail!("nothing to benchmark");
    }
    if scans.len() < 10 {
        warn!("only {} scans; timings will be noisy", scans.len());
    }
    let counting = CountingClassifier::new(classifier);
    r_values
        .iter()
        .map(|&r| {
            let sampler = SamplerConfig::new(r, seed)?;
            predict_scan(&scans[0], &counting, &sampler, pre)?;
            counting.reset();
            let mut elapsed = 0.0;
            for scan in scans {
                let start = Instant::now();
                let p = predict_scan(scan, &counting, &sampler, pre)?;
                elapsed += start.elapsed().as_secs_f64();
                std::hint::black_box(p);
            }
            let n = scans.len() as f64;
            Ok(BenchRow {
                r_percent: r,
                scans: scans.len(),
                mean_seconds_per_scan: elapsed / n,
                calls_per_scan: counting.calls() as f64 / n,
            })
        })
        .collect()
}

pub fn cmd_bench(
    data: &Path,
    model: &Path,
    r_values: &[f64],
    output: Option<&Path>,
    cfg: &RunConfig,
) -> Result<Vec<BenchRow>> {
    let params = super::read_model(model)?;
    let scans = load_scans(data).with_context(|| format!("loading {}", data.display()))?;
    let rows = bench_scans(&scans, &params, &cfg.preprocess(params.features()), r_values, cfg.seed)?;
    if let Some(path) = output {
        let mut w = csv::Writer::from_writer(super::create(path)?);
        for row in &rows {
            w.serialize(row)?;
        }
        w.flush().with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(rows)
}
