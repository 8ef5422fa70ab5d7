use std::path::Path;

use anyhow::{Context, Result};
use ctphase_core::pipeline::{r_sweep_scans, SweepRow, DEFAULT_R_GRID};

use crate::RunConfig;

/// Writes one CSV row per R; an empty `r_values` means the default grid.
pub fn cmd_sweep(
    data: &Path,
    labels: &Path,
    model: &Path,
    output: &Path,
    r_values: &[f64],
    seeds: usize,
    cfg: &RunConfig,
) -> Result<Vec<SweepRow>> {
    let params = super::read_model(model)?;
    let scans = super::load_labeled_scans(data, labels)?;
    let grid = if r_values.is_empty() { &DEFAULT_R_GRID[..] } else { r_values };
    let rows = r_sweep_scans(&scans, &params, &cfg.preprocess(params.features()), grid, seeds, cfg.seed)?;
    let mut w = csv::Writer::from_writer(super::create(output)?);
    for row in &rows {
        w.serialize(row)?;
    }
    w.flush().with_context(|| format!("cannot write {}", output.display()))?;
    Ok(rows)
}
