use anyhow::{Context, Result};
use ctphase_core::eval::{study_split, write_labels};
use ctphase_core::synth::{export_dicom, generate_dataset, label_record, PhantomConfig};

use crate::args::SynthArgs;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SynthSummary {
    pub scans: usize,
    pub files: usize,
    pub train_studies: usize,
    pub test_studies: usize,
}

/// Exports a phantom dataset plus `labels.csv`, `train_labels.csv` and
/// `test_labels.csv` (a study-level split drawn with `--seed`).
pub fn cmd_synth(args: &SynthArgs) -> Result<SynthSummary> {
    let cfg = PhantomConfig {
        rows: args.rows,
        cols: args.cols,
        min_slices: args.min_slices,
        max_slices: args.max_slices,
        noise_sigma: args.noise_sigma,
        slice_label_noise: args.label_noise,
        uninformative_fraction: args.uninformative,
        seed: args.common.seed,
        ..PhantomConfig::default()
    };
    let scans = generate_dataset(&cfg, args.studies, args.scans_per_study)?;
    let exported = export_dicom(&scans, &args.output)?;

    let studies: Vec<&str> = scans.iter().map(|s| s.study_uid()).collect();
    let split = study_split(&studies, args.train_fraction, args.common.seed)?;
    for (name, idx) in [("train_labels.csv", &split.train), ("test_labels.csv", &split.test)] {
        let records: Vec<_> = idx.iter().map(|&i| label_record(&scans[i])).collect();
        let path = args.output.join(name);
        write_labels(super::create(&path)?, &records).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(SynthSummary {
        scans: exported.scans,
        files: exported.files,
        train_studies: split.train_studies.len(),
        test_studies: split.test_studies.len(),
    })
}
