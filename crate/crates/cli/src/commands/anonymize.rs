use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use ctphase_core::dicom::{anonymize, parse_dicom, write_fixture, Whitelist};
use ctphase_core::ingest::list_files;
use tracing::warn;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnonymizeSummary {
    pub processed: usize,
    pub skipped: usize,
    pub tags_stripped: usize,
}

/// Mirrors `input` into `output`, keeping only whitelisted attributes in
/// every parseable file. Other files are skipped with a warning.
pub fn cmd_anonymize(input: &Path, output: &Path, whitelist: Option<&Path>) -> Result<AnonymizeSummary> {
    let wl = match whitelist {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("cannot read {}", p.display()))?;
            Whitelist::parse(&text).with_context(|| format!("in {}", p.display()))?
        }
        None => Whitelist::default_ct(),
    };
    ensure_dir(input)?;
    let mut summary = AnonymizeSummary {
        processed: 0,
        skipped: 0,
        tags_stripped: 0,
    };
    for path in list_files(input)? {
        let bytes = fs::read(&path).with_context(|| format!("cannot read {}", path.display()))?;
        let ds = match parse_dicom(&bytes) {
            Ok(ds) => ds,
            Err(e) => {
                warn!("skipping {}: {e}", path.display());
                summary.skipped += 1;
                continue;
            }
        };
        let original = ds.len();
        let clean = anonymize(&ds.to_explicit_vr(), &wl);
        summary.tags_stripped += original - clean.len();
        let rel = path.strip_prefix(input).expect("walked under input");
        let dest = output.join(rel);
        if let Some(dir) = dest.parent() {
            fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        }
        let encoded = write_fixture(&clean).with_context(|| format!("re-encoding {}", path.display()))?;
        fs::write(&dest, encoded).with_context(|| format!("cannot write {}", dest.display()))?;
        summary.processed += 1;
    }
    if summary.processed == 0 {
        bail!("no parseable DICOM files under {}", input.display());
    }
    Ok(summary)
}

fn ensure_dir(p: &Path) -> Result<()> {
    if !p.is_dir() {
        bail!("{} is not a directory", p.display());
    }
    Ok(())
}
