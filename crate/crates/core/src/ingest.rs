//! Loading DICOM directory trees into HU scans.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use walkdir::WalkDir;

use crate::dicom::{extract_scan, parse_dicom, tags, DicomDataset, DicomError};
use crate::eval::LabelRecord;
use crate::scan::CtScan;

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Walk(#[from] walkdir::Error),
    #[error("{path}: {source}")]
    Dicom { path: PathBuf, source: DicomError },
    #[error("series {series_uid}: {source}")]
    Series { series_uid: String, source: DicomError },
    #[error("no parseable DICOM files under {0}")]
    NoDicomFiles(PathBuf),
    #[error("no label for series {0}")]
    MissingLabel(String),
}

/// Every regular file under a root, split by whether it parsed.
#[derive(Debug, Default)]
pub struct DicomTree {
    pub parsed: Vec<(PathBuf, DicomDataset)>,
    pub skipped: Vec<(PathBuf, DicomError)>,
}

/// Regular files under `root`, in lexicographic path order.
pub fn list_files(root: &Path) -> Result<Vec<PathBuf>, IngestError> {
    let mut files = Vec::new();
    for entry in WalkDir::new(root).sort_by_file_name() {
        let entry = entry?;
        if entry.file_type().is_file() {
            files.push(entry.into_path());
        }
    }
    Ok(files)
}

pub fn read_tree(root: &Path) -> Result<DicomTree, IngestError> {
    let results = list_files(root)?
        .into_par_iter()
        .map(|path| {
            let bytes = fs::read(&path).map_err(|source| IngestError::Io {
                path: path.clone(),
                source,
            })?;
            Ok((path, parse_dicom(&bytes)))
        })
        .collect::<Result<Vec<_>, IngestError>>()?;
    let mut tree = DicomTree::default();
    for (path, parsed) in results {
        match parsed {
            Ok(ds) => tree.parsed.push((path, ds)),
            Err(e) => tree.skipped.push((path, e)),
        }
    }
    Ok(tree)
}

/// Groups parsed files by SeriesInstanceUID and assembles each series.
/// Scans come back ordered by series UID.
pub fn scans_from_tree(tree: DicomTree) -> Result<Vec<CtScan>, IngestError> {
    let mut series: BTreeMap<String, Vec<DicomDataset>> = BTreeMap::new();
    for (path, ds) in tree.parsed {
        let uid = ds.text(tags::SERIES_INSTANCE_UID).ok_or(IngestError::Dicom {
            path,
            source: DicomError::MissingAttribute(tags::SERIES_INSTANCE_UID),
        })?;
        series.entry(uid).or_default().push(ds);
    }
    series
        .into_par_iter()
        .map(|(series_uid, datasets)| {
            extract_scan(&datasets).map_err(|source| IngestError::Series { series_uid, source })
        })
        .collect()
}

/// Reads every series under `root`; files that fail to parse are ignored.
pub fn load_scans(root: &Path) -> Result<Vec<CtScan>, IngestError> {
    let tree = read_tree(root)?;
    if tree.parsed.is_empty() {
        return Err(IngestError::NoDicomFiles(root.to_path_buf()));
    }
    scans_from_tree(tree)
}

/// Sets each scan's label from the label table, keyed by series UID.
pub fn attach_labels(scans: &mut [CtScan], labels: &[LabelRecord]) -> Result<(), IngestError> {
    let by_series: BTreeMap<&str, &LabelRecord> =
        labels.iter().map(|l| (l.series_uid.as_str(), l)).collect();
    for scan in scans {
        let rec = by_series
            .get(scan.series_uid.as_str())
            .ok_or_else(|| IngestError::MissingLabel(scan.series_uid.clone()))?;
        scan.label = Some(rec.phase);
    }
    Ok(())
}
