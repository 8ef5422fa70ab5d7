//! Synthetic abdominal phantoms whose contrast pattern depends on the phase.
//!
//! Each informative slice shows a body ellipse, a circular aorta and an
//! elliptical parenchyma region. Region means are drawn once per scan from
//! the phase's [`RegionStats`], then every pixel gets Gaussian noise.
//! Uninformative slices show only the body ellipse, drawn from one
//! phase-independent distribution.

use std::fs;
use std::path::Path;

use rayon::prelude::*;

use crate::dicom::{tags, write_fixture, DicomDataset, DicomElement, DicomError, Vr};
use crate::eval::{write_labels, EvalError, LabelRecord};
use crate::phase::{PhaseLabel, NUM_PHASES};
use crate::preprocess::Image2D;
use crate::rng::{derive_seed, SeededRng};
use crate::scan::{CtScan, CtSlice};

pub const HU_MIN: f64 = -1024.0;
pub const HU_MAX: f64 = 3071.0;
const AIR_HU: f64 = -1000.0;
/// Raw stored value = HU + 1024.
pub const EXPORT_INTERCEPT: f64 = -1024.0;
const CT_IMAGE_STORAGE: &str = "1.2.840.10008.5.1.4.1.1.2";

const STUDY_SALT: u64 = 0x53_5455_4459;
const SERIES_SALT: u64 = 0x5345_5249_4553;
const SCAN_SALT: u64 = 0x5343_414e;

#[derive(Debug, thiserror::Error)]
pub enum SynthError {
    #[error("invalid phantom config: {0}")]
    InvalidConfig(String),
    #[error("need at least 2 studies, got {0}")]
    TooFewStudies(usize),
    #[error("i/o error at {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Dicom(#[from] DicomError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionStats {
    pub mean: f64,
    /// Spread of the per-scan region mean.
    pub sd: f64,
}

impl RegionStats {
    pub const fn new(mean: f64, sd: f64) -> Self {
        Self { mean, sd }
    }

    fn draw(&self, rng: &mut SeededRng) -> f64 {
        self.mean + self.sd * rng.normal()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseContrast {
    pub aorta: RegionStats,
    pub parenchyma: RegionStats,
    pub background: RegionStats,
}

impl PhaseContrast {
    const fn new(aorta: f64, parenchyma: f64) -> Self {
        Self {
            aorta: RegionStats::new(aorta, 10.0),
            parenchyma: RegionStats::new(parenchyma, 5.0),
            background: RegionStats::new(40.0, 5.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhantomConfig {
    pub rows: usize,
    pub cols: usize,
    pub min_slices: usize,
    pub max_slices: usize,
    /// Indexed by phase ordinal.
    pub contrast: [PhaseContrast; NUM_PHASES],
    /// Body region of uninformative slices, shared by all phases.
    pub uninformative: RegionStats,
    pub noise_sigma: f64,
    /// Probability that a slice is rendered with another phase's contrast.
    pub slice_label_noise: f64,
    /// Probability that a slice carries no contrast-bearing region.
    pub uninformative_fraction: f64,
    pub seed: u64,
}

impl Default for PhantomConfig {
    fn default() -> Self {
        Self {
            rows: 64,
            cols: 64,
            min_slices: 30,
            max_slices: 60,
            contrast: [
                PhaseContrast::new(45.0, 55.0),
                PhaseContrast::new(300.0, 70.0),
                PhaseContrast::new(150.0, 110.0),
                PhaseContrast::new(90.0, 85.0),
            ],
            uninformative: RegionStats::new(40.0, 5.0),
            noise_sigma: 15.0,
            slice_label_noise: 0.0,
            uninformative_fraction: 0.0,
            seed: 0,
        }
    }
}

impl PhantomConfig {
    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |m: String| Err(SynthError::InvalidConfig(m));
        if self.rows < 16 || self.cols < 16 {
            return bad(format!("image must be at least 16x16, got {}x{}", self.rows, self.cols));
        }
        if self.min_slices == 0 || self.min_slices > self.max_slices {
            return bad(format!(
                "slice range {}..={} is empty or starts at zero",
                self.min_slices, self.max_slices
            ));
        }
        if self.max_slices > i32::MAX as usize {
            return bad("too many slices".into());
        }
        for (name, p) in [
            ("slice_label_noise", self.slice_label_noise),
            ("uninformative_fraction", self.uninformative_fraction),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{name} must lie in [0, 1], got {p}"));
            }
        }
        let mut stats = vec![("noise_sigma", RegionStats::new(0.0, self.noise_sigma))];
        stats.push(("uninformative", self.uninformative));
        for c in &self.contrast {
            stats.extend([("aorta", c.aorta), ("parenchyma", c.parenchyma), ("background", c.background)]);
        }
        for (name, s) in stats {
            if !s.mean.is_finite() || !(s.sd >= 0.0 && s.sd.is_finite()) {
                return bad(format!("{name}: mean must be finite and sd a finite value >= 0"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledScan {
    pub scan: CtScan,
    pub phase: PhaseLabel,
    /// Whether each slice shows the contrast-bearing regions.
    pub informative: Vec<bool>,
}

impl LabeledScan {
    pub fn study_uid(&self) -> &str {
        &self.scan.study_uid
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Air,
    Body,
    Aorta,
    Parenchyma,
}

fn inside(r: f64, c: f64, center: (f64, f64), semi: (f64, f64)) -> bool {
    let dr = (r - center.0) / semi.0;
    let dc = (c - center.1) / semi.1;
    dr * dr + dc * dc <= 1.0
}

/// Region under pixel `(r, c)` of an informative slice, geometry expressed
/// in fractions of the image so it scales with the configured size.
pub fn region_at(r: usize, c: usize, rows: usize, cols: usize) -> Region {
    let y = (r as f64 + 0.5) / rows as f64;
    let x = (c as f64 + 0.5) / cols as f64;
    let aorta_radius = 0.18;
    if inside(y, x, (0.5, 0.69), (aorta_radius, aorta_radius * rows as f64 / cols as f64)) {
        Region::Aorta
    } else if inside(y, x, (0.5, 0.28), (0.26, 0.2)) {
        Region::Parenchyma
    } else if inside(y, x, (0.5, 0.5), (0.45, 0.47)) {
        Region::Body
    } else {
        Region::Air
    }
}

fn clamp_hu(v: f64) -> f64 {
    v.round().clamp(HU_MIN, HU_MAX)
}

struct Rendering {
    aorta: f64,
    parenchyma: f64,
    background: f64,
}

fn render_slice(cfg: &PhantomConfig, means: &Rendering, informative: bool, rng: &mut SeededRng) -> Image2D {
    let (rows, cols) = (cfg.rows, cfg.cols);
    let mut pixels = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            let region = match region_at(r, c, rows, cols) {
                Region::Air => Region::Air,
                _ if !informative => Region::Body,
                other => other,
            };
            let base = match region {
                Region::Air => AIR_HU,
                Region::Body => means.background,
                Region::Aorta => means.aorta,
                Region::Parenchyma => means.parenchyma,
            };
            let noise = if region == Region::Air { 0.0 } else { cfg.noise_sigma * rng.normal() };
            pixels.push(clamp_hu(base + noise));
        }
    }
    Image2D::new(rows, cols, pixels).expect("dims validated")
}

fn draw_rendering(c: &PhaseContrast, rng: &mut SeededRng) -> Rendering {
    Rendering {
        aorta: c.aorta.draw(rng),
        parenchyma: c.parenchyma.draw(rng),
        background: c.background.draw(rng),
    }
}

fn uid(seed: u64, salt: u64, index: u64) -> String {
    format!("2.25.{}", derive_seed(derive_seed(seed, salt), index))
}

fn generate_scan(cfg: &PhantomConfig, index: usize, study: usize) -> LabeledScan {
    let phase = PhaseLabel::ALL[index % NUM_PHASES];
    let mut rng = SeededRng::new(derive_seed(derive_seed(cfg.seed, SCAN_SALT), index as u64));
    let n = cfg.min_slices + rng.below_usize(cfg.max_slices - cfg.min_slices + 1);
    let own = draw_rendering(&cfg.contrast[phase.ordinal()], &mut rng);
    let uninformative_body = Rendering {
        aorta: 0.0,
        parenchyma: 0.0,
        background: cfg.uninformative.draw(&mut rng),
    };

    let mut slices = Vec::with_capacity(n);
    let mut informative = Vec::with_capacity(n);
    for i in 0..n {
        let is_informative = !rng.bernoulli(cfg.uninformative_fraction);
        let hu = if !is_informative {
            render_slice(cfg, &uninformative_body, false, &mut rng)
        } else if rng.bernoulli(cfg.slice_label_noise) {
            let other = (phase.ordinal() + 1 + rng.below_usize(NUM_PHASES - 1)) % NUM_PHASES;
            let swapped = draw_rendering(&cfg.contrast[other], &mut rng);
            render_slice(cfg, &swapped, true, &mut rng)
        } else {
            render_slice(cfg, &own, true, &mut rng)
        };
        slices.push(CtSlice {
            instance_number: i as i32 + 1,
            hu,
        });
        informative.push(is_informative);
    }
    LabeledScan {
        scan: CtScan {
            series_uid: uid(cfg.seed, SERIES_SALT, index as u64),
            study_uid: uid(cfg.seed, STUDY_SALT, study as u64),
            slices,
            label: Some(phase),
        },
        phase,
        informative,
    }
}

/// `n_studies * scans_per_study` scans. Scan `j` belongs to study
/// `j / scans_per_study` and has phase `j mod 4`.
pub fn generate_dataset(
    cfg: &PhantomConfig,
    n_studies: usize,
    scans_per_study: usize,
) -> Result<Vec<LabeledScan>, SynthError> {
    cfg.validate()?;
    if n_studies < 2 {
        return Err(SynthError::TooFewStudies(n_studies));
    }
    if scans_per_study == 0 {
        return Err(SynthError::InvalidConfig("scans_per_study must be at least 1".into()));
    }
    Ok((0..n_studies * scans_per_study)
        .into_par_iter()
        .map(|j| generate_scan(cfg, j, j / scans_per_study))
        .collect())
}

/// Whitelisted attributes of one exported slice.
pub fn slice_dataset(scan: &CtScan, slice: &CtSlice) -> DicomDataset {
    let hu = &slice.hu;
    let mut raw = Vec::with_capacity(hu.pixels().len() * 2);
    for &v in hu.pixels() {
        let stored = (clamp_hu(v) - EXPORT_INTERCEPT) as u16;
        raw.extend_from_slice(&stored.to_le_bytes());
    }
    let thickness = 5.0;
    let z = f64::from(slice.instance_number) * thickness;
    DicomDataset::empty()
        .with(DicomElement::text(tags::SOP_CLASS_UID, Vr::UI, CT_IMAGE_STORAGE))
        .with(DicomElement::text(
            tags::SOP_INSTANCE_UID,
            Vr::UI,
            &format!("{}.{}", scan.series_uid, slice.instance_number),
        ))
        .with(DicomElement::text(tags::MODALITY, Vr::CS, "CT"))
        .with(DicomElement::decimal(tags::SLICE_THICKNESS, thickness))
        .with(DicomElement::text(tags::STUDY_INSTANCE_UID, Vr::UI, &scan.study_uid))
        .with(DicomElement::text(tags::SERIES_INSTANCE_UID, Vr::UI, &scan.series_uid))
        .with(DicomElement::integer(tags::INSTANCE_NUMBER, i64::from(slice.instance_number)))
        .with(DicomElement::decimals(tags::IMAGE_POSITION_PATIENT, &[0.0, 0.0, z]))
        .with(DicomElement::decimals(
            tags::IMAGE_ORIENTATION_PATIENT,
            &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0],
        ))
        .with(DicomElement::u16(tags::ROWS, hu.rows() as u16))
        .with(DicomElement::u16(tags::COLUMNS, hu.cols() as u16))
        .with(DicomElement::decimals(tags::PIXEL_SPACING, &[0.7, 0.7]))
        .with(DicomElement::u16(tags::BITS_ALLOCATED, 16))
        .with(DicomElement::u16(tags::BITS_STORED, 12))
        .with(DicomElement::u16(tags::PIXEL_REPRESENTATION, 0))
        .with(DicomElement::decimal(tags::WINDOW_CENTER, 50.0))
        .with(DicomElement::decimal(tags::WINDOW_WIDTH, 400.0))
        .with(DicomElement::decimal(tags::RESCALE_INTERCEPT, EXPORT_INTERCEPT))
        .with(DicomElement::decimal(tags::RESCALE_SLOPE, 1.0))
        .with(DicomElement::new(tags::PIXEL_DATA, Vr::OW, raw))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExportSummary {
    pub scans: usize,
    pub files: usize,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> SynthError + '_ {
    move |source| SynthError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Writes `<out>/<study_uid>/<series_uid>/<instance>.dcm` for every slice
/// and `<out>/labels.csv` with one row per scan.
pub fn export_dicom(scans: &[LabeledScan], out: &Path) -> Result<ExportSummary, SynthError> {
    fs::create_dir_all(out).map_err(io_err(out))?;
    let files = scans
        .par_iter()
        .map(|ls| {
            let dir = out.join(&ls.scan.study_uid).join(&ls.scan.series_uid);
            fs::create_dir_all(&dir).map_err(io_err(&dir))?;
            for slice in &ls.scan.slices {
                let bytes = write_fixture(&slice_dataset(&ls.scan, slice))?;
                let path = dir.join(format!("{}.dcm", slice.instance_number));
                fs::write(&path, bytes).map_err(io_err(&path))?;
            }
            Ok(ls.scan.slices.len())
        })
        .collect::<Result<Vec<usize>, SynthError>>()?
        .into_iter()
        .sum();
    let labels: Vec<LabelRecord> = scans.iter().map(label_record).collect();
    let path = out.join("labels.csv");
    let file = fs::File::create(&path).map_err(io_err(&path))?;
    write_labels(file, &labels)?;
    Ok(ExportSummary {
        scans: scans.len(),
        files,
    })
}

pub fn label_record(ls: &LabeledScan) -> LabelRecord {
    LabelRecord {
        series_uid: ls.scan.series_uid.clone(),
        study_uid: ls.scan.study_uid.clone(),
        phase: ls.phase,
    }
}
