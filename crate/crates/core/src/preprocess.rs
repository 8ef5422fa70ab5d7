//! Slice preprocessing: HU windowing, bilinear resizing and regional
//! intensity histograms.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PreprocessError {
    #[error("window width must be positive and finite, got {0}")]
    InvalidWindow(f64),
    #[error("image of {rows}x{cols} needs {expected} pixels, got {actual}")]
    PixelCount {
        rows: usize,
        cols: usize,
        expected: usize,
        actual: usize,
    },
    #[error("image dimensions must be positive, got {rows}x{cols}")]
    EmptyImage { rows: usize, cols: usize },
    #[error("feature config needs bins >= 2 and grid in {{1, 2}}, got bins={bins}, grid={grid}")]
    InvalidFeatureConfig { bins: usize, grid: usize },
}

/// Row-major single-channel image.
#[derive(Debug, Clone, PartialEq)]
pub struct Image2D {
    rows: usize,
    cols: usize,
    pixels: Vec<f64>,
}

impl Image2D {
    pub fn new(rows: usize, cols: usize, pixels: Vec<f64>) -> Result<Self, PreprocessError> {
        if rows == 0 || cols == 0 {
            return Err(PreprocessError::EmptyImage { rows, cols });
        }
        if pixels.len() != rows * cols {
            return Err(PreprocessError::PixelCount {
                rows,
                cols,
                expected: rows * cols,
                actual: pixels.len(),
            });
        }
        Ok(Self { rows, cols, pixels })
    }

    pub fn filled(rows: usize, cols: usize, value: f64) -> Result<Self, PreprocessError> {
        Self::new(rows, cols, vec![value; rows * cols])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.pixels[r * self.cols + c]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            pixels: self.pixels.iter().map(|&v| f(v)).collect(),
        }
    }
}

/// HU display window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowSpec {
    center: f64,
    width: f64,
}

impl Default for WindowSpec {
    /// Abdominal soft-tissue window, center 50 / width 400.
    fn default() -> Self {
        Self {
            center: 50.0,
            width: 400.0,
        }
    }
}

impl WindowSpec {
    pub fn new(center: f64, width: f64) -> Result<Self, PreprocessError> {
        if !(width > 0.0 && width.is_finite()) || !center.is_finite() {
            return Err(PreprocessError::InvalidWindow(width));
        }
        Ok(Self { center, width })
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn lower(&self) -> f64 {
        self.center - self.width / 2.0
    }

    /// Maps one HU value into `[0, 1]`.
    pub fn normalize(&self, hu: f64) -> f64 {
        ((hu - self.lower()) / self.width).clamp(0.0, 1.0)
    }
}

pub fn apply_window(slice: &Image2D, window: WindowSpec) -> Image2D {
    slice.map(|hu| window.normalize(hu))
}

/// Bilinear resize with half-pixel centers: output pixel `i` samples the
/// input at `(i + 0.5) * in / out - 0.5`, clamped to the valid range.
pub fn resize_bilinear(img: &Image2D, rows: usize, cols: usize) -> Result<Image2D, PreprocessError> {
    if rows == 0 || cols == 0 {
        return Err(PreprocessError::EmptyImage { rows, cols });
    }
    if rows == img.rows && cols == img.cols {
        return Ok(img.clone());
    }
    let xs = sample_axis(img.cols, cols);
    let ys = sample_axis(img.rows, rows);
    let mut out = Vec::with_capacity(rows * cols);
    for &(y0, y1, fy) in &ys {
        let top = &img.pixels[y0 * img.cols..(y0 + 1) * img.cols];
        let bottom = &img.pixels[y1 * img.cols..(y1 + 1) * img.cols];
        for &(x0, x1, fx) in &xs {
            let a = lerp(top[x0], top[x1], fx);
            let b = lerp(bottom[x0], bottom[x1], fx);
            out.push(lerp(a, b, fy));
        }
    }
    Image2D::new(rows, cols, out)
}

fn sample_axis(input: usize, output: usize) -> Vec<(usize, usize, f64)> {
    let scale = input as f64 / output as f64;
    let last = (input - 1) as f64;
    (0..output)
        .map(|i| {
            let pos = ((i as f64 + 0.5) * scale - 0.5).clamp(0.0, last);
            let i0 = pos.floor() as usize;
            let i1 = (i0 + 1).min(input - 1);
            (i0, i1, pos - i0 as f64)
        })
        .collect()
}

/// `a + (b - a) * t`, kept inside `[min(a, b), max(a, b)]`.
fn lerp(a: f64, b: f64, t: f64) -> f64 {
    let v = a + (b - a) * t;
    if a <= b {
        v.clamp(a, b)
    } else {
        v.clamp(b, a)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureConfig {
    pub bins: usize,
    pub grid: usize,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self { bins: 32, grid: 2 }
    }
}

impl FeatureConfig {
    pub fn new(bins: usize, grid: usize) -> Result<Self, PreprocessError> {
        let cfg = Self { bins, grid };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), PreprocessError> {
        if self.bins < 2 || !(1..=2).contains(&self.grid) {
            return Err(PreprocessError::InvalidFeatureConfig {
                bins: self.bins,
                grid: self.grid,
            });
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.bins * self.grid * self.grid
    }
}

/// Concatenated per-region histograms.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector(pub Vec<f64>);

impl FeatureVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Splits the image into `grid x grid` regions (row-major) and emits an
/// L1-normalized histogram of each over `bins` equal bins on `[0, 1]`.
/// A value on a bin edge lands in the upper bin; 1.0 lands in the last bin.
/// Empty regions contribute all-zero histograms.
pub fn extract_features(img: &Image2D, cfg: FeatureConfig) -> Result<FeatureVector, PreprocessError> {
    cfg.validate()?;
    let mut out = vec![0.0; cfg.dim()];
    for gr in 0..cfg.grid {
        let (r0, r1) = (gr * img.rows / cfg.grid, (gr + 1) * img.rows / cfg.grid);
        for gc in 0..cfg.grid {
            let (c0, c1) = (gc * img.cols / cfg.grid, (gc + 1) * img.cols / cfg.grid);
            let hist = &mut out[(gr * cfg.grid + gc) * cfg.bins..][..cfg.bins];
            let mut count = 0usize;
            for r in r0..r1 {
                for &v in &img.pixels[r * img.cols + c0..r * img.cols + c1] {
                    hist[bin_of(v, cfg.bins)] += 1.0;
                    count += 1;
                }
            }
            if count > 0 {
                let inv = 1.0 / count as f64;
                hist.iter_mut().for_each(|h| *h *= inv);
            }
        }
    }
    Ok(FeatureVector(out))
}

fn bin_of(v: f64, bins: usize) -> usize {
    let scaled = (v * bins as f64).floor();
    if scaled <= 0.0 {
        0
    } else {
        (scaled as usize).min(bins - 1)
    }
}

/// The full HU-slice to feature-vector chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PreprocessConfig {
    pub window: WindowSpec,
    /// Square working resolution the windowed slice is resized to.
    pub resolution: usize,
    pub features: FeatureConfig,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        Self {
            window: WindowSpec::default(),
            resolution: 128,
            features: FeatureConfig::default(),
        }
    }
}

impl PreprocessConfig {
    pub fn slice_features(&self, hu: &Image2D) -> Result<FeatureVector, PreprocessError> {
        let windowed = apply_window(hu, self.window);
        let resized = resize_bilinear(&windowed, self.resolution, self.resolution)?;
        extract_features(&resized, self.features)
    }
}
