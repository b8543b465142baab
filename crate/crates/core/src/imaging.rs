//! Pixel-level pipeline stages.
//!
//! Every stage is a pure function over immutable images. Images are stored
//! row-major with the origin at the top-left corner.

use thiserror::Error;

/// Number of intensity levels in an 8-bit image.
pub const LEVELS: usize = 256;

/// Threshold used when a histogram has a single populated level.
pub const FALLBACK_THRESHOLD: u8 = 128;

/// Default gradient magnitude at which a pixel counts as an edge.
pub const DEFAULT_EDGE_LEVEL: u8 = 128;

/// Default per-pixel color distance for background subtraction.
pub const DEFAULT_SUBTRACTION_K: u16 = 100;

/// Largest possible sum of three absolute channel differences.
pub const MAX_SUBTRACTION_K: u16 = 765;

pub const WHITE: u8 = 255;
pub const BLACK: u8 = 0;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ImagingError {
    #[error("image has no pixels")]
    EmptyImage,
    #[error("buffer holds {actual} values, expected {expected}")]
    BufferSize { expected: usize, actual: usize },
    #[error("value {0} is not a binary level (0 or 255)")]
    NotBinary(u8),
    #[error("histogram has a single populated level {0}")]
    DegenerateHistogram(u8),
    #[error("dimension mismatch: {left_width}x{left_height} vs {right_width}x{right_height}")]
    DimensionMismatch {
        left_width: usize,
        left_height: usize,
        right_width: usize,
        right_height: usize,
    },
    #[error("image is {width}x{height}, edge detection needs at least 3x3")]
    ImageTooSmall { width: usize, height: usize },
}

/// An RGBA color frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    width: usize,
    height: usize,
    rgba: Vec<u8>,
}

impl Frame {
    /// Wraps a packed RGBA buffer of `width * height * 4` bytes.
    pub fn from_rgba(width: usize, height: usize, rgba: Vec<u8>) -> Result<Self, ImagingError> {
        let expected = width * height * 4;
        if rgba.len() != expected {
            return Err(ImagingError::BufferSize {
                expected,
                actual: rgba.len(),
            });
        }
        Ok(Self {
            width,
            height,
            rgba,
        })
    }

    /// Builds an opaque frame from packed RGB bytes.
    pub fn from_rgb(width: usize, height: usize, rgb: &[u8]) -> Result<Self, ImagingError> {
        let expected = width * height * 3;
        if rgb.len() != expected {
            return Err(ImagingError::BufferSize {
                expected,
                actual: rgb.len(),
            });
        }
        let rgba = rgb
            .chunks_exact(3)
            .flat_map(|c| [c[0], c[1], c[2], 255])
            .collect();
        Ok(Self {
            width,
            height,
            rgba,
        })
    }

    pub fn filled(width: usize, height: usize, pixel: [u8; 4]) -> Self {
        Self {
            width,
            height,
            rgba: pixel.repeat(width * height),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixel(&self, x: usize, y: usize) -> [u8; 4] {
        let i = (y * self.width + x) * 4;
        [
            self.rgba[i],
            self.rgba[i + 1],
            self.rgba[i + 2],
            self.rgba[i + 3],
        ]
    }

    pub fn set_pixel(&mut self, x: usize, y: usize, pixel: [u8; 4]) {
        let i = (y * self.width + x) * 4;
        self.rgba[i..i + 4].copy_from_slice(&pixel);
    }

    pub fn pixels(&self) -> impl Iterator<Item = [u8; 4]> + '_ {
        self.rgba.chunks_exact(4).map(|c| [c[0], c[1], c[2], c[3]])
    }

    pub fn as_rgba(&self) -> &[u8] {
        &self.rgba
    }

    /// Packed RGB bytes with alpha dropped.
    pub fn to_rgb(&self) -> Vec<u8> {
        self.pixels().flat_map(|[r, g, b, _]| [r, g, b]).collect()
    }

    pub fn same_size(&self, other: &Frame) -> bool {
        self.width == other.width && self.height == other.height
    }
}

/// Single-channel access shared by gray and binary images.
pub trait Plane {
    fn width(&self) -> usize;
    fn height(&self) -> usize;
    fn values(&self) -> &[u8];

    fn value(&self, x: usize, y: usize) -> u8 {
        self.values()[y * self.width() + x]
    }
}

/// 8-bit intensity image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    values: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, values: Vec<u8>) -> Result<Self, ImagingError> {
        if values.len() != width * height {
            return Err(ImagingError::BufferSize {
                expected: width * height,
                actual: values.len(),
            });
        }
        Ok(Self {
            width,
            height,
            values,
        })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Self {
        Self {
            width,
            height,
            values: vec![value; width * height],
        }
    }

    pub fn into_values(self) -> Vec<u8> {
        self.values
    }
}

impl Plane for GrayImage {
    fn width(&self) -> usize {
        self.width
    }
    fn height(&self) -> usize {
        self.height
    }
    fn values(&self) -> &[u8] {
        &self.values
    }
}

/// Image whose every value is 0 (background) or 255 (foreground).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryImage {
    width: usize,
    height: usize,
    values: Vec<u8>,
}

impl BinaryImage {
    pub fn new(width: usize, height: usize, values: Vec<u8>) -> Result<Self, ImagingError> {
        if values.len() != width * height {
            return Err(ImagingError::BufferSize {
                expected: width * height,
                actual: values.len(),
            });
        }
        if let Some(&v) = values.iter().find(|&&v| v != WHITE && v != BLACK) {
            return Err(ImagingError::NotBinary(v));
        }
        Ok(Self {
            width,
            height,
            values,
        })
    }

    pub fn black(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            values: vec![BLACK; width * height],
        }
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut white: impl FnMut(usize, usize) -> bool,
    ) -> Self {
        let mut values = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                values.push(if white(x, y) { WHITE } else { BLACK });
            }
        }
        Self {
            width,
            height,
            values,
        }
    }

    pub fn is_white(&self, x: usize, y: usize) -> bool {
        self.values[y * self.width + x] == WHITE
    }

    pub fn set(&mut self, x: usize, y: usize, white: bool) {
        self.values[y * self.width + x] = if white { WHITE } else { BLACK };
    }

    pub fn count_white(&self) -> usize {
        self.values.iter().filter(|&&v| v == WHITE).count()
    }

    /// Pixel-wise AND of two masks.
    pub fn and(&self, other: &BinaryImage) -> Result<BinaryImage, ImagingError> {
        check_dims(self.width, self.height, other.width, other.height)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| a & b)
            .collect();
        Ok(BinaryImage {
            width: self.width,
            height: self.height,
            values,
        })
    }

    pub fn into_gray(self) -> GrayImage {
        GrayImage {
            width: self.width,
            height: self.height,
            values: self.values,
        }
    }
}

impl Plane for BinaryImage {
    fn width(&self) -> usize {
        self.width
    }
    fn height(&self) -> usize {
        self.height
    }
    fn values(&self) -> &[u8] {
        &self.values
    }
}

/// Intensity counts over the 256 levels of a gray image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    counts: [u64; LEVELS],
    total: u64,
}

impl Histogram {
    pub fn from_counts(counts: [u64; LEVELS]) -> Self {
        let total = counts.iter().sum();
        Self { counts, total }
    }

    pub fn counts(&self) -> &[u64; LEVELS] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Normalized frequency `n_q / n` of a level.
    pub fn probability(&self, level: u8) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        self.counts[level as usize] as f64 / self.total as f64
    }
}

/// Class weights and means for a split of the histogram at level `k`,
/// where the lower class covers `[0, k)` and the upper class `[k, 255]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassSplit {
    pub k: u16,
    pub lower_weight: f64,
    pub upper_weight: f64,
    pub lower_mean: f64,
    pub upper_mean: f64,
    pub total_mean: f64,
}

impl ClassSplit {
    pub fn between_class_variance(&self) -> f64 {
        self.lower_weight * (self.lower_mean - self.total_mean).powi(2)
            + self.upper_weight * (self.upper_mean - self.total_mean).powi(2)
    }
}

fn check_dims(lw: usize, lh: usize, rw: usize, rh: usize) -> Result<(), ImagingError> {
    if lw != rw || lh != rh {
        return Err(ImagingError::DimensionMismatch {
            left_width: lw,
            left_height: lh,
            right_width: rw,
            right_height: rh,
        });
    }
    Ok(())
}

/// Channel mean `floor((R + G + B) / 3)`; alpha is ignored.
pub fn to_grayscale(frame: &Frame) -> GrayImage {
    let values = frame
        .pixels()
        .map(|[r, g, b, _]| ((r as u16 + g as u16 + b as u16) / 3) as u8)
        .collect();
    GrayImage {
        width: frame.width,
        height: frame.height,
        values,
    }
}

pub fn histogram(img: &impl Plane) -> Result<Histogram, ImagingError> {
    if img.values().is_empty() {
        return Err(ImagingError::EmptyImage);
    }
    let mut counts = [0u64; LEVELS];
    for &v in img.values() {
        counts[v as usize] += 1;
    }
    Ok(Histogram::from_counts(counts))
}

/// Splits the histogram at `k` and returns class statistics, or `None`
/// when either class is empty.
pub fn class_split(hist: &Histogram, k: u16) -> Option<ClassSplit> {
    if hist.total == 0 || k == 0 || k as usize >= LEVELS {
        return None;
    }
    let k_idx = k as usize;
    let (mut lower_n, mut lower_sum) = (0u64, 0u64);
    for (q, &c) in hist.counts[..k_idx].iter().enumerate() {
        lower_n += c;
        lower_sum += q as u64 * c;
    }
    let total_sum: u64 = hist
        .counts
        .iter()
        .enumerate()
        .map(|(q, &c)| q as u64 * c)
        .sum();
    split_from_sums(hist.total, total_sum, k, lower_n, lower_sum)
}

fn split_from_sums(
    total: u64,
    total_sum: u64,
    k: u16,
    lower_n: u64,
    lower_sum: u64,
) -> Option<ClassSplit> {
    let upper_n = total - lower_n;
    if lower_n == 0 || upper_n == 0 {
        return None;
    }
    let n = total as f64;
    Some(ClassSplit {
        k,
        lower_weight: lower_n as f64 / n,
        upper_weight: upper_n as f64 / n,
        lower_mean: lower_sum as f64 / lower_n as f64,
        upper_mean: (total_sum - lower_sum) as f64 / upper_n as f64,
        total_mean: total_sum as f64 / n,
    })
}

/// Class statistics for every level `k` in `1..=255` that leaves both
/// classes non-empty, computed with running sums.
pub fn class_splits(hist: &Histogram) -> impl Iterator<Item = ClassSplit> + '_ {
    let total_sum: u64 = hist
        .counts
        .iter()
        .enumerate()
        .map(|(q, &c)| q as u64 * c)
        .sum();
    let (mut lower_n, mut lower_sum) = (0u64, 0u64);
    (1..LEVELS as u16).filter_map(move |k| {
        let c = hist.counts[k as usize - 1];
        lower_n += c;
        lower_sum += (k as u64 - 1) * c;
        split_from_sums(hist.total, total_sum, k, lower_n, lower_sum)
    })
}

/// Otsu's global threshold: the level `k` maximizing the between-class
/// variance, smallest `k` on ties.
pub fn otsu_threshold(hist: &Histogram) -> Result<u8, ImagingError> {
    if hist.total == 0 {
        return Err(ImagingError::EmptyImage);
    }
    let mut best: Option<(u16, f64)> = None;
    for split in class_splits(hist) {
        let variance = split.between_class_variance();
        if best.is_none_or(|(_, v)| variance > v) {
            best = Some((split.k, variance));
        }
    }
    match best {
        Some((k, _)) => Ok(k as u8),
        None => {
            let level = hist.counts.iter().position(|&c| c > 0).unwrap_or(0);
            Err(ImagingError::DegenerateHistogram(level as u8))
        }
    }
}

/// Otsu level of an image, falling back to [`FALLBACK_THRESHOLD`] for a
/// single-intensity image.
pub fn otsu_level_or_fallback(img: &impl Plane) -> Result<u8, ImagingError> {
    match otsu_threshold(&histogram(img)?) {
        Ok(k) => Ok(k),
        Err(ImagingError::DegenerateHistogram(_)) => Ok(FALLBACK_THRESHOLD),
        Err(e) => Err(e),
    }
}

/// Values at or above `k` become white.
pub fn binarize(img: &GrayImage, k: u8) -> BinaryImage {
    let values = img
        .values
        .iter()
        .map(|&v| if v >= k { WHITE } else { BLACK })
        .collect();
    BinaryImage {
        width: img.width,
        height: img.height,
        values,
    }
}

/// Marks a pixel as foreground when the summed absolute RGB difference
/// against the reference frame is at least `k`.
pub fn background_subtract(
    first: &Frame,
    current: &Frame,
    k: u16,
) -> Result<BinaryImage, ImagingError> {
    check_dims(first.width, first.height, current.width, current.height)?;
    let values = first
        .pixels()
        .zip(current.pixels())
        .map(|(a, b)| {
            let distance: u16 = (0..3).map(|c| a[c].abs_diff(b[c]) as u16).sum();
            if distance >= k {
                WHITE
            } else {
                BLACK
            }
        })
        .collect();
    Ok(BinaryImage {
        width: first.width,
        height: first.height,
        values,
    })
}

/// Horizontal and vertical Sobel responses at an interior pixel.
pub fn sobel_gradient(img: &impl Plane, x: usize, y: usize) -> (i32, i32) {
    let w = img.width();
    let v = img.values();
    let at = |dx: usize, dy: usize| v[(y + dy - 1) * w + (x + dx - 1)] as i32;
    let gx = (at(2, 0) + 2 * at(2, 1) + at(2, 2)) - (at(0, 0) + 2 * at(0, 1) + at(0, 2));
    let gy = (at(0, 2) + 2 * at(1, 2) + at(2, 2)) - (at(0, 0) + 2 * at(1, 0) + at(2, 0));
    (gx, gy)
}

fn check_sobel_size(img: &impl Plane) -> Result<(), ImagingError> {
    if img.width() < 3 || img.height() < 3 {
        return Err(ImagingError::ImageTooSmall {
            width: img.width(),
            height: img.height(),
        });
    }
    Ok(())
}

/// Gradient magnitude `floor(sqrt(gx² + gy²))` clamped to 255, with a zero
/// one-pixel border.
pub fn sobel_magnitude(img: &impl Plane) -> Result<GrayImage, ImagingError> {
    check_sobel_size(img)?;
    let (w, h) = (img.width(), img.height());
    let mut values = vec![0u8; w * h];
    for y in 1..h - 1 {
        for x in 1..w - 1 {
            let (gx, gy) = sobel_gradient(img, x, y);
            let squared = (gx * gx + gy * gy) as u32;
            values[y * w + x] = squared.isqrt().min(255) as u8;
        }
    }
    Ok(GrayImage {
        width: w,
        height: h,
        values,
    })
}

/// Binary edge map: interior pixels whose clamped gradient magnitude
/// reaches `edge_level` are white; the one-pixel border is black.
pub fn sobel(img: &impl Plane, edge_level: u8) -> Result<BinaryImage, ImagingError> {
    check_sobel_size(img)?;
    let (w, h) = (img.width(), img.height());
    // floor(sqrt(s)) >= L  <=>  s >= L², and L <= 255 makes the clamp moot.
    let level_sq = (edge_level as i32).pow(2);
    let mut values = vec![BLACK; w * h];
    for y in 1..h - 1 {
        for x in 1..w - 1 {
            let (gx, gy) = sobel_gradient(img, x, y);
            if gx * gx + gy * gy >= level_sq {
                values[y * w + x] = WHITE;
            }
        }
    }
    Ok(BinaryImage {
        width: w,
        height: h,
        values,
    })
}
