//! Automatic foreground/background separation for depth maps.
//!
//! Valid depths are quantized into a 256-bin histogram, the threshold that
//! maximizes Otsu's between-class variance is selected, and pixels whose bin
//! lies strictly above the threshold become foreground. On a typical range
//! scan the subject is closer to the sensor than the backdrop, so the
//! foreground class is the face.

use crate::types::{BinaryMask, DepthMap};
use thiserror::Error;

pub const BIN_COUNT: usize = 256;

#[derive(Debug, Error)]
pub enum ThresholdError {
    #[error("histogram requires at least one valid pixel")]
    NoValidPixels,
    #[error("histogram has no counts")]
    EmptyHistogram,
    #[error("invalid histogram depth range [{min}, {max}]")]
    InvalidRange { min: f64, max: f64 },
    #[error(
        "depth {depth} at (row {row}, col {col}) lies outside the histogram range [{min}, {max}]; \
         the histogram was not built from this map"
    )]
    HistogramMismatch {
        row: usize,
        col: usize,
        depth: f64,
        min: f64,
        max: f64,
    },
}

/// 256-bin histogram of valid depths, remembering the depth range it was
/// built over so the same quantization can be replayed during binarization.
#[derive(Debug, Clone)]
pub struct Histogram {
    bins: [u64; BIN_COUNT],
    min_depth: f64,
    max_depth: f64,
}

impl Histogram {
    /// Builds a histogram from explicit counts; the range must be finite and
    /// ordered, and at least one bin must be occupied.
    pub fn from_bins(
        bins: [u64; BIN_COUNT],
        min_depth: f64,
        max_depth: f64,
    ) -> Result<Self, ThresholdError> {
        if !min_depth.is_finite() || !max_depth.is_finite() || min_depth > max_depth {
            return Err(ThresholdError::InvalidRange {
                min: min_depth,
                max: max_depth,
            });
        }
        if bins.iter().all(|&b| b == 0) {
            return Err(ThresholdError::EmptyHistogram);
        }
        Ok(Self {
            bins,
            min_depth,
            max_depth,
        })
    }

    pub fn bins(&self) -> &[u64; BIN_COUNT] {
        &self.bins
    }

    pub fn min_depth(&self) -> f64 {
        self.min_depth
    }

    pub fn max_depth(&self) -> f64 {
        self.max_depth
    }

    pub fn total(&self) -> u64 {
        self.bins.iter().sum()
    }

    /// Bin index of a depth under this histogram's linear quantization:
    /// `floor(255 * (d - min) / (max - min))`, clamped into `0..=255`.
    /// A degenerate range (`min == max`) puts everything in bin 0.
    pub fn bin_of(&self, depth: f64) -> u8 {
        if self.max_depth == self.min_depth {
            return 0;
        }
        let scaled =
            (255.0 * (depth - self.min_depth) / (self.max_depth - self.min_depth)).floor();
        scaled.clamp(0.0, 255.0) as u8
    }
}

/// Histograms the valid depths of a map. Errors when the map has no valid
/// pixels, since a threshold over nothing is meaningless.
pub fn build_histogram(map: &DepthMap) -> Result<Histogram, ThresholdError> {
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut any = false;
    for (&d, &v) in map.depths().iter().zip(map.validity()) {
        if v {
            any = true;
            min = min.min(d);
            max = max.max(d);
        }
    }
    if !any {
        return Err(ThresholdError::NoValidPixels);
    }
    let mut hist = Histogram {
        bins: [0; BIN_COUNT],
        min_depth: min,
        max_depth: max,
    };
    for (&d, &v) in map.depths().iter().zip(map.validity()) {
        if v {
            hist.bins[hist.bin_of(d) as usize] += 1;
        }
    }
    Ok(hist)
}

/// Otsu's threshold: the bin index `t` maximizing the between-class variance
/// `w0 * w1 * (mu0 - mu1)^2`, where class 0 holds bins `0..=t` and class 1
/// holds bins `t+1..=255`. Partitions with an empty class are skipped and
/// ties resolve to the smallest `t`. When all counts sit in a single bin no
/// partition is valid and that bin's index is returned.
pub fn otsu_threshold(hist: &Histogram) -> u8 {
    let bins = &hist.bins;
    let total: u64 = bins.iter().sum();
    let total_weighted: f64 = bins
        .iter()
        .enumerate()
        .map(|(b, &n)| b as f64 * n as f64)
        .sum();

    let mut best_t: Option<u8> = None;
    let mut best_score = f64::NEG_INFINITY;
    let mut count0: u64 = 0;
    let mut sum0: f64 = 0.0;
    for t in 0..BIN_COUNT {
        count0 += bins[t];
        sum0 += t as f64 * bins[t] as f64;
        let count1 = total - count0;
        if count0 == 0 || count1 == 0 {
            continue;
        }
        let mu0 = sum0 / count0 as f64;
        let mu1 = (total_weighted - sum0) / count1 as f64;
        let score = count0 as f64 * count1 as f64 * (mu0 - mu1) * (mu0 - mu1);
        if score > best_score {
            best_score = score;
            best_t = Some(t as u8);
        }
    }
    match best_t {
        Some(t) => t,
        // All mass in one bin; the constructor guarantees it exists.
        None => bins.iter().position(|&n| n > 0).unwrap() as u8,
    }
}

/// Marks each valid pixel whose bin index is strictly greater than `t` as
/// foreground; invalid pixels are always background. Errors if some valid
/// depth falls outside the histogram's range, which means the histogram was
/// built from a different map.
pub fn binarize(map: &DepthMap, t: u8, hist: &Histogram) -> Result<BinaryMask, ThresholdError> {
    let width = map.width();
    for (i, (&d, &v)) in map.depths().iter().zip(map.validity()).enumerate() {
        if v && (d < hist.min_depth || d > hist.max_depth) {
            return Err(ThresholdError::HistogramMismatch {
                row: i / width,
                col: i % width,
                depth: d,
                min: hist.min_depth,
                max: hist.max_depth,
            });
        }
    }
    let bits = map
        .depths()
        .iter()
        .zip(map.validity())
        .map(|(&d, &v)| v && hist.bin_of(d) > t)
        .collect();
    Ok(BinaryMask::new(map.width(), map.height(), bits).expect("mask mirrors map dimensions"))
}
