//! Iterative weighted-median smoothing of depth maps.
//!
//! The filter slides an `N x N x N` structuring element over the grid. Each
//! valid pixel inside the spatial window contributes its depth once per
//! kernel layer `k` with weight `h(i, j, k)`, so a fully valid window yields
//! a multiset of `N^3` weighted samples; the output is that multiset's lower
//! weighted median. Because the median selects one of its inputs, smoothing
//! can never invent a depth value, which is what makes it safe for range
//! data where every value is a physical measurement.
//!
//! Invalid pixels stay invalid, contribute nothing, and are carried through
//! unchanged. Passes are double-buffered: every output pixel of a pass is
//! computed from the previous pass's buffer, so running `a` then `b`
//! iterations equals running `a + b`.

use crate::types::DepthMap;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SmoothError {
    #[error("weighted median of empty input")]
    EmptyInput,
    #[error("{values} values but {weights} weights")]
    LengthMismatch { values: usize, weights: usize },
    #[error("kernel side {side} must be odd and at least 3")]
    InvalidKernelSide { side: usize },
    #[error("kernel of side {side} needs {expected} weights, got {actual}")]
    KernelLengthMismatch {
        side: usize,
        expected: usize,
        actual: usize,
    },
    #[error("kernel weight at flat index {index} is zero; weights must be positive")]
    ZeroWeight { index: usize },
    #[error("iteration count must be at least 1")]
    ZeroIterations,
    #[error("kernel side {side} exceeds map dimensions {width}x{height}")]
    KernelLargerThanMap {
        side: usize,
        width: usize,
        height: usize,
    },
}

/// Cubic weight kernel of odd side `N >= 3`, flattened row-wise: the weight
/// for spatial offset `(i, j)` and layer `k` lives at `(i * N + j) * N + k`.
#[derive(Debug, Clone)]
pub struct WeightKernel {
    side: usize,
    weights: Vec<u64>,
}

impl WeightKernel {
    pub fn new(side: usize, weights: Vec<u64>) -> Result<Self, SmoothError> {
        if side < 3 || side % 2 == 0 {
            return Err(SmoothError::InvalidKernelSide { side });
        }
        let expected = side * side * side;
        if weights.len() != expected {
            return Err(SmoothError::KernelLengthMismatch {
                side,
                expected,
                actual: weights.len(),
            });
        }
        if let Some(index) = weights.iter().position(|&w| w == 0) {
            return Err(SmoothError::ZeroWeight { index });
        }
        Ok(Self { side, weights })
    }

    /// All weights 1; with side 3 this is the classic 27-sample median.
    pub fn uniform(side: usize) -> Result<Self, SmoothError> {
        if side < 3 || side % 2 == 0 {
            return Err(SmoothError::InvalidKernelSide { side });
        }
        Ok(Self {
            side,
            weights: vec![1; side * side * side],
        })
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn weight_at(&self, i: usize, j: usize, k: usize) -> u64 {
        debug_assert!(i < self.side && j < self.side && k < self.side);
        self.weights[(i * self.side + j) * self.side + k]
    }

    /// Layer-summed weight per spatial offset. All `N` samples a window
    /// pixel contributes share that pixel's depth, so their weights merge
    /// into one sample of weight `sum_k h(i, j, k)` without changing the
    /// median.
    fn spatial_weights(&self) -> Vec<u64> {
        let n = self.side;
        (0..n * n)
            .map(|ij| (0..n).map(|k| self.weights[ij * n + k]).sum())
            .collect()
    }
}

/// What the window does when it overhangs the grid edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    /// Out-of-range coordinates clamp to the nearest edge pixel, so edge
    /// pixels are replicated into the window.
    Clamp,
    /// Out-of-range window cells contribute nothing.
    Skip,
}

impl std::str::FromStr for Boundary {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "clamp" => Ok(Boundary::Clamp),
            "skip" => Ok(Boundary::Skip),
            other => Err(format!("unknown boundary mode {other:?}, expected clamp or skip")),
        }
    }
}

impl std::fmt::Display for Boundary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Boundary::Clamp => "clamp",
            Boundary::Skip => "skip",
        })
    }
}

#[derive(Debug, Clone)]
pub struct SmoothingConfig {
    kernel: WeightKernel,
    iterations: usize,
    boundary: Boundary,
}

impl SmoothingConfig {
    pub fn new(
        kernel: WeightKernel,
        iterations: usize,
        boundary: Boundary,
    ) -> Result<Self, SmoothError> {
        if iterations == 0 {
            return Err(SmoothError::ZeroIterations);
        }
        Ok(Self {
            kernel,
            iterations,
            boundary,
        })
    }

    /// Uniform kernel of the given side, clamped boundary.
    pub fn uniform(side: usize, iterations: usize) -> Result<Self, SmoothError> {
        Self::new(WeightKernel::uniform(side)?, iterations, Boundary::Clamp)
    }

    pub fn with_boundary(mut self, boundary: Boundary) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn kernel(&self) -> &WeightKernel {
        &self.kernel
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }
}

/// 3x3x3 uniform kernel, 100 iterations, clamped boundary.
impl Default for SmoothingConfig {
    fn default() -> Self {
        Self::uniform(3, 100).expect("default config is valid")
    }
}

/// Lower weighted median: the smallest value whose cumulative weight, over
/// values sorted ascending, reaches at least half the total weight. With all
/// weights 1 over 27 samples this is the sorted 14th element.
pub fn weighted_median(values: &[f64], weights: &[u64]) -> Result<f64, SmoothError> {
    if values.len() != weights.len() {
        return Err(SmoothError::LengthMismatch {
            values: values.len(),
            weights: weights.len(),
        });
    }
    if values.is_empty() {
        return Err(SmoothError::EmptyInput);
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    Ok(lower_weighted_median(&order, values, weights))
}

/// Core selection on a pre-sorted index order; `2 * cum >= total` is the
/// integer form of "cumulative weight reaches half the total".
fn lower_weighted_median(order: &[usize], values: &[f64], weights: &[u64]) -> f64 {
    let total: u64 = order.iter().map(|&i| weights[i]).sum();
    let mut cum = 0u64;
    for &i in order {
        cum += weights[i];
        if 2 * cum >= total {
            return values[i];
        }
    }
    unreachable!("cumulative weight always reaches the total");
}

/// Runs `config.iterations()` weighted-median passes over the map.
///
/// Per pass, each valid pixel gathers the valid pixels of its spatial
/// window (boundary handling per [`Boundary`]) with their layer-summed
/// kernel weights and takes the lower weighted median. The window always
/// contains the pixel itself, so the gather is never empty. Validity is
/// returned untouched.
pub fn smooth_depth_map(map: &DepthMap, config: &SmoothingConfig) -> Result<DepthMap, SmoothError> {
    let side = config.kernel.side();
    let (width, height) = (map.width(), map.height());
    if side > width || side > height {
        return Err(SmoothError::KernelLargerThanMap {
            side,
            width,
            height,
        });
    }
    let spatial = config.kernel.spatial_weights();
    let reach = (side / 2) as isize;
    let valid = map.validity();
    let boundary = config.boundary;

    let mut current = map.depths().to_vec();
    let mut next = vec![0.0; current.len()];
    for _ in 0..config.iterations {
        let src = &current;
        next.par_chunks_mut(width).enumerate().for_each(|(row, out)| {
            let mut vals: Vec<f64> = Vec::with_capacity(side * side);
            let mut wts: Vec<u64> = Vec::with_capacity(side * side);
            let mut order: Vec<usize> = Vec::with_capacity(side * side);
            for col in 0..width {
                let center = row * width + col;
                if !valid[center] {
                    out[col] = src[center];
                    continue;
                }
                vals.clear();
                wts.clear();
                for di in -reach..=reach {
                    for dj in -reach..=reach {
                        let (r, c) = match boundary {
                            Boundary::Clamp => (
                                (row as isize + di).clamp(0, height as isize - 1),
                                (col as isize + dj).clamp(0, width as isize - 1),
                            ),
                            Boundary::Skip => {
                                let r = row as isize + di;
                                let c = col as isize + dj;
                                if r < 0 || r >= height as isize || c < 0 || c >= width as isize {
                                    continue;
                                }
                                (r, c)
                            }
                        };
                        let idx = r as usize * width + c as usize;
                        if valid[idx] {
                            vals.push(src[idx]);
                            wts.push(
                                spatial[(di + reach) as usize * side + (dj + reach) as usize],
                            );
                        }
                    }
                }
                order.clear();
                order.extend(0..vals.len());
                order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
                out[col] = lower_weighted_median(&order, &vals, &wts);
            }
        });
        std::mem::swap(&mut current, &mut next);
    }
    Ok(DepthMap::new(width, height, current, valid.to_vec()).expect("smoothing preserves grid invariants"))
}
