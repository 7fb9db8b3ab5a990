//! Grid-based range image types shared by every pipeline stage.
//!
//! A [`DepthMap`] stores one depth sample per pixel of a regular grid plus a
//! validity flag: range scanners leave holes, and every stage must be able to
//! tell a hole from a measurement. The convention throughout the crate is
//! that a larger depth value is closer to the sensor, so the most protruding
//! point of a face carries the numerically largest depth.
//!
//! Pixel `(row, col)` maps to the 3D point `(x = col, y = row, z = depth)`.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("grid dimensions {width}x{height} are below the 3x3 minimum")]
    DimensionsTooSmall { width: usize, height: usize },
    #[error("buffer holds {actual} entries, expected {expected} for a {width}x{height} grid")]
    BufferSizeMismatch {
        width: usize,
        height: usize,
        expected: usize,
        actual: usize,
    },
    #[error("non-finite depth {value} at valid pixel (row {row}, col {col})")]
    NonFiniteDepth { row: usize, col: usize, value: f64 },
    #[error("dimension mismatch: {left_width}x{left_height} vs {right_width}x{right_height}")]
    DimensionMismatch {
        left_width: usize,
        left_height: usize,
        right_width: usize,
        right_height: usize,
    },
}

/// Rectangular range image. Row-major storage, index `row * width + col`.
///
/// Depth values at valid pixels are always finite; the depth stored at an
/// invalid pixel is carried along as payload but has no meaning, and
/// equality ignores it.
#[derive(Debug, Clone)]
pub struct DepthMap {
    width: usize,
    height: usize,
    depth: Vec<f64>,
    valid: Vec<bool>,
}

impl DepthMap {
    /// Builds a map from raw buffers, checking the grid invariants:
    /// dimensions at least 3x3, buffer lengths matching `width * height`,
    /// and a finite depth at every valid pixel.
    pub fn new(
        width: usize,
        height: usize,
        depth: Vec<f64>,
        valid: Vec<bool>,
    ) -> Result<Self, CoreError> {
        if width < 3 || height < 3 {
            return Err(CoreError::DimensionsTooSmall { width, height });
        }
        let expected = width * height;
        for actual in [depth.len(), valid.len()] {
            if actual != expected {
                return Err(CoreError::BufferSizeMismatch {
                    width,
                    height,
                    expected,
                    actual,
                });
            }
        }
        for (i, (&d, &v)) in depth.iter().zip(&valid).enumerate() {
            if v && !d.is_finite() {
                return Err(CoreError::NonFiniteDepth {
                    row: i / width,
                    col: i % width,
                    value: d,
                });
            }
        }
        Ok(Self {
            width,
            height,
            depth,
            valid,
        })
    }

    /// All-valid map holding the same depth everywhere.
    pub fn constant(width: usize, height: usize, depth: f64) -> Result<Self, CoreError> {
        let n = width * height;
        Self::new(width, height, vec![depth; n], vec![true; n])
    }

    /// Builds a map by evaluating a function at every pixel; `None` marks
    /// the pixel invalid.
    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> Option<f64>,
    ) -> Result<Self, CoreError> {
        let mut depth = Vec::with_capacity(width * height);
        let mut valid = Vec::with_capacity(width * height);
        for row in 0..height {
            for col in 0..width {
                match f(row, col) {
                    Some(d) => {
                        depth.push(d);
                        valid.push(true);
                    }
                    None => {
                        depth.push(0.0);
                        valid.push(false);
                    }
                }
            }
        }
        Self::new(width, height, depth, valid)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn idx(&self, row: usize, col: usize) -> usize {
        debug_assert!(row < self.height && col < self.width);
        row * self.width + col
    }

    pub fn depth_at(&self, row: usize, col: usize) -> f64 {
        self.depth[self.idx(row, col)]
    }

    pub fn is_valid(&self, row: usize, col: usize) -> bool {
        self.valid[self.idx(row, col)]
    }

    pub fn depths(&self) -> &[f64] {
        &self.depth
    }

    pub fn validity(&self) -> &[bool] {
        &self.valid
    }

    pub fn valid_count(&self) -> usize {
        self.valid.iter().filter(|&&v| v).count()
    }

    /// Converts valid pixels to 3D points in row-major scan order using the
    /// crate convention `(x = col, y = row, z = depth)`. Invalid pixels are
    /// skipped, so the cloud length equals [`DepthMap::valid_count`].
    pub fn to_point_cloud(&self) -> Vec<Point3> {
        let mut cloud = Vec::with_capacity(self.valid_count());
        for row in 0..self.height {
            for col in 0..self.width {
                if self.valid[row * self.width + col] {
                    cloud.push(Point3::new(
                        col as f64,
                        row as f64,
                        self.depth[row * self.width + col],
                    ));
                }
            }
        }
        cloud
    }

    /// Intersects validity with a mask of the same dimensions. Depth values
    /// are never changed, so masking is idempotent and order-independent.
    pub fn apply_mask(&self, mask: &BinaryMask) -> Result<DepthMap, CoreError> {
        if mask.width != self.width || mask.height != self.height {
            return Err(CoreError::DimensionMismatch {
                left_width: self.width,
                left_height: self.height,
                right_width: mask.width,
                right_height: mask.height,
            });
        }
        let valid = self
            .valid
            .iter()
            .zip(&mask.bits)
            .map(|(&v, &b)| v && b)
            .collect();
        Ok(DepthMap {
            width: self.width,
            height: self.height,
            depth: self.depth.clone(),
            valid,
        })
    }
}

/// Two maps are equal when they have the same dimensions, the same validity
/// mask, and the same depth at every valid pixel. Depths stored at invalid
/// pixels are payload, not data, and do not participate.
impl PartialEq for DepthMap {
    fn eq(&self, other: &Self) -> bool {
        self.width == other.width
            && self.height == other.height
            && self.valid == other.valid
            && self
                .depth
                .iter()
                .zip(&other.depth)
                .zip(&self.valid)
                .all(|((&a, &b), &v)| !v || a == b)
    }
}

/// Per-pixel foreground flag produced by thresholding, same layout as
/// [`DepthMap`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize, bits: Vec<bool>) -> Result<Self, CoreError> {
        if width < 3 || height < 3 {
            return Err(CoreError::DimensionsTooSmall { width, height });
        }
        let expected = width * height;
        if bits.len() != expected {
            return Err(CoreError::BufferSizeMismatch {
                width,
                height,
                expected,
                actual: bits.len(),
            });
        }
        Ok(Self {
            width,
            height,
            bits,
        })
    }

    /// Uniform mask, every pixel set to `value`.
    pub fn filled(width: usize, height: usize, value: bool) -> Result<Self, CoreError> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn is_set(&self, row: usize, col: usize) -> bool {
        debug_assert!(row < self.height && col < self.width);
        self.bits[row * self.width + col]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn count_set(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

/// 3D point; doubles as a vector where the context treats it as one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn add(self, o: Point3) -> Point3 {
        Point3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }

    pub fn sub(self, o: Point3) -> Point3 {
        Point3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }

    pub fn scale(self, s: f64) -> Point3 {
        Point3::new(self.x * s, self.y * s, self.z * s)
    }

    pub fn dot(self, o: Point3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Point3) -> Point3 {
        Point3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn distance(self, o: Point3) -> f64 {
        self.sub(o).norm()
    }
}

/// Coordinate axis of a rotation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl std::fmt::Display for Axis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        })
    }
}

impl std::str::FromStr for Axis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "x" => Ok(Axis::X),
            "y" => Ok(Axis::Y),
            "z" => Ok(Axis::Z),
            other => Err(format!("unknown axis {other:?}, expected x, y or z")),
        }
    }
}

/// Single-axis rotation by `theta` radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationSpec {
    pub axis: Axis,
    pub theta: f64,
}

impl RotationSpec {
    pub fn new(axis: Axis, theta: f64) -> Self {
        Self { axis, theta }
    }

    pub fn from_degrees(axis: Axis, degrees: f64) -> Self {
        Self::new(axis, degrees.to_radians())
    }
}

/// Located nose tip: the winning pixel, its 3D position under the crate
/// coordinate convention, and the 3x3 depth sum that won the search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Landmark {
    pub row: usize,
    pub col: usize,
    pub point: Point3,
    pub score: f64,
}

impl Landmark {
    pub fn new(row: usize, col: usize, point: Point3, score: f64) -> Self {
        Self {
            row,
            col,
            point,
            score,
        }
    }
}
