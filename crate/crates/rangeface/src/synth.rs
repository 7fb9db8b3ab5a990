//! Synthetic range-face generator and noise injector: elliptical head dome
//! with a Gaussian nose bump, optional rigid posing with scanner-style
//! resampling, and seeded spike/Gaussian depth noise. Ground truth is exact
//! by construction, which is what makes the A/B benchmark meaningful.

use crate::align::RotationMatrix;
use crate::types::{CoreError, DepthMap, Landmark, Point3, RotationSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("face grid must be at least 3x3 pixels, got {width}x{height}")]
    GridTooSmall { width: usize, height: usize },
    #[error("nose_height must be positive, got {0}")]
    NonPositiveNoseHeight(f64),
    #[error("nose_sigma must be at least 1 pixel, got {0}")]
    NoseSigmaTooSmall(f64),
    #[error("base_depth {base} must exceed background_depth {background}")]
    BackgroundNotBelowBase { base: f64, background: f64 },
    #[error("nose_center ({row}, {col}) must be interior to a {width}x{height} grid")]
    NoseCenterNotInterior {
        row: usize,
        col: usize,
        width: usize,
        height: usize,
    },
    #[error("face parameters must all be finite")]
    NonFiniteParams,
    #[error(
        "nose tip at ({row}, {col}) is not the strict depth maximum of the \
         frontal face; raise nose_height or move the nose toward the face center"
    )]
    NoseNotProminent { row: usize, col: usize },
    #[error("posed nose tip landed outside the grid at (x={x:.2}, y={y:.2})")]
    TipOutsideGrid { x: f64, y: f64 },
    #[error("spike_fraction must be within [0, 0.2], got {0}")]
    SpikeFractionOutOfRange(f64),
    #[error("gaussian_sigma must be finite and nonnegative, got {0}")]
    InvalidGaussianSigma(f64),
    #[error("spike_amplitude must be finite, got {0}")]
    NonFiniteSpikeAmplitude(f64),
    #[error(transparent)]
    Core(#[from] CoreError),
}

/// Shape of a synthetic face: an elliptical dome (the head) on a flat
/// background plane, with a Gaussian bump (the nose) riding on the dome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaceParams {
    pub width: usize,
    pub height: usize,
    /// Nose-tip pixel as (row, col); must be interior to the grid.
    pub nose_center: (usize, usize),
    /// Peak height of the nose bump above the local dome surface.
    pub nose_height: f64,
    /// Gaussian radius of the nose bump, in pixels.
    pub nose_sigma: f64,
    /// Depth of the face boundary (larger depth = closer to the camera).
    pub base_depth: f64,
    /// Extra depth of the dome at the face center relative to its boundary.
    pub dome_amplitude: f64,
    /// Depth of everything outside the elliptical face region.
    pub background_depth: f64,
}

impl Default for FaceParams {
    fn default() -> Self {
        Self {
            width: 64,
            height: 64,
            nose_center: (32, 32),
            nose_height: 20.0,
            nose_sigma: 2.5,
            base_depth: 100.0,
            dome_amplitude: 30.0,
            background_depth: 10.0,
        }
    }
}

impl FaceParams {
    pub fn validate(&self) -> Result<(), SynthError> {
        if self.width < 3 || self.height < 3 {
            return Err(SynthError::GridTooSmall {
                width: self.width,
                height: self.height,
            });
        }
        for v in [
            self.nose_height,
            self.nose_sigma,
            self.base_depth,
            self.dome_amplitude,
            self.background_depth,
        ] {
            if !v.is_finite() {
                return Err(SynthError::NonFiniteParams);
            }
        }
        if self.nose_height <= 0.0 {
            return Err(SynthError::NonPositiveNoseHeight(self.nose_height));
        }
        if self.nose_sigma < 1.0 {
            return Err(SynthError::NoseSigmaTooSmall(self.nose_sigma));
        }
        if self.base_depth <= self.background_depth {
            return Err(SynthError::BackgroundNotBelowBase {
                base: self.base_depth,
                background: self.background_depth,
            });
        }
        let (row, col) = self.nose_center;
        if row == 0 || col == 0 || row + 1 >= self.height || col + 1 >= self.width {
            return Err(SynthError::NoseCenterNotInterior {
                row,
                col,
                width: self.width,
                height: self.height,
            });
        }
        Ok(())
    }
}

/// Seeded depth corruption: Gaussian jitter on every valid pixel, then a
/// fixed fraction of valid pixels displaced by `spike_amplitude`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseParams {
    /// Fraction of valid pixels to spike, in [0, 0.2].
    pub spike_fraction: f64,
    /// Depth added to each spiked pixel (may be negative for pits).
    pub spike_amplitude: f64,
    /// Standard deviation of the per-pixel Gaussian jitter; 0 disables it.
    pub gaussian_sigma: f64,
    pub seed: u64,
}

impl Default for NoiseParams {
    fn default() -> Self {
        Self {
            spike_fraction: 0.0,
            spike_amplitude: 0.0,
            gaussian_sigma: 0.0,
            seed: 0,
        }
    }
}

impl NoiseParams {
    pub fn validate(&self) -> Result<(), SynthError> {
        if !self.spike_fraction.is_finite() || !(0.0..=0.2).contains(&self.spike_fraction) {
            return Err(SynthError::SpikeFractionOutOfRange(self.spike_fraction));
        }
        if !self.gaussian_sigma.is_finite() || self.gaussian_sigma < 0.0 {
            return Err(SynthError::InvalidGaussianSigma(self.gaussian_sigma));
        }
        if !self.spike_amplitude.is_finite() {
            return Err(SynthError::NonFiniteSpikeAmplitude(self.spike_amplitude));
        }
        Ok(())
    }
}

/// Squared elliptical coordinate of a grid position: <= 1 inside the head
/// region (semi-axes 0.40*width and 0.46*height about the grid center).
fn ellipse_e2(p: &FaceParams, y: f64, x: f64) -> f64 {
    let cx = (p.width as f64 - 1.0) / 2.0;
    let cy = (p.height as f64 - 1.0) / 2.0;
    let ex = (x - cx) / (0.40 * p.width as f64);
    let ey = (y - cy) / (0.46 * p.height as f64);
    ex * ex + ey * ey
}

/// Continuous head surface inside the elliptical face region: dome plus nose
/// bump. Only meaningful where [`ellipse_e2`] <= 1.
fn head_depth(p: &FaceParams, e2: f64, y: f64, x: f64) -> f64 {
    let (nr, nc) = p.nose_center;
    let dr = y - nr as f64;
    let dc = x - nc as f64;
    let bump =
        p.nose_height * (-(dr * dr + dc * dc) / (2.0 * p.nose_sigma * p.nose_sigma)).exp();
    p.base_depth + p.dome_amplitude * (1.0 - e2) + bump
}

/// Frontal scene depth at a grid position: head surface inside the ellipse,
/// backdrop plane outside.
fn surface_depth(p: &FaceParams, y: f64, x: f64) -> f64 {
    let e2 = ellipse_e2(p, y, x);
    if e2 > 1.0 {
        p.background_depth
    } else {
        head_depth(p, e2, y, x)
    }
}

/// Sub-pixel sampling factor for posed resampling. Each source pixel is
/// sampled on a 5x5 sub-grid so that rotation cannot punch lattice-aliasing
/// holes through the face; only genuine stretch and self-occlusion leave
/// cells unhit.
const SUPERSAMPLE: usize = 5;

/// Generates a synthetic range face and its exact ground-truth nose tip.
///
/// Without a pose the scene is evaluated at pixel centers and every pixel is
/// valid. With a pose, the head (the elliptical region) rotates rigidly
/// about the nose-tip 3D point while the backdrop plane stays put — a head
/// turning in front of a wall. The rotated head surface is super-sampled
/// and splattered back onto the grid, each cell keeping the largest (closest
/// to camera) depth that lands in it; cells the head misses show the
/// backdrop. Cells inside the head's silhouette that receive no sample are
/// scanner shadow — the head blocks the wall but returned no depth — and
/// become invalid, which is what a range scanner produces for a turned
/// head. Because the tip is the pivot, the ground-truth pixel stays at
/// `nose_center`; the out-of-grid guard protects any future change of
/// pivot. The landmark's `score` carries the tip depth (window sums are a
/// detector artifact, not ground truth). Deterministic: no randomness.
pub fn generate_face(
    params: &FaceParams,
    pose: Option<&RotationSpec>,
) -> Result<(DepthMap, Landmark), SynthError> {
    params.validate()?;
    let (w, h) = (params.width, params.height);
    let (nr, nc) = params.nose_center;
    let tip_depth = surface_depth(params, nr as f64, nc as f64);

    let frontal = DepthMap::from_fn(w, h, |row, col| {
        Some(surface_depth(params, row as f64, col as f64))
    })?;
    for row in 0..h {
        for col in 0..w {
            if (row, col) != (nr, nc) && frontal.depth_at(row, col) >= tip_depth {
                return Err(SynthError::NoseNotProminent { row: nr, col: nc });
            }
        }
    }

    let tip = Point3::new(nc as f64, nr as f64, tip_depth);
    let truth = |point: Point3, row: usize, col: usize| Landmark {
        row,
        col,
        point,
        score: point.z,
    };

    let spec = match pose {
        None => return Ok((frontal, truth(tip, nr, nc))),
        Some(spec) => spec,
    };

    let rot = RotationMatrix::from_spec(spec);
    let posed_tip = rot.apply(tip.sub(tip)).add(tip);
    let (tip_col, tip_row) = (posed_tip.x.round(), posed_tip.y.round());
    if tip_row < 0.0 || tip_col < 0.0 || tip_row >= h as f64 || tip_col >= w as f64 {
        return Err(SynthError::TipOutsideGrid {
            x: posed_tip.x,
            y: posed_tip.y,
        });
    }

    // Splat the rotated head surface; `hit` holds the closest head depth
    // that landed in each cell.
    let mut hit: Vec<Option<f64>> = vec![None; w * h];
    let half = (SUPERSAMPLE / 2) as f64;
    for row in 0..h {
        for col in 0..w {
            for i in 0..SUPERSAMPLE {
                for j in 0..SUPERSAMPLE {
                    let ys = row as f64 + (i as f64 - half) / SUPERSAMPLE as f64;
                    let xs = col as f64 + (j as f64 - half) / SUPERSAMPLE as f64;
                    let e2 = ellipse_e2(params, ys, xs);
                    if e2 > 1.0 {
                        continue;
                    }
                    let z = head_depth(params, e2, ys, xs);
                    let q = rot.apply(Point3::new(xs, ys, z).sub(tip)).add(tip);
                    let (tc, tr) = (q.x.round(), q.y.round());
                    if tr < 0.0 || tc < 0.0 || tr >= h as f64 || tc >= w as f64 {
                        continue;
                    }
                    let cell = &mut hit[tr as usize * w + tc as usize];
                    match cell {
                        Some(b) if q.z <= *b => {}
                        _ => *cell = Some(q.z),
                    }
                }
            }
        }
    }

    // Silhouette extents per row and per column; unhit cells enclosed both
    // ways sit behind the head and are scanner shadow.
    let mut row_span = vec![(usize::MAX, 0usize); h];
    let mut col_span = vec![(usize::MAX, 0usize); w];
    for row in 0..h {
        for col in 0..w {
            if hit[row * w + col].is_some() {
                let rs = &mut row_span[row];
                rs.0 = rs.0.min(col);
                rs.1 = rs.1.max(col);
                let cs = &mut col_span[col];
                cs.0 = cs.0.min(row);
                cs.1 = cs.1.max(row);
            }
        }
    }

    let posed = DepthMap::from_fn(w, h, |row, col| match hit[row * w + col] {
        // The wall is visible through any head sample that ended up behind
        // it (never with sane parameters, but max keeps occlusion honest).
        Some(z) => Some(z.max(params.background_depth)),
        None => {
            let (left, right) = row_span[row];
            let (top, bottom) = col_span[col];
            let enclosed = left < col && col < right && top < row && row < bottom;
            (!enclosed).then_some(params.background_depth)
        }
    })?;
    Ok((posed, truth(posed_tip, tip_row as usize, tip_col as usize)))
}

/// Applies seeded depth noise: zero-mean Gaussian jitter on every valid
/// pixel (skipped when `gaussian_sigma` is 0), then exactly
/// `round(spike_fraction * valid_count)` uniformly chosen valid pixels get
/// `spike_amplitude` added. The validity mask and invalid-pixel payloads are
/// untouched. Deterministic per seed.
pub fn inject_noise(map: &DepthMap, noise: &NoiseParams) -> Result<DepthMap, SynthError> {
    noise.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
    let mut depths = map.depths().to_vec();
    let valid_indices: Vec<usize> = (0..depths.len()).filter(|&i| map.validity()[i]).collect();

    if noise.gaussian_sigma > 0.0 {
        let normal = Normal::new(0.0, noise.gaussian_sigma)
            .expect("validated sigma is finite and positive");
        for &i in &valid_indices {
            depths[i] += normal.sample(&mut rng);
        }
    }

    let n_spikes = (noise.spike_fraction * valid_indices.len() as f64).round() as usize;
    if n_spikes > 0 {
        for pick in rand::seq::index::sample(&mut rng, valid_indices.len(), n_spikes) {
            depths[valid_indices[pick]] += noise.spike_amplitude;
        }
    }

    Ok(DepthMap::new(
        map.width(),
        map.height(),
        depths,
        map.validity().to_vec(),
    )?)
}
