//! Rigid pose normalization: axis rotations of the face cloud about the
//! detected nose tip, and pose estimation by sweeping candidate angles for
//! the one that maximizes bilateral symmetry.

use crate::types::{Axis, Point3, RotationSpec};
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AlignError {
    #[error("symmetry sweep has no candidate angles")]
    EmptySweep,
    #[error("symmetry estimation needs at least 10 points, got {count}")]
    TooFewPoints { count: usize },
}

/// Right-handed rotation about a coordinate axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationMatrix {
    m: [[f64; 3]; 3],
}

impl RotationMatrix {
    pub fn from_spec(spec: &RotationSpec) -> Self {
        let (s, c) = spec.theta.sin_cos();
        let m = match spec.axis {
            Axis::X => [[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]],
            Axis::Y => [[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]],
            Axis::Z => [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]],
        };
        Self { m }
    }

    pub fn entries(&self) -> &[[f64; 3]; 3] {
        &self.m
    }

    pub fn apply(&self, p: Point3) -> Point3 {
        let m = &self.m;
        Point3::new(
            m[0][0] * p.x + m[0][1] * p.y + m[0][2] * p.z,
            m[1][0] * p.x + m[1][1] * p.y + m[1][2] * p.z,
            m[2][0] * p.x + m[2][1] * p.y + m[2][2] * p.z,
        )
    }
}

/// Rotates every point about `pivot`: `R * (p - pivot) + pivot`, preserving
/// order. Rotating about the nose tip keeps the face where it is instead of
/// swinging it around the grid origin.
pub fn align_cloud(points: &[Point3], pivot: Point3, spec: &RotationSpec) -> Vec<Point3> {
    let rot = RotationMatrix::from_spec(spec);
    points
        .iter()
        .map(|&p| rot.apply(p.sub(pivot)).add(pivot))
        .collect()
}

fn mirror(p: Point3, pivot: Point3, axis: Axis) -> Point3 {
    match axis {
        // Yaw and roll move points across the face's vertical symmetry
        // plane, so they are scored against x = pivot.x.
        Axis::Y | Axis::Z => Point3::new(2.0 * pivot.x - p.x, p.y, p.z),
        // A rotation about X only moves points within planes of constant x
        // and therefore commutes with the x-mirror: the x-mirror score of
        // any cloud is identical at every X sweep angle and can never
        // discriminate pitch. Pitch is scored against y = pivot.y instead.
        Axis::X => Point3::new(p.x, 2.0 * pivot.y - p.y, p.z),
    }
}

/// Negative mean nearest-neighbor distance between the cloud and its mirror
/// image; 0 means perfectly symmetric.
fn symmetry_score(cloud: &[Point3], pivot: Point3, axis: Axis) -> f64 {
    let mirrored: Vec<Point3> = cloud.iter().map(|&p| mirror(p, pivot, axis)).collect();
    let total: f64 = cloud
        .iter()
        .map(|&p| {
            mirrored
                .iter()
                .map(|&m| p.distance(m))
                .fold(f64::INFINITY, f64::min)
        })
        .sum();
    -(total / cloud.len() as f64)
}

/// Sweeps the candidate angles, rotating the cloud about `pivot` and scoring
/// bilateral symmetry for each; returns the best-scoring angle as a
/// [`RotationSpec`]. Ties resolve to the smallest angle. Scoring is
/// parallel over candidates; the argmax reduction is sequential, so the
/// result is schedule-independent.
pub fn estimate_pose_by_symmetry(
    points: &[Point3],
    pivot: Point3,
    axis: Axis,
    sweep: &[f64],
) -> Result<RotationSpec, AlignError> {
    if sweep.is_empty() {
        return Err(AlignError::EmptySweep);
    }
    if points.len() < 10 {
        return Err(AlignError::TooFewPoints {
            count: points.len(),
        });
    }
    let scored: Vec<(f64, f64)> = sweep
        .par_iter()
        .map(|&theta| {
            let rotated = align_cloud(points, pivot, &RotationSpec::new(axis, theta));
            (theta, symmetry_score(&rotated, pivot, axis))
        })
        .collect();
    let mut best = scored[0];
    for &(theta, score) in &scored[1..] {
        if score > best.1 || (score == best.1 && theta < best.0) {
            best = (theta, score);
        }
    }
    Ok(RotationSpec::new(axis, best.0))
}
