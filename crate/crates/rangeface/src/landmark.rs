//! Nose-tip localization by maximum 3x3 depth mass.
//!
//! On a range image where larger depth means closer to the sensor, the nose
//! tip of a face is the most protruding region, so the pixel whose 3x3
//! window carries the largest depth sum is the tip candidate. Summing a full
//! window instead of taking the single largest pixel buys a little noise
//! robustness, and restricting candidates to windows that are entirely
//! valid foreground keeps background and scanner holes out of the sum.

use crate::smooth::{smooth_depth_map, SmoothError, SmoothingConfig};
use crate::types::{BinaryMask, DepthMap, Landmark, Point3};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LandmarkError {
    #[error("map is {map_width}x{map_height} but mask is {mask_width}x{mask_height}")]
    DimensionMismatch {
        map_width: usize,
        map_height: usize,
        mask_width: usize,
        mask_height: usize,
    },
    #[error("no interior pixel has a fully valid foreground 3x3 window; the face region is too small or the mask is empty")]
    NoCandidate,
    #[error(transparent)]
    Smooth(#[from] SmoothError),
}

/// Scans interior pixels in row-major order; every pixel whose entire 3x3
/// window is valid and foreground is a candidate scored by the window's
/// depth sum. The first candidate attaining the maximum sum wins (strict
/// greater-than replacement), and the landmark carries the window sum as
/// its score and the 3D position `(col, row, center depth)`.
pub fn find_nose_tip(map: &DepthMap, mask: &BinaryMask) -> Result<Landmark, LandmarkError> {
    if map.width() != mask.width() || map.height() != mask.height() {
        return Err(LandmarkError::DimensionMismatch {
            map_width: map.width(),
            map_height: map.height(),
            mask_width: mask.width(),
            mask_height: mask.height(),
        });
    }
    let mut best: Option<Landmark> = None;
    for row in 1..map.height() - 1 {
        for col in 1..map.width() - 1 {
            let mut sum = 0.0;
            let mut eligible = true;
            'window: for r in row - 1..=row + 1 {
                for c in col - 1..=col + 1 {
                    if !(map.is_valid(r, c) && mask.is_set(r, c)) {
                        eligible = false;
                        break 'window;
                    }
                    sum += map.depth_at(r, c);
                }
            }
            if !eligible {
                continue;
            }
            if best.as_ref().map_or(true, |b| sum > b.score) {
                best = Some(Landmark::new(
                    row,
                    col,
                    Point3::new(col as f64, row as f64, map.depth_at(row, col)),
                    sum,
                ));
            }
        }
    }
    best.ok_or(LandmarkError::NoCandidate)
}

/// Runs the detector twice from the same mask: once on the raw masked map
/// and once after weighted-median smoothing. Returned as `(raw, smoothed)`;
/// this is the comparison that shows what smoothing buys on spiky data.
pub fn detect_raw_and_smoothed(
    map: &DepthMap,
    mask: &BinaryMask,
    config: &SmoothingConfig,
) -> Result<(Landmark, Landmark), LandmarkError> {
    if map.width() != mask.width() || map.height() != mask.height() {
        return Err(LandmarkError::DimensionMismatch {
            map_width: map.width(),
            map_height: map.height(),
            mask_width: mask.width(),
            mask_height: mask.height(),
        });
    }
    let masked = map.apply_mask(mask).expect("dimensions checked above");
    let raw = find_nose_tip(&masked, mask)?;
    let smoothed_map = smooth_depth_map(&masked, config)?;
    let smoothed = find_nose_tip(&smoothed_map, mask)?;
    Ok((raw, smoothed))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent exhaustive reference with the same row-major-first
    /// tie-break; sums its window in the same cell order so score equality
    /// is exact.
    fn brute_force(map: &DepthMap, mask: &BinaryMask) -> Option<(usize, usize, f64)> {
        let mut best: Option<(usize, usize, f64)> = None;
        for row in 1..map.height() - 1 {
            for col in 1..map.width() - 1 {
                let mut sum = 0.0;
                let mut ok = true;
                for r in row - 1..=row + 1 {
                    for c in col - 1..=col + 1 {
                        ok &= map.is_valid(r, c) && mask.is_set(r, c);
                        if !ok {
                            break;
                        }
                        sum += map.depth_at(r, c);
                    }
                    if !ok {
                        break;
                    }
                }
                if ok && best.map_or(true, |(_, _, s)| sum > s) {
                    best = Some((row, col, sum));
                }
            }
        }
        best
    }

    #[test]
    fn constant_map_ties_to_first_interior_pixel() {
        let map = DepthMap::constant(5, 5, 1.0).unwrap();
        let mask = BinaryMask::filled(5, 5, true).unwrap();
        let lm = find_nose_tip(&map, &mask).unwrap();
        assert_eq!((lm.row, lm.col), (1, 1));
        assert_eq!(lm.score, 9.0);
        assert_eq!(lm.point, Point3::new(1.0, 1.0, 1.0));
    }

    #[test]
    fn hot_center_pixel_scores_eighteen_with_row_major_tie_break() {
        let mut depths = vec![1.0; 25];
        depths[2 * 5 + 2] = 10.0;
        let map = DepthMap::new(5, 5, depths, vec![true; 25]).unwrap();
        let mask = BinaryMask::filled(5, 5, true).unwrap();
        let lm = find_nose_tip(&map, &mask).unwrap();
        // Every interior window of a 5x5 map contains the map center, so
        // all nine sums are 18 and the first interior pixel wins the tie.
        assert_eq!(lm.score, 18.0);
        assert_eq!((lm.row, lm.col), (1, 1));
        let (brow, bcol, bscore) = brute_force(&map, &mask).unwrap();
        assert_eq!((lm.row, lm.col, lm.score), (brow, bcol, bscore));
    }

    #[test]
    fn off_center_bump_is_localized_exactly() {
        // A strictly peaked bump produces a unique window-sum maximum.
        let map = DepthMap::from_fn(9, 9, |row, col| {
            let dr = row as f64 - 6.0;
            let dc = col as f64 - 3.0;
            Some(10.0 * (-(dr * dr + dc * dc) / 4.0).exp())
        })
        .unwrap();
        let mask = BinaryMask::filled(9, 9, true).unwrap();
        let lm = find_nose_tip(&map, &mask).unwrap();
        assert_eq!((lm.row, lm.col), (6, 3));
    }

    #[test]
    fn windows_touching_background_or_holes_are_ineligible() {
        let mut depths = vec![1.0; 49];
        let mut valid = vec![true; 49];
        let mut fg = vec![true; 49];
        // Huge depth at (1,1) but its window touches an invalid pixel.
        depths[1 * 7 + 1] = 100.0;
        valid[0] = false;
        // Huge depth at (5,5) but its window touches background.
        depths[5 * 7 + 5] = 100.0;
        fg[4 * 7 + 4] = false;
        let map = DepthMap::new(7, 7, depths, valid).unwrap();
        let mask = BinaryMask::new(7, 7, fg).unwrap();
        let lm = find_nose_tip(&map, &mask).unwrap();
        // (1,2) still sees the 100 at (1,1) through an eligible window.
        assert_eq!(brute_force(&map, &mask).unwrap(), (lm.row, lm.col, lm.score));
        assert!((lm.row, lm.col) != (1, 1) && (lm.row, lm.col) != (5, 5));
    }

    #[test]
    fn empty_mask_yields_no_candidate() {
        let map = DepthMap::constant(5, 5, 1.0).unwrap();
        let mask = BinaryMask::filled(5, 5, false).unwrap();
        assert!(matches!(
            find_nose_tip(&map, &mask),
            Err(LandmarkError::NoCandidate)
        ));
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let map = DepthMap::constant(5, 5, 1.0).unwrap();
        let mask = BinaryMask::filled(4, 5, true).unwrap();
        assert!(matches!(
            find_nose_tip(&map, &mask),
            Err(LandmarkError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn location_is_invariant_under_depth_offset() {
        let depths: Vec<f64> = (0..81).map(|i| ((i * 7) % 13) as f64).collect();
        let map = DepthMap::new(9, 9, depths.clone(), vec![true; 81]).unwrap();
        let mask = BinaryMask::filled(9, 9, true).unwrap();
        let base = find_nose_tip(&map, &mask).unwrap();
        let shifted_map = DepthMap::new(
            9,
            9,
            depths.iter().map(|d| d + 42.0).collect(),
            vec![true; 81],
        )
        .unwrap();
        let shifted = find_nose_tip(&shifted_map, &mask).unwrap();
        assert_eq!((base.row, base.col), (shifted.row, shifted.col));
        assert!((shifted.score - base.score - 9.0 * 42.0).abs() < 1e-9);
    }

    #[test]
    fn raw_and_smoothed_agree_on_constant_maps() {
        let map = DepthMap::constant(6, 6, 3.0).unwrap();
        let mask = BinaryMask::filled(6, 6, true).unwrap();
        let config = SmoothingConfig::uniform(3, 5).unwrap();
        let (raw, smoothed) = detect_raw_and_smoothed(&map, &mask, &config).unwrap();
        assert_eq!(raw, smoothed);
    }

    #[test]
    fn spike_far_from_bump_fools_only_the_raw_detector() {
        // Gentle bump at (4,4) plus an isolated spike at (10,10) that
        // dwarfs it; one median pass removes the spike.
        let mut map = DepthMap::from_fn(15, 15, |row, col| {
            let dr = row as f64 - 4.0;
            let dc = col as f64 - 4.0;
            Some(5.0 * (-(dr * dr + dc * dc) / 6.0).exp())
        })
        .unwrap();
        let spike = 10 * 15 + 10;
        let mut depths = map.depths().to_vec();
        depths[spike] = 50.0;
        map = DepthMap::new(15, 15, depths, map.validity().to_vec()).unwrap();
        let mask = BinaryMask::filled(15, 15, true).unwrap();
        let config = SmoothingConfig::uniform(3, 2).unwrap();
        let (raw, smoothed) = detect_raw_and_smoothed(&map, &mask, &config).unwrap();
        let dist = |lm: &Landmark, row: f64, col: f64| {
            ((lm.row as f64 - row).powi(2) + (lm.col as f64 - col).powi(2)).sqrt()
        };
        assert!(
            dist(&raw, 10.0, 10.0) <= 1.5,
            "raw detector chases the spike, got ({}, {})",
            raw.row,
            raw.col
        );
        assert!(
            dist(&smoothed, 4.0, 4.0) <= 1.0,
            "smoothed detector stays at the bump, got ({}, {})",
            smoothed.row,
            smoothed.col
        );
    }
}
