//! Shared oracles and generators for the integration suites.
//!
//! Every oracle here recomputes its answer from the definition, structured
//! differently from the library implementation (from-scratch rescans
//! instead of running sums, multiset expansion instead of weight
//! accumulation, plain sorting instead of index-order selection), so
//! agreement is evidence rather than tautology.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rangeface::{BinaryMask, DepthMap, BIN_COUNT};

/// O(n^2) Otsu reference: for every candidate threshold, recompute both
/// class counts and means from scratch and keep the first strict maximum of
/// the between-class variance. Bin indices and counts are integers, so both
/// sides compute bit-identical scores.
pub fn brute_force_otsu(bins: &[u64; BIN_COUNT]) -> u8 {
    let mut best_t: Option<u8> = None;
    let mut best_score = f64::NEG_INFINITY;
    for t in 0..BIN_COUNT {
        let mut n0 = 0u64;
        let mut s0 = 0.0f64;
        for b in 0..=t {
            n0 += bins[b];
            s0 += b as f64 * bins[b] as f64;
        }
        let mut n1 = 0u64;
        let mut s1 = 0.0f64;
        for b in t + 1..BIN_COUNT {
            n1 += bins[b];
            s1 += b as f64 * bins[b] as f64;
        }
        if n0 == 0 || n1 == 0 {
            continue;
        }
        let mu0 = s0 / n0 as f64;
        let mu1 = s1 / n1 as f64;
        let score = n0 as f64 * n1 as f64 * (mu0 - mu1) * (mu0 - mu1);
        if score > best_score {
            best_score = score;
            best_t = Some(t as u8);
        }
    }
    best_t.unwrap_or_else(|| {
        bins.iter()
            .position(|&n| n > 0)
            .expect("oracle needs at least one occupied bin") as u8
    })
}

/// Weighted-median reference by brute expansion: replicate each value
/// `weight` times, sort the multiset, and take the lower median (index
/// `(total - 1) / 2`).
pub fn expansion_median(values: &[f64], weights: &[u64]) -> f64 {
    let mut expanded: Vec<f64> = Vec::new();
    for (&v, &w) in values.iter().zip(weights) {
        for _ in 0..w {
            expanded.push(v);
        }
    }
    expanded.sort_by(f64::total_cmp);
    expanded[(expanded.len() - 1) / 2]
}

/// Plain 3x3 median filter with replicate (clamp) padding: the expected
/// behavior of one uniform-weight smoothing pass. Gathers each valid
/// pixel's window by clamped coordinates (border pixels repeat), drops
/// invalid neighbors, sorts, and takes the lower median. Invalid pixels
/// pass through untouched.
pub fn plain_median_filter(map: &DepthMap) -> DepthMap {
    let (w, h) = (map.width(), map.height());
    DepthMap::from_fn(w, h, |row, col| {
        if !map.is_valid(row, col) {
            return None;
        }
        let mut window: Vec<f64> = Vec::with_capacity(9);
        for di in -1i64..=1 {
            for dj in -1i64..=1 {
                let r = (row as i64 + di).clamp(0, h as i64 - 1) as usize;
                let c = (col as i64 + dj).clamp(0, w as i64 - 1) as usize;
                if map.is_valid(r, c) {
                    window.push(map.depth_at(r, c));
                }
            }
        }
        window.sort_by(f64::total_cmp);
        Some(window[(window.len() - 1) / 2])
    })
    .expect("same dimensions as a valid input map")
}

/// Exhaustive nose-tip reference: every interior pixel whose full 3x3
/// window is valid and foreground, scored by the window depth sum
/// accumulated in row-major cell order (so scores match bit for bit),
/// first maximum wins.
pub fn brute_force_nose_tip(map: &DepthMap, mask: &BinaryMask) -> Option<(usize, usize, f64)> {
    let mut best: Option<(usize, usize, f64)> = None;
    for row in 1..map.height() - 1 {
        for col in 1..map.width() - 1 {
            let mut sum = 0.0;
            let mut eligible = true;
            for r in row - 1..=row + 1 {
                for c in col - 1..=col + 1 {
                    if map.is_valid(r, c) && mask.is_set(r, c) {
                        sum += map.depth_at(r, c);
                    } else {
                        eligible = false;
                    }
                }
            }
            if eligible && best.map_or(true, |(_, _, s)| sum > s) {
                best = Some((row, col, sum));
            }
        }
    }
    best
}

/// Random depth map with a controllable share of invalid pixels.
pub fn random_map(rng: &mut ChaCha8Rng, width: usize, height: usize, invalid_p: f64) -> DepthMap {
    loop {
        let map = DepthMap::from_fn(width, height, |_, _| {
            if rng.gen_bool(invalid_p) {
                None
            } else {
                Some(rng.gen_range(0.0..200.0))
            }
        })
        .expect("test dimensions are valid");
        // Histogram construction needs at least one valid pixel and the
        // formats under test are only interesting with data present.
        if map.valid_count() > 0 {
            return map;
        }
    }
}

/// Random foreground mask where roughly `set_p` of the pixels are set.
pub fn random_mask(rng: &mut ChaCha8Rng, width: usize, height: usize, set_p: f64) -> BinaryMask {
    let bits = (0..width * height).map(|_| rng.gen_bool(set_p)).collect();
    BinaryMask::new(width, height, bits).expect("test dimensions are valid")
}

/// Deterministic RNG for a named suite; distinct names give independent
/// streams.
pub fn seeded_rng(salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x5EED_0000_0000_0000 ^ salt)
}
