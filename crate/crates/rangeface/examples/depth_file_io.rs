//! Round-trips a depth map through the three on-disk formats and a
//! landmark record through its key=value file.
//!
//! Run with: cargo run --example depth_file_io

use rangeface::{
    binarize, build_histogram, find_nose_tip, generate_face, load_depth_map, load_landmark,
    otsu_threshold, save_depth_map, save_landmark, DepthFileFormat, FaceParams,
};
use std::fs;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let (map, _) = generate_face(&FaceParams::default(), None)?;

    for format in [
        DepthFileFormat::Grid,
        DepthFileFormat::Pgm16,
        DepthFileFormat::Xyz,
    ] {
        let path = dir.path().join(format!("face.{format}"));
        save_depth_map(&map, &path, format)?;
        let loaded = load_depth_map(&path, format)?;
        println!(
            "{format:>5}: {:>6} bytes, round trip {}",
            fs::metadata(&path)?.len(),
            if loaded == map {
                "exact"
            } else {
                // PGM16 stores rounded integers, so fractional depths move.
                "quantized"
            }
        );
    }

    let histogram = build_histogram(&map)?;
    let mask = binarize(&map, otsu_threshold(&histogram), &histogram)?;
    let tip = find_nose_tip(&map, &mask)?;
    let lm_path = dir.path().join("face.landmark");
    save_landmark(&tip, &lm_path)?;
    let reloaded = load_landmark(&lm_path)?;
    println!(
        "landmark: ({}, {}) score {:.1} -> file -> ({}, {}) score {:.1}",
        tip.row, tip.col, tip.score, reloaded.row, reloaded.col, reloaded.score
    );
    println!("\n{}", fs::read_to_string(&lm_path)?);
    Ok(())
}
