//! A scaled-down run of the smoothing A/B benchmark: many noisy synthetic
//! faces per viewpoint, nose-tip detection with and without smoothing.
//!
//! Run with: cargo run --release --example ab_benchmark

use rangeface::{
    run_benchmark, Axis, FaceParams, NoiseParams, PoseBucket, SmoothingConfig,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let buckets = vec![
        PoseBucket::frontal(),
        PoseBucket::rotated(Axis::Y, 30.0),
        PoseBucket::rotated(Axis::Y, -40.0),
        PoseBucket::rotated(Axis::Z, 18.0),
        PoseBucket::rotated(Axis::X, -18.0),
    ];
    let face = FaceParams::default();
    let noise = NoiseParams {
        spike_fraction: 0.05,
        spike_amplitude: 3.0 * face.nose_height,
        gaussian_sigma: 0.0,
        seed: 42,
    };
    let report = run_benchmark(
        50,
        &buckets,
        &face,
        &noise,
        &SmoothingConfig::uniform(3, 10)?,
        3.0,
    )?;
    print!("{}", report.to_summary_string());
    Ok(())
}
