//! The headline comparison: nose-tip detection on a spiky range scan with
//! and without median smoothing, against known ground truth.
//!
//! Run with: cargo run --example detect_nose_tip

use rangeface::{
    binarize, build_histogram, detect_raw_and_smoothed, generate_face, inject_noise,
    otsu_threshold, FaceParams, NoiseParams, SmoothingConfig,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = FaceParams::default();
    let (clean, truth) = generate_face(&params, None)?;
    println!("ground truth nose tip: ({}, {})", truth.row, truth.col);

    for seed in 0..5 {
        let noisy = inject_noise(
            &clean,
            &NoiseParams {
                spike_fraction: 0.05,
                spike_amplitude: 3.0 * params.nose_height,
                gaussian_sigma: 0.0,
                seed,
            },
        )?;
        let histogram = build_histogram(&noisy)?;
        let mask = binarize(&noisy, otsu_threshold(&histogram), &histogram)?;
        let (raw, smoothed) =
            detect_raw_and_smoothed(&noisy, &mask, &SmoothingConfig::uniform(3, 10)?)?;

        let err = |row: usize, col: usize| {
            (((row as f64 - truth.row as f64).powi(2) + (col as f64 - truth.col as f64).powi(2))
                as f64)
                .sqrt()
        };
        println!(
            "seed {seed}: raw detector -> ({:>2}, {:>2}) off by {:>5.2} px | \
             smoothed -> ({:>2}, {:>2}) off by {:>5.2} px",
            raw.row,
            raw.col,
            err(raw.row, raw.col),
            smoothed.row,
            smoothed.col,
            err(smoothed.row, smoothed.col),
        );
    }
    Ok(())
}
