//! Separates a synthetic face from its background with Otsu's method and
//! prints the chosen threshold and the resulting foreground mask.
//!
//! Run with: cargo run --example otsu_threshold

use rangeface::{binarize, build_histogram, generate_face, otsu_threshold, FaceParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = FaceParams {
        width: 48,
        height: 24,
        nose_center: (12, 24),
        ..FaceParams::default()
    };
    let (map, _) = generate_face(&params, None)?;

    let histogram = build_histogram(&map)?;
    let threshold = otsu_threshold(&histogram);
    let mask = binarize(&map, threshold, &histogram)?;

    println!(
        "depth range [{:.1}, {:.1}] over {} bins",
        histogram.min_depth(),
        histogram.max_depth(),
        histogram.bins().len()
    );
    println!(
        "otsu threshold: bin {threshold}; foreground = pixels strictly above it \
         (depth > {:.1})",
        histogram.min_depth()
            + (threshold as f64 + 1.0) / 256.0 * (histogram.max_depth() - histogram.min_depth())
    );
    println!(
        "foreground: {} of {} pixels\n",
        mask.count_set(),
        params.width * params.height
    );
    for row in 0..map.height() {
        let line: String = (0..map.width())
            .map(|col| if mask.is_set(row, col) { '#' } else { '.' })
            .collect();
        println!("{line}");
    }
    Ok(())
}
