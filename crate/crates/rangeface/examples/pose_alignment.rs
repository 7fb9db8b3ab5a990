//! Detects the nose tip on a turned head and recovers the head's rotation
//! by sweeping candidate corrections for maximal bilateral symmetry.
//!
//! Run with: cargo run --release --example pose_alignment

use rangeface::{
    align_cloud, binarize, build_histogram, estimate_pose_by_symmetry, find_nose_tip,
    generate_face, otsu_threshold, smooth_depth_map, Axis, FaceParams, Point3, RotationSpec,
    SmoothingConfig,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = FaceParams::default();
    for (axis, degrees) in [(Axis::Y, 30.0), (Axis::Y, -38.0), (Axis::X, 18.0)] {
        let pose = RotationSpec::from_degrees(axis, degrees);
        let (map, truth) = generate_face(&params, Some(&pose))?;

        // The frontal pipeline up to localization: threshold, mask, smooth,
        // then the 3x3 window-sum maximum.
        let histogram = build_histogram(&map)?;
        let threshold = otsu_threshold(&histogram);
        let mask = binarize(&map, threshold, &histogram)?;
        let smoothed = smooth_depth_map(&map, &SmoothingConfig::uniform(3, 10)?)?;
        let tip = find_nose_tip(&smoothed, &mask)?;

        // Alignment: rotate the face foreground about the detected tip,
        // looking for the angle that makes the cloud most mirror-symmetric.
        let cloud: Vec<Point3> = smoothed
            .apply_mask(&mask)?
            .to_point_cloud();
        let sweep: Vec<f64> = (-45..=45).map(|d| (d as f64).to_radians()).collect();
        let corrective = estimate_pose_by_symmetry(&cloud, tip.point, axis, &sweep)?;
        let aligned = align_cloud(&cloud, tip.point, &corrective);

        println!(
            "injected {axis}{degrees:+.0} deg | tip found at ({}, {}) vs truth ({}, {}) | \
             corrective {axis}{:+.0} deg | aligned cloud of {} points",
            tip.row,
            tip.col,
            truth.row,
            truth.col,
            corrective.theta.to_degrees(),
            aligned.len(),
        );
    }
    Ok(())
}
