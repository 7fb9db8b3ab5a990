//! Command-line front end: `detect` runs the pipeline on a depth-map file,
//! `synth` writes synthetic faces with ground truth, `bench` runs the A/B
//! smoothing experiment. Each stage failure surfaces as `<stage>: <cause>`
//! and a nonzero exit; exit 0 means every requested output was written.

use crate::align::estimate_pose_by_symmetry;
use crate::bench::{default_pose_set, run_benchmark, PoseBucket};
use crate::ingest::{
    load_depth_map, save_depth_map, save_landmark, DepthFileFormat,
};
use crate::landmark::find_nose_tip;
use crate::smooth::{smooth_depth_map, Boundary, SmoothingConfig};
use crate::synth::{generate_face, inject_noise, FaceParams, NoiseParams};
use crate::threshold::{binarize, build_histogram, otsu_threshold};
use crate::types::{Axis, RotationSpec};
use clap::{Args, Parser, Subcommand};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use thiserror::Error;

/// A pipeline failure tagged with the stage that produced it.
#[derive(Debug, Error)]
#[error("the {stage} stage failed")]
pub struct StageError {
    pub stage: &'static str,
    #[source]
    pub source: Box<dyn std::error::Error + Send + Sync>,
}

fn at_stage<E: std::error::Error + Send + Sync + 'static>(
    stage: &'static str,
) -> impl FnOnce(E) -> StageError {
    move |source| StageError {
        stage,
        source: Box::new(source),
    }
}

fn stage_msg(stage: &'static str, message: String) -> StageError {
    StageError {
        stage,
        source: message.into(),
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "rangeface",
    version,
    about = "Nose-tip detection for 3D range images: Otsu thresholding, \
             iterative median smoothing, window-sum localization and \
             symmetry-based pose alignment"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Detect the nose tip in a depth-map file
    Detect(DetectArgs),
    /// Generate a synthetic range face with ground truth
    Synth(SynthArgs),
    /// Run the smoothing-on vs smoothing-off benchmark
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    /// Input depth-map file
    #[arg(long)]
    pub input: PathBuf,
    /// Input format: pgm16, grid or xyz
    #[arg(long, value_parser = DepthFileFormat::from_str)]
    pub format: DepthFileFormat,
    /// Skip median smoothing (detect on the raw masked map)
    #[arg(long)]
    pub no_smooth: bool,
    /// Median kernel side length (odd, >= 3)
    #[arg(long, default_value_t = 3)]
    pub kernel_side: usize,
    /// Smoothing passes
    #[arg(long, default_value_t = 100)]
    pub iterations: usize,
    /// Window boundary handling: clamp or skip
    #[arg(long, default_value = "clamp", value_parser = Boundary::from_str)]
    pub boundary: Boundary,
    /// Estimate pose about this axis (x, y or z) after detection
    #[arg(long, value_parser = Axis::from_str)]
    pub align_axis: Option<Axis>,
    /// Symmetry sweep in degrees as START:STOP:STEP (default -45:45:1)
    #[arg(long, allow_hyphen_values = true)]
    pub sweep: Option<String>,
    /// Write the detected landmark here
    #[arg(long)]
    pub out_landmark: Option<PathBuf>,
    /// Write the smoothed masked map here (format from extension)
    #[arg(long, conflicts_with = "no_smooth")]
    pub out_smoothed: Option<PathBuf>,
    /// Dump per-stage intermediates into this directory
    #[arg(long)]
    pub dump_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 64)]
    pub width: usize,
    #[arg(long, default_value_t = 64)]
    pub height: usize,
    /// Nose bump height above the local dome surface
    #[arg(long, default_value_t = 20.0)]
    pub nose_height: f64,
    /// Nose bump Gaussian radius in pixels
    #[arg(long, default_value_t = 2.5)]
    pub nose_sigma: f64,
    /// Rotate the face about this axis (requires --pose-deg)
    #[arg(long, value_parser = Axis::from_str, requires = "pose_deg")]
    pub pose_axis: Option<Axis>,
    /// Rotation angle in degrees (requires --pose-axis)
    #[arg(long, requires = "pose_axis", allow_hyphen_values = true)]
    pub pose_deg: Option<f64>,
    /// Fraction of valid pixels to spike, in [0, 0.2]
    #[arg(long, default_value_t = 0.0)]
    pub spike_frac: f64,
    /// Depth added to each spiked pixel
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub spike_amp: f64,
    /// Per-pixel Gaussian depth jitter
    #[arg(long, default_value_t = 0.0)]
    pub gauss_sigma: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output depth map (format from extension: .grid/.txt, .pgm, .xyz);
    /// ground truth goes to <out>.truth.txt
    #[arg(long, default_value = "face.grid")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Faces per pose bucket
    #[arg(long, default_value_t = 200)]
    pub faces: usize,
    /// Comma-separated pose buckets: "frontal", "AXIS:DEG" (e.g. y:30,z:-18),
    /// or "full" for the complete viewpoint grid
    #[arg(long, default_value = "frontal")]
    pub poses: String,
    /// Success radius in pixels
    #[arg(long, default_value_t = 3.0)]
    pub tolerance_px: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Fraction of valid pixels to spike, in [0, 0.2]
    #[arg(long, default_value_t = 0.0)]
    pub spike_frac: f64,
    /// Depth added to each spiked pixel
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub spike_amp: f64,
    /// Per-pixel Gaussian depth jitter
    #[arg(long, default_value_t = 0.0)]
    pub gauss_sigma: f64,
    /// Median kernel side length
    #[arg(long, default_value_t = 3)]
    pub kernel_side: usize,
    /// Smoothing passes for the smoothed arm
    #[arg(long, default_value_t = 10)]
    pub iterations: usize,
    /// Write the per-bucket CSV here
    #[arg(long)]
    pub out_csv: Option<PathBuf>,
    /// Write the text summary here (it always prints to stdout too)
    #[arg(long)]
    pub out_summary: Option<PathBuf>,
}

pub fn run(cli: Cli) -> Result<(), StageError> {
    match cli.command {
        Command::Detect(args) => cmd_detect(&args),
        Command::Synth(args) => cmd_synth(&args),
        Command::Bench(args) => cmd_bench(&args),
    }
}

/// Parses "START:STOP:STEP" (degrees) into the inclusive list of sweep
/// angles in radians.
fn parse_sweep(text: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("sweep {text:?} must be START:STOP:STEP in degrees"));
    }
    let number = |token: &str, name: &str| -> Result<f64, String> {
        token
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| format!("sweep {name} {token:?} is not a finite number"))
    };
    let start = number(parts[0], "start")?;
    let stop = number(parts[1], "stop")?;
    let step = number(parts[2], "step")?;
    if step <= 0.0 {
        return Err(format!("sweep step must be positive, got {step}"));
    }
    if stop < start {
        return Err(format!("sweep stop {stop} is below start {start}"));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count)
        .map(|i| (start + i as f64 * step).to_radians())
        .collect())
}

/// Parses the bench --poses flag: "frontal", "AXIS:DEG" tokens, or "full".
fn parse_poses(text: &str) -> Result<Vec<PoseBucket>, String> {
    let mut buckets = Vec::new();
    for token in text.split(',') {
        let token = token.trim();
        match token {
            "" => return Err("empty pose token".to_string()),
            "full" => buckets.extend(default_pose_set()),
            "frontal" => buckets.push(PoseBucket::frontal()),
            other => {
                let (axis, deg) = other.split_once(':').ok_or_else(|| {
                    format!("pose {other:?} must be \"frontal\", \"full\" or AXIS:DEG")
                })?;
                let axis = Axis::from_str(axis.trim())?;
                let deg: f64 = deg
                    .trim()
                    .parse()
                    .map_err(|_| format!("pose angle {deg:?} is not a number"))?;
                buckets.push(PoseBucket::rotated(axis, deg));
            }
        }
    }
    Ok(buckets)
}

fn infer_format(path: &Path, fallback: DepthFileFormat) -> DepthFileFormat {
    DepthFileFormat::from_path(path).unwrap_or(fallback)
}

pub fn cmd_detect(args: &DetectArgs) -> Result<(), StageError> {
    let map = load_depth_map(&args.input, args.format).map_err(at_stage("load"))?;

    let hist = build_histogram(&map).map_err(at_stage("threshold"))?;
    let threshold = otsu_threshold(&hist);
    let mask = binarize(&map, threshold, &hist).map_err(at_stage("threshold"))?;
    let masked = map.apply_mask(&mask).map_err(at_stage("mask"))?;

    let smoothed = if args.no_smooth {
        None
    } else {
        let config = SmoothingConfig::uniform(args.kernel_side, args.iterations)
            .map_err(at_stage("smooth"))?
            .with_boundary(args.boundary);
        Some(smooth_depth_map(&masked, &config).map_err(at_stage("smooth"))?)
    };
    let working = smoothed.as_ref().unwrap_or(&masked);

    // Dump stage intermediates before localization so a failing landmark
    // stage still leaves its inputs on disk for inspection.
    if let Some(dir) = &args.dump_dir {
        fs::create_dir_all(dir).map_err(at_stage("dump"))?;
        save_depth_map(&masked, dir.join("masked.grid"), DepthFileFormat::Grid)
            .map_err(at_stage("dump"))?;
        if let Some(smoothed) = &smoothed {
            save_depth_map(smoothed, dir.join("smoothed.grid"), DepthFileFormat::Grid)
                .map_err(at_stage("dump"))?;
        }
        let mut hist_text = format!(
            "# depth histogram: 256 bins over [{}, {}], otsu threshold bin {}\n",
            hist.min_depth(),
            hist.max_depth(),
            threshold
        );
        for (bin, count) in hist.bins().iter().enumerate() {
            let _ = writeln!(hist_text, "{bin} {count}");
        }
        fs::write(dir.join("histogram.txt"), hist_text).map_err(at_stage("dump"))?;
    }

    let landmark = find_nose_tip(working, &mask).map_err(at_stage("landmark"))?;

    let alignment = match args.align_axis {
        None => None,
        Some(axis) => {
            let sweep_text = args.sweep.as_deref().unwrap_or("-45:45:1");
            let sweep =
                parse_sweep(sweep_text).map_err(|msg| stage_msg("align", msg))?;
            let cloud = working.to_point_cloud();
            let spec = estimate_pose_by_symmetry(&cloud, landmark.point, axis, &sweep)
                .map_err(at_stage("align"))?;
            let aligned = crate::align::align_cloud(&cloud, landmark.point, &spec);
            Some((spec, aligned))
        }
    };

    if let Some(path) = &args.out_landmark {
        save_landmark(&landmark, path).map_err(at_stage("write-landmark"))?;
    }
    if let (Some(path), Some(smoothed)) = (&args.out_smoothed, &smoothed) {
        let format = infer_format(path, args.format);
        save_depth_map(smoothed, path, format).map_err(at_stage("write-smoothed"))?;
    }
    if let (Some(dir), Some((_, aligned))) = (&args.dump_dir, &alignment) {
        let mut text = String::new();
        for p in aligned {
            let _ = writeln!(text, "{} {} {}", p.x, p.y, p.z);
        }
        fs::write(dir.join("aligned_cloud.txt"), text).map_err(at_stage("dump"))?;
    }

    let mut summary = format!(
        "nose tip at pixel (row={}, col={}), depth {:.3}, window score {:.3}",
        landmark.row, landmark.col, landmark.point.z, landmark.score
    );
    if let Some((spec, _)) = &alignment {
        let _ = write!(
            summary,
            ", symmetry pose {}={:.1} deg",
            spec.axis,
            spec.theta.to_degrees()
        );
    }
    println!("{summary}");
    Ok(())
}

pub fn cmd_synth(args: &SynthArgs) -> Result<(), StageError> {
    let params = FaceParams {
        width: args.width,
        height: args.height,
        nose_center: (args.height / 2, args.width / 2),
        nose_height: args.nose_height,
        nose_sigma: args.nose_sigma,
        ..FaceParams::default()
    };
    let pose = match (args.pose_axis, args.pose_deg) {
        (Some(axis), Some(deg)) => Some(RotationSpec::from_degrees(axis, deg)),
        _ => None,
    };
    let (clean, truth) =
        generate_face(&params, pose.as_ref()).map_err(at_stage("generate"))?;
    let noise = NoiseParams {
        spike_fraction: args.spike_frac,
        spike_amplitude: args.spike_amp,
        gaussian_sigma: args.gauss_sigma,
        seed: args.seed,
    };
    let noisy = inject_noise(&clean, &noise).map_err(at_stage("noise"))?;

    let format = DepthFileFormat::from_path(&args.out).ok_or_else(|| {
        stage_msg(
            "write",
            format!(
                "cannot infer a depth format from {:?}; use .grid/.txt, .pgm or .xyz",
                args.out
            ),
        )
    })?;
    save_depth_map(&noisy, &args.out, format).map_err(at_stage("write"))?;
    let truth_path = PathBuf::from(format!("{}.truth.txt", args.out.display()));
    save_landmark(&truth, &truth_path).map_err(at_stage("write"))?;
    println!(
        "wrote {} ({} format) and {}; true nose at (row={}, col={})",
        args.out.display(),
        format,
        truth_path.display(),
        truth.row,
        truth.col
    );
    Ok(())
}

pub fn cmd_bench(args: &BenchArgs) -> Result<(), StageError> {
    let poses = parse_poses(&args.poses).map_err(|msg| stage_msg("flags", msg))?;
    let noise = NoiseParams {
        spike_fraction: args.spike_frac,
        spike_amplitude: args.spike_amp,
        gaussian_sigma: args.gauss_sigma,
        seed: args.seed,
    };
    let config = SmoothingConfig::uniform(args.kernel_side, args.iterations)
        .map_err(at_stage("flags"))?;
    let report = run_benchmark(
        args.faces,
        &poses,
        &FaceParams::default(),
        &noise,
        &config,
        args.tolerance_px,
    )
    .map_err(at_stage("bench"))?;

    if let Some(path) = &args.out_csv {
        fs::write(path, report.to_csv_string()).map_err(at_stage("write-csv"))?;
    }
    if let Some(path) = &args.out_summary {
        fs::write(path, report.to_summary_string()).map_err(at_stage("write-summary"))?;
    }
    print!("{}", report.to_summary_string());
    Ok(())
}
