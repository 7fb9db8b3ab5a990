//! Pose-tolerant nose-tip detection for 3D range images.
//!
//! A range image stores depth per pixel, with larger depth meaning closer to
//! the camera; for a roughly frontal face the nose tip is the closest
//! region. This crate implements the full detection pipeline:
//!
//! 1. [`threshold`] — Otsu binarization separates face from background.
//! 2. [`smooth`] — iterative 3D weighted-median filtering removes scanner
//!    spikes without smearing edges.
//! 3. [`landmark`] — the nose tip is the interior pixel maximizing its 3x3
//!    depth-window sum over the face foreground.
//! 4. [`align`] — pose normalization by sweeping axis rotations about the
//!    tip for maximal bilateral symmetry.
//! 5. [`mesh`] — the median-filter idea lifted to triangle meshes via
//!    weighted-median face normals.
//!
//! [`synth`] generates parametric range faces with exact ground truth and
//! [`bench`] runs the A/B experiment (smoothing on vs off) that quantifies
//! why step 2 exists. [`ingest`] reads and writes the on-disk formats and
//! [`cli`] wires everything into the `rangeface` binary.
//!
//! See the `examples/` directory for a runnable tour of each capability.

pub mod align;
pub mod bench;
pub mod cli;
pub mod ingest;
pub mod landmark;
pub mod mesh;
pub mod smooth;
pub mod synth;
pub mod threshold;
pub mod types;

pub use align::{align_cloud, estimate_pose_by_symmetry, AlignError, RotationMatrix};
pub use bench::{default_pose_set, run_benchmark, BenchError, BenchmarkReport, PoseBucket};
pub use ingest::{
    load_depth_map, load_landmark, save_depth_map, save_landmark, DepthFileFormat, IngestError,
};
pub use landmark::{detect_raw_and_smoothed, find_nose_tip, LandmarkError};
pub use mesh::{
    face_neighborhoods, smooth_mesh, smooth_mesh_with, MeshError, MeshMedianWeights, TriangleMesh,
};
pub use smooth::{
    smooth_depth_map, weighted_median, Boundary, SmoothError, SmoothingConfig, WeightKernel,
};
pub use synth::{generate_face, inject_noise, FaceParams, NoiseParams, SynthError};
pub use threshold::{
    binarize, build_histogram, otsu_threshold, Histogram, ThresholdError, BIN_COUNT,
};
pub use types::{
    Axis, BinaryMask, CoreError, DepthMap, Landmark, Point3, RotationSpec,
};
