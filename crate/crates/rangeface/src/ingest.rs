//! Depth-map and landmark file I/O. Three interchange formats:
//!
//! - ASCII grid: `"w h"` header line, then `h` rows of `w` depths; `nan`
//!   (any case) marks an invalid pixel.
//! - 16-bit binary PGM (`P5`, maxval 65535, big-endian samples); sample 0 is
//!   reserved as the invalid-pixel sentinel, so storable depths round to
//!   [1, 65535].
//! - XYZ point list: one `x y z` line per valid pixel with integer pixel
//!   coordinates; the grid is inferred from the bounding box on load.
//!
//! Landmarks serialize as `key=value` lines. All errors name the offending
//! path, and parse errors the 1-based line.

use crate::types::{CoreError, DepthMap, Landmark, Point3};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error("{path}: pixel ({row}, {col}) depth {value} rounds outside the PGM16 range [1, 65535]")]
    PgmRangeOverflow {
        path: PathBuf,
        row: usize,
        col: usize,
        value: f64,
    },
    #[error("{path}:{line}: duplicate sample for pixel (x={x}, y={y})")]
    DuplicateCell {
        path: PathBuf,
        line: usize,
        x: usize,
        y: usize,
    },
    #[error("{path}: {source}")]
    Map {
        path: PathBuf,
        #[source]
        source: CoreError,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DepthFileFormat {
    Pgm16,
    Grid,
    Xyz,
}

impl DepthFileFormat {
    /// Guesses the format from a file extension; used where an explicit
    /// `--format` flag is not available.
    pub fn from_path(path: &Path) -> Option<Self> {
        match path
            .extension()?
            .to_str()?
            .to_ascii_lowercase()
            .as_str()
        {
            "pgm" => Some(Self::Pgm16),
            "grid" | "txt" => Some(Self::Grid),
            "xyz" => Some(Self::Xyz),
            _ => None,
        }
    }
}

impl FromStr for DepthFileFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "pgm16" => Ok(Self::Pgm16),
            "grid" => Ok(Self::Grid),
            "xyz" => Ok(Self::Xyz),
            other => Err(format!(
                "unknown depth file format {other:?}, expected pgm16, grid or xyz"
            )),
        }
    }
}

impl std::fmt::Display for DepthFileFormat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Pgm16 => "pgm16",
            Self::Grid => "grid",
            Self::Xyz => "xyz",
        })
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> IngestError + '_ {
    move |source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> IngestError {
    IngestError::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn format_err(path: &Path, message: impl Into<String>) -> IngestError {
    IngestError::Format {
        path: path.to_path_buf(),
        message: message.into(),
    }
}

fn map_err(path: &Path) -> impl FnOnce(CoreError) -> IngestError + '_ {
    move |source| IngestError::Map {
        path: path.to_path_buf(),
        source,
    }
}

pub fn save_depth_map(
    map: &DepthMap,
    path: impl AsRef<Path>,
    format: DepthFileFormat,
) -> Result<(), IngestError> {
    let path = path.as_ref();
    match format {
        DepthFileFormat::Grid => fs::write(path, grid_to_string(map)).map_err(io_err(path)),
        DepthFileFormat::Xyz => fs::write(path, xyz_to_string(map)).map_err(io_err(path)),
        DepthFileFormat::Pgm16 => {
            let bytes = pgm_to_bytes(map, path)?;
            fs::write(path, bytes).map_err(io_err(path))
        }
    }
}

pub fn load_depth_map(
    path: impl AsRef<Path>,
    format: DepthFileFormat,
) -> Result<DepthMap, IngestError> {
    let path = path.as_ref();
    match format {
        DepthFileFormat::Grid => {
            let text = fs::read_to_string(path).map_err(io_err(path))?;
            grid_from_str(&text, path)
        }
        DepthFileFormat::Xyz => {
            let text = fs::read_to_string(path).map_err(io_err(path))?;
            xyz_from_str(&text, path)
        }
        DepthFileFormat::Pgm16 => {
            let bytes = fs::read(path).map_err(io_err(path))?;
            pgm_from_bytes(&bytes, path)
        }
    }
}

fn grid_to_string(map: &DepthMap) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", map.width(), map.height());
    for row in 0..map.height() {
        for col in 0..map.width() {
            if col > 0 {
                out.push(' ');
            }
            if map.is_valid(row, col) {
                let _ = write!(out, "{}", map.depth_at(row, col));
            } else {
                out.push_str("nan");
            }
        }
        out.push('\n');
    }
    out
}

fn grid_from_str(text: &str, path: &Path) -> Result<DepthMap, IngestError> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| parse_err(path, 1, "empty file, expected \"width height\" header"))?;
    let mut dims = header.split_whitespace();
    let parse_dim = |token: Option<&str>, name: &str| -> Result<usize, IngestError> {
        let token =
            token.ok_or_else(|| parse_err(path, 1, format!("header is missing the {name}")))?;
        token
            .parse::<usize>()
            .map_err(|_| parse_err(path, 1, format!("{name} {token:?} is not a pixel count")))
    };
    let width = parse_dim(dims.next(), "width")?;
    let height = parse_dim(dims.next(), "height")?;
    if let Some(extra) = dims.next() {
        return Err(parse_err(
            path,
            1,
            format!("unexpected token {extra:?} after \"width height\""),
        ));
    }

    let mut depths = Vec::with_capacity(width.saturating_mul(height));
    let mut valid = Vec::with_capacity(width.saturating_mul(height));
    for row in 0..height {
        let line_no = row + 2;
        let line = lines.next().ok_or_else(|| {
            parse_err(
                path,
                line_no,
                format!("expected {height} data rows, file ends after {row}"),
            )
        })?;
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != width {
            return Err(parse_err(
                path,
                line_no,
                format!("expected {width} depths in row {row}, got {}", tokens.len()),
            ));
        }
        for token in tokens {
            if token.eq_ignore_ascii_case("nan") {
                depths.push(0.0);
                valid.push(false);
                continue;
            }
            let value: f64 = token.parse().map_err(|_| {
                parse_err(path, line_no, format!("{token:?} is not a depth value"))
            })?;
            if !value.is_finite() {
                return Err(parse_err(
                    path,
                    line_no,
                    format!("depth {token:?} is not finite (use nan for invalid pixels)"),
                ));
            }
            depths.push(value);
            valid.push(true);
        }
    }
    for (extra_idx, line) in lines.enumerate() {
        if !line.trim().is_empty() {
            return Err(parse_err(
                path,
                height + 2 + extra_idx,
                format!("unexpected content {:?} after the last data row", line.trim()),
            ));
        }
    }
    DepthMap::new(width, height, depths, valid).map_err(map_err(path))
}

fn xyz_to_string(map: &DepthMap) -> String {
    let mut out = String::new();
    for row in 0..map.height() {
        for col in 0..map.width() {
            if map.is_valid(row, col) {
                let _ = writeln!(out, "{} {} {}", col, row, map.depth_at(row, col));
            }
        }
    }
    out
}

fn xyz_from_str(text: &str, path: &Path) -> Result<DepthMap, IngestError> {
    let mut samples: Vec<(usize, usize, f64, usize)> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 3 {
            return Err(parse_err(
                path,
                line_no,
                format!("expected \"x y z\", got {} fields", tokens.len()),
            ));
        }
        let coord = |token: &str, name: &str| -> Result<usize, IngestError> {
            token.parse::<usize>().map_err(|_| {
                parse_err(
                    path,
                    line_no,
                    format!("{name} {token:?} must be a nonnegative integer pixel coordinate"),
                )
            })
        };
        let x = coord(tokens[0], "x")?;
        let y = coord(tokens[1], "y")?;
        let z: f64 = tokens[2].parse().map_err(|_| {
            parse_err(path, line_no, format!("z {:?} is not a depth value", tokens[2]))
        })?;
        if !z.is_finite() {
            return Err(parse_err(path, line_no, format!("z {z} is not finite")));
        }
        samples.push((x, y, z, line_no));
    }
    if samples.is_empty() {
        return Err(format_err(path, "no samples: cannot infer a grid"));
    }

    let min_x = samples.iter().map(|s| s.0).min().unwrap();
    let max_x = samples.iter().map(|s| s.0).max().unwrap();
    let min_y = samples.iter().map(|s| s.1).min().unwrap();
    let max_y = samples.iter().map(|s| s.1).max().unwrap();
    let width = max_x - min_x + 1;
    let height = max_y - min_y + 1;

    let mut depths = vec![0.0; width * height];
    let mut valid = vec![false; width * height];
    for (x, y, z, line_no) in samples {
        let idx = (y - min_y) * width + (x - min_x);
        if valid[idx] {
            return Err(IngestError::DuplicateCell {
                path: path.to_path_buf(),
                line: line_no,
                x,
                y,
            });
        }
        depths[idx] = z;
        valid[idx] = true;
    }
    DepthMap::new(width, height, depths, valid).map_err(map_err(path))
}

fn pgm_to_bytes(map: &DepthMap, path: &Path) -> Result<Vec<u8>, IngestError> {
    let mut bytes = format!("P5\n{} {}\n65535\n", map.width(), map.height()).into_bytes();
    for row in 0..map.height() {
        for col in 0..map.width() {
            let sample: u16 = if map.is_valid(row, col) {
                let value = map.depth_at(row, col);
                let rounded = value.round();
                if !(1.0..=65535.0).contains(&rounded) {
                    return Err(IngestError::PgmRangeOverflow {
                        path: path.to_path_buf(),
                        row,
                        col,
                        value,
                    });
                }
                rounded as u16
            } else {
                0
            };
            bytes.extend_from_slice(&sample.to_be_bytes());
        }
    }
    Ok(bytes)
}

fn pgm_from_bytes(bytes: &[u8], path: &Path) -> Result<DepthMap, IngestError> {
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        return Err(format_err(path, "not a binary PGM: missing P5 magic"));
    }
    // Header tokens (width, height, maxval) separated by whitespace, with
    // '#' comments running to end of line; a single whitespace byte then
    // separates the maxval from the sample payload.
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for field in &mut fields {
        while pos < bytes.len() {
            match bytes[pos] {
                b if b.is_ascii_whitespace() => pos += 1,
                b'#' => {
                    while pos < bytes.len() && bytes[pos] != b'\n' {
                        pos += 1;
                    }
                }
                _ => break,
            }
        }
        let start = pos;
        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
            pos += 1;
        }
        if start == pos {
            return Err(format_err(
                path,
                format!("malformed PGM header near byte {start}"),
            ));
        }
        let token = std::str::from_utf8(&bytes[start..pos]).expect("digits are UTF-8");
        *field = token
            .parse()
            .map_err(|_| format_err(path, format!("PGM header value {token:?} out of range")))?;
    }
    let [width, height, maxval] = fields;
    if maxval != 65535 {
        return Err(format_err(
            path,
            format!("expected 16-bit PGM with maxval 65535, got {maxval}"),
        ));
    }
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(format_err(path, "missing whitespace after PGM maxval"));
    }
    pos += 1;

    let expected = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(2))
        .ok_or_else(|| format_err(path, "PGM dimensions overflow"))?;
    let payload = &bytes[pos..];
    if payload.len() != expected {
        return Err(format_err(
            path,
            format!(
                "PGM payload is {} bytes, expected {expected} for {width}x{height} samples",
                payload.len()
            ),
        ));
    }
    let mut depths = Vec::with_capacity(width * height);
    let mut valid = Vec::with_capacity(width * height);
    for pair in payload.chunks_exact(2) {
        let sample = u16::from_be_bytes([pair[0], pair[1]]);
        depths.push(sample as f64);
        valid.push(sample != 0);
    }
    DepthMap::new(width, height, depths, valid).map_err(map_err(path))
}

/// Writes a landmark as `key=value` lines: pixel `row`/`col`, 3D `x`/`y`/`z`
/// and the detector `score`.
pub fn save_landmark(landmark: &Landmark, path: impl AsRef<Path>) -> Result<(), IngestError> {
    let path = path.as_ref();
    let text = format!(
        "row={}\ncol={}\nx={}\ny={}\nz={}\nscore={}\n",
        landmark.row,
        landmark.col,
        landmark.point.x,
        landmark.point.y,
        landmark.point.z,
        landmark.score
    );
    fs::write(path, text).map_err(io_err(path))
}

pub fn load_landmark(path: impl AsRef<Path>) -> Result<Landmark, IngestError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let mut row: Option<usize> = None;
    let mut col: Option<usize> = None;
    let mut coords: [Option<f64>; 4] = [None; 4]; // x, y, z, score
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            parse_err(path, line_no, format!("expected key=value, got {line:?}"))
        })?;
        let slot = match key.trim() {
            "row" | "col" => {
                let parsed: usize = value.trim().parse().map_err(|_| {
                    parse_err(path, line_no, format!("{key} {value:?} is not a pixel index"))
                })?;
                let target = if key.trim() == "row" { &mut row } else { &mut col };
                if target.replace(parsed).is_some() {
                    return Err(parse_err(path, line_no, format!("duplicate key {key}")));
                }
                continue;
            }
            "x" => 0,
            "y" => 1,
            "z" => 2,
            "score" => 3,
            other => {
                return Err(parse_err(path, line_no, format!("unknown key {other:?}")));
            }
        };
        let parsed: f64 = value.trim().parse().map_err(|_| {
            parse_err(path, line_no, format!("{key} {value:?} is not a number"))
        })?;
        if !parsed.is_finite() {
            return Err(parse_err(path, line_no, format!("{key} {value:?} is not finite")));
        }
        if coords[slot].replace(parsed).is_some() {
            return Err(parse_err(path, line_no, format!("duplicate key {key}")));
        }
    }
    let missing = |name: &str| format_err(path, format!("landmark file is missing {name}"));
    Ok(Landmark {
        row: row.ok_or_else(|| missing("row"))?,
        col: col.ok_or_else(|| missing("col"))?,
        point: Point3::new(
            coords[0].ok_or_else(|| missing("x"))?,
            coords[1].ok_or_else(|| missing("y"))?,
            coords[2].ok_or_else(|| missing("z"))?,
        ),
        score: coords[3].ok_or_else(|| missing("score"))?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use tempfile::tempdir;

    fn write_fixture(dir: &tempfile::TempDir, name: &str, content: &[u8]) -> PathBuf {
        let path = dir.path().join(name);
        fs::write(&path, content).unwrap();
        path
    }

    fn checker_map() -> DepthMap {
        DepthMap::from_fn(4, 3, |row, col| {
            if (row + col) % 5 == 4 {
                None
            } else {
                Some(row as f64 * 10.0 + col as f64 + 0.25)
            }
        })
        .unwrap()
    }

    #[test]
    fn grid_writes_the_documented_layout() {
        let map = DepthMap::new(
            2,
            2,
            vec![1.0, 2.0, 3.0, 4.0],
            vec![true; 4],
        );
        // 2x2 is below the 3x3 minimum, so build the documented example
        // through a 3x3 and slice the expectation instead: assert the
        // serializer's exact layout on a 3x3.
        assert!(map.is_err());
        let map = DepthMap::new(
            3,
            3,
            vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.5, 9.0],
            vec![true, true, true, true, false, true, true, true, true],
        )
        .unwrap();
        assert_eq!(
            grid_to_string(&map),
            "3 3\n1 2 3\n4 nan 6\n7 8.5 9\n"
        );
    }

    #[test]
    fn grid_round_trips_by_byte_and_by_value() {
        let map = checker_map();
        let dir = tempdir().unwrap();
        let path = dir.path().join("map.grid");
        save_depth_map(&map, &path, DepthFileFormat::Grid).unwrap();
        let loaded = load_depth_map(&path, DepthFileFormat::Grid).unwrap();
        assert_eq!(loaded, map);
        let again = dir.path().join("again.grid");
        save_depth_map(&loaded, &again, DepthFileFormat::Grid).unwrap();
        assert_eq!(fs::read(&path).unwrap(), fs::read(&again).unwrap());
    }

    #[test]
    fn grid_accepts_any_case_nan_and_blank_tail() {
        let dir = tempdir().unwrap();
        let path = write_fixture(&dir, "m.grid", b"3 3\n1 NaN 3\n4 5 6\n7 8 NAN\n\n");
        let map = load_depth_map(&path, DepthFileFormat::Grid).unwrap();
        assert!(!map.is_valid(0, 1) && !map.is_valid(2, 2));
        assert_eq!(map.valid_count(), 7);
    }

    #[test]
    fn pgm_round_trips_integer_depths() {
        let map = DepthMap::from_fn(5, 4, |row, col| {
            if row == 2 && col == 2 {
                None
            } else {
                Some((1 + row * 100 + col * 7) as f64)
            }
        })
        .unwrap();
        let dir = tempdir().unwrap();
        let path = dir.path().join("m.pgm");
        save_depth_map(&map, &path, DepthFileFormat::Pgm16).unwrap();
        let loaded = load_depth_map(&path, DepthFileFormat::Pgm16).unwrap();
        assert_eq!(loaded, map);
        let bytes = fs::read(&path).unwrap();
        assert!(bytes.starts_with(b"P5\n5 4\n65535\n"));
        assert_eq!(bytes.len(), 13 + 5 * 4 * 2);
    }

    #[test]
    fn pgm_quantizes_by_rounding_and_rejects_out_of_range() {
        let dir = tempdir().unwrap();
        let map = DepthMap::constant(3, 3, 41.5001).unwrap();
        let path = dir.path().join("q.pgm");
        save_depth_map(&map, &path, DepthFileFormat::Pgm16).unwrap();
        let loaded = load_depth_map(&path, DepthFileFormat::Pgm16).unwrap();
        assert_eq!(loaded.depth_at(0, 0), 42.0);

        for bad in [0.2, -5.0, 70000.0] {
            let map = DepthMap::from_fn(3, 3, |row, col| {
                Some(if (row, col) == (1, 2) { bad } else { 10.0 })
            })
            .unwrap();
            let err = save_depth_map(&map, dir.path().join("bad.pgm"), DepthFileFormat::Pgm16)
                .unwrap_err();
            match err {
                IngestError::PgmRangeOverflow { row, col, value, .. } => {
                    assert_eq!((row, col), (1, 2));
                    assert_eq!(value, bad);
                }
                other => panic!("expected range overflow, got {other}"),
            }
        }
    }

    #[test]
    fn pgm_header_comments_are_skipped() {
        let mut bytes = b"P5 # made by a scanner\n# another note\n3 3\n65535\n".to_vec();
        for sample in 1..=9u16 {
            bytes.extend_from_slice(&sample.to_be_bytes());
        }
        let dir = tempdir().unwrap();
        let path = write_fixture(&dir, "c.pgm", &bytes);
        let map = load_depth_map(&path, DepthFileFormat::Pgm16).unwrap();
        assert_eq!(map.depth_at(2, 2), 9.0);
    }

    #[test]
    fn xyz_round_trips_with_valid_corners() {
        let map = DepthMap::from_fn(4, 4, |row, col| {
            if (row, col) == (1, 2) {
                None
            } else {
                Some(row as f64 + col as f64 * 0.5)
            }
        })
        .unwrap();
        let dir = tempdir().unwrap();
        let path = dir.path().join("m.xyz");
        save_depth_map(&map, &path, DepthFileFormat::Xyz).unwrap();
        let loaded = load_depth_map(&path, DepthFileFormat::Xyz).unwrap();
        assert_eq!(loaded, map);
        let again = dir.path().join("again.xyz");
        save_depth_map(&loaded, &again, DepthFileFormat::Xyz).unwrap();
        assert_eq!(fs::read(&path).unwrap(), fs::read(&again).unwrap());
    }

    #[test]
    fn xyz_grid_is_inferred_from_the_bounding_box() {
        let dir = tempdir().unwrap();
        let path = write_fixture(
            &dir,
            "offset.xyz",
            b"10 20 1.5\n12 20 2.5\n10 22 3.5\n12 22 4.5\n",
        );
        let map = load_depth_map(&path, DepthFileFormat::Xyz).unwrap();
        assert_eq!((map.width(), map.height()), (3, 3));
        assert_eq!(map.depth_at(0, 0), 1.5);
        assert_eq!(map.depth_at(2, 2), 4.5);
        assert!(!map.is_valid(1, 1));
        assert_eq!(map.valid_count(), 4);
    }

    #[test]
    fn landmark_round_trips() {
        let landmark = Landmark {
            row: 31,
            col: 29,
            point: Point3::new(29.0, 31.0, 149.81211),
            score: 1331.25,
        };
        let dir = tempdir().unwrap();
        let path = dir.path().join("nose.landmark");
        save_landmark(&landmark, &path).unwrap();
        let loaded = load_landmark(&path).unwrap();
        assert_eq!(loaded.row, 31);
        assert_eq!(loaded.col, 29);
        assert_eq!(loaded.point, landmark.point);
        assert_eq!(loaded.score, landmark.score);
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(
            text,
            "row=31\ncol=29\nx=29\ny=31\nz=149.81211\nscore=1331.25\n"
        );
    }

    #[test]
    fn missing_files_name_the_path() {
        let err = load_depth_map("/nonexistent/nothing.grid", DepthFileFormat::Grid).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/nothing.grid"));
    }

    #[test]
    fn malformed_inputs_produce_named_errors() {
        let dir = tempdir().unwrap();
        let grid_cases: Vec<(&str, &[u8])> = vec![
            ("empty.grid", b""),
            ("short-header.grid", b"4\n"),
            ("bad-width.grid", b"x 3\n"),
            ("extra-header.grid", b"3 3 9\n"),
            ("missing-rows.grid", b"3 3\n1 2 3\n"),
            ("short-row.grid", b"3 3\n1 2 3\n4 5\n7 8 9\n"),
            ("bad-token.grid", b"3 3\n1 2 3\n4 five 6\n7 8 9\n"),
            ("inf-token.grid", b"3 3\n1 2 3\n4 inf 6\n7 8 9\n"),
            ("trailing.grid", b"3 3\n1 2 3\n4 5 6\n7 8 9\nleftover\n"),
        ];
        for (name, content) in grid_cases {
            let path = write_fixture(&dir, name, content);
            let err = load_depth_map(&path, DepthFileFormat::Grid).unwrap_err();
            assert!(
                matches!(err, IngestError::Parse { .. }),
                "{name}: expected a parse error, got {err}"
            );
            assert!(err.to_string().contains(name), "{name}: {err}");
        }

        let too_small = write_fixture(&dir, "tiny.grid", b"2 2\n1 2\n3 4\n");
        assert!(matches!(
            load_depth_map(&too_small, DepthFileFormat::Grid).unwrap_err(),
            IngestError::Map { .. }
        ));

        let pgm_cases: Vec<(&str, Vec<u8>)> = vec![
            ("bad-magic.pgm", b"P2\n3 3\n65535\n".to_vec()),
            ("eight-bit.pgm", b"P5\n3 3\n255\nxxxxxxxxx".to_vec()),
            ("no-header.pgm", b"P5\n".to_vec()),
            ("truncated.pgm", {
                let mut v = b"P5\n3 3\n65535\n".to_vec();
                v.extend_from_slice(&[0, 1, 0, 2]);
                v
            }),
        ];
        for (name, content) in pgm_cases {
            let path = write_fixture(&dir, name, &content);
            let err = load_depth_map(&path, DepthFileFormat::Pgm16).unwrap_err();
            assert!(
                matches!(err, IngestError::Format { .. }),
                "{name}: expected a format error, got {err}"
            );
        }

        let xyz_cases: Vec<(&str, &[u8])> = vec![
            ("two-fields.xyz", b"1 2\n"),
            ("float-coord.xyz", b"1.5 2 3\n0 0 1\n0 4 1\n4 0 1\n4 4 1\n"),
            ("negative-coord.xyz", b"-1 2 3\n0 0 1\n0 4 1\n4 0 1\n4 4 1\n"),
            ("bad-z.xyz", b"1 2 zzz\n"),
        ];
        for (name, content) in xyz_cases {
            let path = write_fixture(&dir, name, content);
            let err = load_depth_map(&path, DepthFileFormat::Xyz).unwrap_err();
            assert!(
                matches!(err, IngestError::Parse { .. }),
                "{name}: expected a parse error, got {err}"
            );
        }
        let dup = write_fixture(&dir, "dup.xyz", b"0 0 1\n0 4 1\n4 0 1\n4 4 1\n0 0 2\n");
        match load_depth_map(&dup, DepthFileFormat::Xyz).unwrap_err() {
            IngestError::DuplicateCell { line, x, y, .. } => {
                assert_eq!((line, x, y), (5, 0, 0));
            }
            other => panic!("expected duplicate cell, got {other}"),
        }
        let empty = write_fixture(&dir, "empty.xyz", b"\n\n");
        assert!(matches!(
            load_depth_map(&empty, DepthFileFormat::Xyz).unwrap_err(),
            IngestError::Format { .. }
        ));
        let sliver = write_fixture(&dir, "sliver.xyz", b"0 0 1\n1 0 1\n");
        assert!(matches!(
            load_depth_map(&sliver, DepthFileFormat::Xyz).unwrap_err(),
            IngestError::Map { .. }
        ));

        let lm_cases: Vec<(&str, &[u8])> = vec![
            ("no-eq.landmark", b"row 3\n"),
            ("bad-row.landmark", b"row=x\ncol=1\nx=1\ny=1\nz=1\nscore=1\n"),
            ("dup-key.landmark", b"row=1\nrow=2\ncol=1\nx=1\ny=1\nz=1\nscore=1\n"),
            ("unknown-key.landmark", b"row=1\ncol=1\nx=1\ny=1\nz=1\nscore=1\nwat=9\n"),
        ];
        for (name, content) in lm_cases {
            let path = write_fixture(&dir, name, content);
            let err = load_landmark(&path).unwrap_err();
            assert!(
                matches!(err, IngestError::Parse { .. }),
                "{name}: expected a parse error, got {err}"
            );
        }
        let missing = write_fixture(&dir, "missing.landmark", b"row=1\ncol=1\nx=1\ny=1\nz=1\n");
        assert!(matches!(
            load_landmark(&missing).unwrap_err(),
            IngestError::Format { .. }
        ));
    }

    #[test]
    fn format_names_parse_and_print() {
        for (text, format) in [
            ("pgm16", DepthFileFormat::Pgm16),
            ("GRID", DepthFileFormat::Grid),
            ("xyz", DepthFileFormat::Xyz),
        ] {
            assert_eq!(text.parse::<DepthFileFormat>().unwrap(), format);
        }
        assert!("tiff".parse::<DepthFileFormat>().is_err());
        assert_eq!(
            DepthFileFormat::from_path(Path::new("a/b/map.PGM")),
            Some(DepthFileFormat::Pgm16)
        );
        assert_eq!(
            DepthFileFormat::from_path(Path::new("m.xyz")),
            Some(DepthFileFormat::Xyz)
        );
        assert_eq!(DepthFileFormat::from_path(Path::new("m.bin")), None);
    }

    proptest! {
        #[test]
        fn grid_save_load_is_identity(
            width in 3usize..9,
            height in 3usize..9,
            seed_depths in proptest::collection::vec(-1e6f64..1e6, 81),
            seed_valid in proptest::collection::vec(proptest::bool::ANY, 81),
        ) {
            let map = DepthMap::from_fn(width, height, |row, col| {
                let i = row * width + col;
                seed_valid[i].then_some(seed_depths[i])
            }).unwrap();
            let dir = tempdir().unwrap();
            let path = dir.path().join("p.grid");
            save_depth_map(&map, &path, DepthFileFormat::Grid).unwrap();
            let loaded = load_depth_map(&path, DepthFileFormat::Grid).unwrap();
            prop_assert_eq!(&loaded, &map);
            let again = dir.path().join("q.grid");
            save_depth_map(&loaded, &again, DepthFileFormat::Grid).unwrap();
            prop_assert_eq!(fs::read(&path).unwrap(), fs::read(&again).unwrap());
        }

        #[test]
        fn xyz_save_load_is_identity_with_pinned_corners(
            width in 3usize..9,
            height in 3usize..9,
            seed_depths in proptest::collection::vec(-1e6f64..1e6, 81),
            seed_valid in proptest::collection::vec(proptest::bool::ANY, 81),
        ) {
            let map = DepthMap::from_fn(width, height, |row, col| {
                let corner = (row == 0 || row == height - 1) && (col == 0 || col == width - 1);
                let i = row * width + col;
                (corner || seed_valid[i]).then_some(seed_depths[i])
            }).unwrap();
            let dir = tempdir().unwrap();
            let path = dir.path().join("p.xyz");
            save_depth_map(&map, &path, DepthFileFormat::Xyz).unwrap();
            let loaded = load_depth_map(&path, DepthFileFormat::Xyz).unwrap();
            prop_assert_eq!(&loaded, &map);
        }
    }
}
