//! Map files: binary PGM (P5) raster plus a YAML sidecar with the metric
//! georeference, following the common robot-map convention that row 0 of
//! the image is the top of the map.
//!
//! Pixel encoding: 0 = Occupied, 254 = Free, 205 = Unknown.

use std::path::Path;

use crate::error::GridError;
use crate::grid::{CellState, OccupancyGrid};
use crate::scalar::Scalar;

pub const PIXEL_OCCUPIED: u8 = 0;
pub const PIXEL_FREE: u8 = 254;
pub const PIXEL_UNKNOWN: u8 = 205;

fn state_to_pixel(state: CellState) -> u8 {
    match state {
        CellState::Occupied => PIXEL_OCCUPIED,
        CellState::Free => PIXEL_FREE,
        CellState::Unknown => PIXEL_UNKNOWN,
    }
}

fn pixel_to_state(px: u8) -> Result<CellState, GridError> {
    match px {
        PIXEL_OCCUPIED => Ok(CellState::Occupied),
        PIXEL_FREE => Ok(CellState::Free),
        PIXEL_UNKNOWN => Ok(CellState::Unknown),
        other => Err(GridError::MalformedMap(format!(
            "unexpected pixel value {other}"
        ))),
    }
}

/// Serializes the raster to P5 bytes (top row first).
pub fn to_pgm_bytes<S: Scalar>(grid: &OccupancyGrid<S>) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", grid.width, grid.height).into_bytes();
    out.reserve(grid.width * grid.height);
    for iy in (0..grid.height).rev() {
        for ix in 0..grid.width {
            out.push(state_to_pixel(grid.state(ix, iy)));
        }
    }
    out
}

/// Serializes the georeference sidecar.
pub fn to_yaml_string<S: Scalar>(grid: &OccupancyGrid<S>) -> String {
    format!(
        "resolution: {}\norigin_x: {}\norigin_y: {}\n",
        grid.resolution, grid.origin[0], grid.origin[1]
    )
}

/// Parses P5 bytes together with the sidecar into a grid.
pub fn from_pgm_bytes<S: Scalar>(pgm: &[u8], yaml: &str) -> Result<OccupancyGrid<S>, GridError> {
    let (resolution, origin) = parse_yaml_sidecar(yaml)?;
    let (width, height, data) = parse_p5(pgm)?;
    let mut grid = OccupancyGrid::new_unknown(width, height, resolution, origin);
    for (row, chunk) in data.chunks_exact(width).enumerate() {
        let iy = height - 1 - row;
        for (ix, px) in chunk.iter().enumerate() {
            grid.set_state(ix, iy, pixel_to_state(*px)?);
        }
    }
    Ok(grid)
}

/// Writes `map.pgm` + `map.yaml` style pairs.
pub fn write_map<S: Scalar>(
    grid: &OccupancyGrid<S>,
    pgm_path: &Path,
    yaml_path: &Path,
) -> Result<(), GridError> {
    std::fs::write(pgm_path, to_pgm_bytes(grid))?;
    std::fs::write(yaml_path, to_yaml_string(grid))?;
    Ok(())
}

/// Reads a map written by [`write_map`].
pub fn read_map<S: Scalar>(pgm_path: &Path, yaml_path: &Path) -> Result<OccupancyGrid<S>, GridError> {
    let pgm = std::fs::read(pgm_path)?;
    let yaml = std::fs::read_to_string(yaml_path)?;
    from_pgm_bytes(&pgm, &yaml)
}

fn parse_yaml_sidecar<S: Scalar>(yaml: &str) -> Result<(S, [S; 2]), GridError> {
    let mut resolution = None;
    let mut origin_x = None;
    let mut origin_y = None;
    for line in yaml.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once(':').ok_or_else(|| {
            GridError::MalformedMap(format!("sidecar line without ':': '{line}'"))
        })?;
        let value: f64 = value.trim().parse().map_err(|_| {
            GridError::MalformedMap(format!("bad numeric value in sidecar: '{line}'"))
        })?;
        match key.trim() {
            "resolution" => resolution = Some(value),
            "origin_x" => origin_x = Some(value),
            "origin_y" => origin_y = Some(value),
            other => {
                return Err(GridError::MalformedMap(format!(
                    "unknown sidecar key '{other}'"
                )))
            }
        }
    }
    match (resolution, origin_x, origin_y) {
        (Some(r), Some(x), Some(y)) if r > 0.0 => {
            Ok((S::cast_f64(r), [S::cast_f64(x), S::cast_f64(y)]))
        }
        (Some(r), _, _) if r <= 0.0 => Err(GridError::MalformedMap(
            "sidecar resolution must be positive".into(),
        )),
        _ => Err(GridError::MalformedMap(
            "sidecar must define resolution, origin_x and origin_y".into(),
        )),
    }
}

fn parse_p5(bytes: &[u8]) -> Result<(usize, usize, &[u8]), GridError> {
    let mut header = [0usize; 3]; // width, height, maxval
    let mut field = 0usize;

    let magic = bytes.get(0..2).ok_or_else(|| truncated())?;
    if magic != b"P5" {
        return Err(GridError::MalformedMap("not a P5 PGM file".into()));
    }
    let mut pos = 2usize;

    while field < 3 {
        // Skip whitespace and '#' comments between header tokens.
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while let Some(b) = bytes.get(pos) {
                        pos += 1;
                        if *b == b'\n' {
                            break;
                        }
                    }
                }
                Some(_) => break,
                None => return Err(truncated()),
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(|b| b.is_ascii_digit()) {
            pos += 1;
        }
        if pos == start {
            return Err(GridError::MalformedMap("bad PGM header token".into()));
        }
        let tok = std::str::from_utf8(&bytes[start..pos]).expect("ascii digits");
        header[field] = tok
            .parse()
            .map_err(|_| GridError::MalformedMap("bad PGM header number".into()))?;
        field += 1;
    }
    // Exactly one whitespace byte separates the header from the raster.
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => return Err(truncated()),
    }

    let [width, height, maxval] = header;
    if maxval != 255 {
        return Err(GridError::MalformedMap(format!(
            "unsupported maxval {maxval}"
        )));
    }
    let expected = width
        .checked_mul(height)
        .ok_or_else(|| GridError::MalformedMap("grid dimensions overflow".into()))?;
    let data = bytes
        .get(pos..pos + expected)
        .ok_or_else(|| truncated())?;
    if bytes.len() != pos + expected {
        return Err(GridError::MalformedMap(
            "trailing bytes after raster data".into(),
        ));
    }
    Ok((width, height, data))
}

fn truncated() -> GridError {
    GridError::MalformedMap("truncated PGM file".into())
}
