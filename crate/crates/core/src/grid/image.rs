use crate::error::{Error, Result};
use crate::pointer::DeflectionTriple;

use super::GridSpec;

/// Header magic of the raw float dump.
pub const RAW_MAGIC: &[u8; 8] = b"WMGRID01";

/// Non-negative intensity samples on a grid, row-major, row 0 at the top.
#[derive(Debug, Clone, PartialEq)]
pub struct IntensityImage {
    grid: GridSpec,
    values: Vec<f64>,
}

impl IntensityImage {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "image holds {} samples, grid needs {}",
                values.len(),
                grid.len()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "intensity samples must be finite and non-negative, found {bad}"
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `sum values * pixel area`.
    pub fn total(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.pixel_area_mm2()
    }

    /// Integrated intensity inside the axis-aligned box `[x0, x1) x [y0, y1)` (mm).
    pub fn box_weight(&self, x0: f64, x1: f64, y0: f64, y1: f64) -> f64 {
        let g = &self.grid;
        let mut s = 0.0;
        for i in 0..g.ny() {
            let y = g.y_mm(i);
            if y < y0 || y >= y1 {
                continue;
            }
            let row = &self.values[i * g.nx()..(i + 1) * g.nx()];
            for (j, v) in row.iter().enumerate() {
                let x = g.x_mm(j);
                if x >= x0 && x < x1 {
                    s += v;
                }
            }
        }
        s * g.pixel_area_mm2()
    }
}

/// Intensity-weighted means of `x`, `y` and `x y` in mm from the grid centre.
pub fn discrete_means(image: &IntensityImage) -> Result<DeflectionTriple> {
    let g = &image.grid;
    let xs: Vec<f64> = (0..g.nx()).map(|j| g.x_mm(j)).collect();
    let (mut total, mut sx, mut sy, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for (i, row) in image.values.chunks_exact(g.nx()).enumerate() {
        let y = g.y_mm(i);
        let (mut r, mut rx) = (0.0, 0.0);
        for (v, x) in row.iter().zip(&xs) {
            r += v;
            rx += v * x;
        }
        total += r;
        sx += rx;
        sy += y * r;
        sxy += y * rx;
    }
    if total.is_nan() || total <= 0.0 {
        return Err(Error::EmptyImage);
    }
    Ok(DeflectionTriple::new(sx / total, sy / total, sxy / total))
}

/// Binary 16-bit PGM, samples scaled so the maximum maps to 65535.
pub fn render_pgm(image: &IntensityImage) -> Vec<u8> {
    let g = &image.grid;
    let header = format!("P5\n{} {}\n65535\n", g.nx(), g.ny());
    let mut out = Vec::with_capacity(header.len() + 2 * g.len());
    out.extend_from_slice(header.as_bytes());
    let max = image.values.iter().cloned().fold(0.0, f64::max);
    let scale = if max > 0.0 { 65535.0 / max } else { 0.0 };
    for v in &image.values {
        let q = (v * scale).round().clamp(0.0, 65535.0) as u16;
        out.extend_from_slice(&q.to_be_bytes());
    }
    out
}

fn pgm_err(reason: impl Into<String>) -> Error {
    Error::Format {
        format: "PGM",
        reason: reason.into(),
    }
}

/// Parses a 16-bit binary PGM into `(width, height, samples)`.
pub fn parse_pgm(bytes: &[u8]) -> Result<(usize, usize, Vec<u16>)> {
    let mut pos = 0;
    let mut fields = Vec::with_capacity(4);
    while fields.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos < bytes.len() && bytes[pos] == b'#' {
            while pos < bytes.len() && bytes[pos] != b'\n' {
                pos += 1;
            }
            continue;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(pgm_err("truncated header"));
        }
        fields.push(
            std::str::from_utf8(&bytes[start..pos]).map_err(|_| pgm_err("non-ASCII header"))?,
        );
    }
    if fields[0] != "P5" {
        return Err(pgm_err(format!("magic {:?}, expected P5", fields[0])));
    }
    let parse = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| pgm_err(format!("bad number {s:?}")))
    };
    let (w, h, maxval) = (parse(fields[1])?, parse(fields[2])?, parse(fields[3])?);
    if maxval != 65535 {
        return Err(pgm_err(format!("maxval {maxval}, expected 65535")));
    }
    // single whitespace byte separates the header from the raster
    pos += 1;
    let payload = bytes.get(pos..).unwrap_or(&[]);
    if payload.len() != 2 * w * h {
        return Err(pgm_err(format!(
            "payload is {} bytes, expected {}",
            payload.len(),
            2 * w * h
        )));
    }
    let samples = payload
        .chunks_exact(2)
        .map(|b| u16::from_be_bytes([b[0], b[1]]))
        .collect();
    Ok((w, h, samples))
}

/// Raw dump: `WMGRID01`, u32 nx, u32 ny, f64 pixel (um), then the samples
/// as f64, all little-endian, row-major.
pub fn write_raw(image: &IntensityImage) -> Vec<u8> {
    let g = &image.grid;
    let mut out = Vec::with_capacity(24 + 8 * g.len());
    out.extend_from_slice(RAW_MAGIC);
    out.extend_from_slice(&(g.nx() as u32).to_le_bytes());
    out.extend_from_slice(&(g.ny() as u32).to_le_bytes());
    out.extend_from_slice(&g.pixel_um().to_le_bytes());
    for v in &image.values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn read_raw(bytes: &[u8]) -> Result<IntensityImage> {
    let err = |reason: String| Error::Format {
        format: "raw grid",
        reason,
    };
    if bytes.len() < 24 || &bytes[..8] != RAW_MAGIC {
        return Err(err("missing WMGRID01 header".into()));
    }
    let nx = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    let ny = u32::from_le_bytes(bytes[12..16].try_into().unwrap()) as usize;
    let pixel = f64::from_le_bytes(bytes[16..24].try_into().unwrap());
    let grid = GridSpec::new(nx, ny, pixel)?;
    let body = &bytes[24..];
    if body.len() != 8 * grid.len() {
        return Err(err(format!(
            "body is {} bytes, expected {}",
            body.len(),
            8 * grid.len()
        )));
    }
    let values = body
        .chunks_exact(8)
        .map(|b| f64::from_le_bytes(b.try_into().unwrap()))
        .collect();
    IntensityImage::new(grid, values)
}
