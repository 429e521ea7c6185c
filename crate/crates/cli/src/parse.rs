//! Value parsers shared by flags and config-file entries.

use num_complex::Complex64;
use seqweak::grid::GridSpec;
use seqweak::qubit::{Mat2, Observable, QubitState};

/// Length with a mandatory `mm` or `um` suffix, returned in mm. A bare `0`
/// is accepted since it needs no unit.
pub fn length(s: &str) -> Result<f64, String> {
    let t = s.trim();
    let (num, scale) = if let Some(n) = t.strip_suffix("mm") {
        (n, 1.0)
    } else if let Some(n) = t.strip_suffix("um") {
        (n, 1e-3)
    } else {
        match t.parse::<f64>() {
            Ok(0.0) => return Ok(0.0),
            _ => {
                return Err(format!(
                    "'{s}' needs a unit suffix, e.g. 0.1116mm or 111.6um"
                ))
            }
        }
    };
    let v: f64 = num
        .trim()
        .parse()
        .map_err(|_| format!("'{s}' is not a number followed by mm or um"))?;
    if !v.is_finite() {
        return Err(format!("'{s}' is not finite"));
    }
    Ok(v * scale)
}

/// Length whose unit defaults to mm when omitted.
fn length_mm_default(s: &str) -> Result<f64, String> {
    let t = s.trim();
    if t.ends_with("mm") || t.ends_with("um") {
        length(t)
    } else {
        t.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| format!("'{s}' is not a length"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaRange {
    pub start: f64,
    pub end: f64,
    pub steps: usize,
}

/// `start:end:steps`; endpoints are mm unless suffixed.
pub fn delta_range(s: &str) -> Result<DeltaRange, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, n] = parts[..] else {
        return Err(format!("'{s}' is not of the form start:end:steps"));
    };
    let steps: usize = n
        .trim()
        .parse()
        .map_err(|_| format!("'{n}' is not a step count"))?;
    Ok(DeltaRange {
        start: length_mm_default(a)?,
        end: length_mm_default(b)?,
        steps,
    })
}

/// `N` for an N x N grid or `NxM` (columns x rows).
pub fn grid_size(s: &str) -> Result<(usize, usize), String> {
    let t = s.trim();
    let dims: Result<Vec<usize>, _> = t.split('x').map(|p| p.trim().parse::<usize>()).collect();
    match dims.as_deref() {
        Ok([n]) => Ok((*n, *n)),
        Ok([nx, ny]) => Ok((*nx, *ny)),
        _ => Err(format!("'{s}' is not a grid size such as 1024 or 512x256")),
    }
}

pub fn grid(size: (usize, usize), pixel_mm: f64) -> Result<GridSpec, String> {
    GridSpec::new(size.0, size.1, pixel_mm * 1e3).map_err(|e| e.to_string())
}

pub fn number(s: &str) -> Result<f64, String> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| format!("'{s}' is not a number"))
}

/// `a`, `bi`, `a+bi` or `a-bi`.
pub fn complex(s: &str) -> Result<Complex64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("'{s}' is not a complex number like 0.6+0.8i");
    let Some(body) = t.strip_suffix('i') else {
        return t
            .parse::<f64>()
            .map(|re| Complex64::new(re, 0.0))
            .map_err(|_| bad());
    };
    let split = body
        .char_indices()
        .skip(1)
        .filter(|&(i, c)| (c == '+' || c == '-') && !matches!(body.as_bytes()[i - 1], b'e' | b'E'))
        .map(|(i, _)| i)
        .last();
    let (re, im) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => "1",
        "-" => "-1",
        other => other,
    };
    let re: f64 = re.parse().map_err(|_| bad())?;
    let im: f64 = im.trim_start_matches('+').parse().map_err(|_| bad())?;
    Ok(Complex64::new(re, im))
}

/// Named state (`H`, `V`, `a1`, `a2`) or a normalized pair `c_h,c_v`.
pub fn state(s: &str) -> Result<QubitState, String> {
    if let Some(named) = QubitState::named(s.trim()) {
        return Ok(named);
    }
    let parts: Vec<&str> = s.split(',').collect();
    let [h, v] = parts[..] else {
        return Err(format!(
            "'{s}' is neither a named state (H, V, a1, a2) nor a pair re+imi,re+imi"
        ));
    };
    QubitState::new(complex(h)?, complex(v)?).map_err(|e| e.to_string())
}

/// `proj:<state>` or four comma-separated entries in row-major order.
pub fn observable(s: &str) -> Result<Observable, String> {
    if let Some(st) = s.trim().strip_prefix("proj:") {
        return Ok(Observable::projector(&state(st)?));
    }
    let entries: Result<Vec<Complex64>, String> = s.split(',').map(complex).collect();
    let entries = entries?;
    let [a, b, c, d] = entries[..] else {
        return Err(format!(
            "'{s}' is neither proj:<state> nor four matrix entries"
        ));
    };
    Observable::new(Mat2([[a, b], [c, d]])).map_err(|e| e.to_string())
}
