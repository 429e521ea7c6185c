use std::path::PathBuf;

use clap::Args;
use num_complex::Complex64;
use seqweak::experiments::{
    default_sigma, find_zero_crossing, metadata, run_sweep, write_csv_file, Engines, Scenario,
    ScenarioKind, SweepSpec,
};
use seqweak::grid::{
    discrete_means, render_pgm, sequential_train, write_raw, GridSpec, SLM_MM_PER_UNIT,
};
use seqweak::qubit::{sequential_weak_value, weak_value, Observable, QubitState, WeakValueResult};
use seqweak::verify::{run_checks, VerifyOptions};
use seqweak::Error;

use crate::config::ConfigFile;
use crate::parse::{self, DeltaRange};
use crate::CliError;

const DEFAULT_PIXEL_MM: f64 = 0.0135;
const DEFAULT_GRID: (usize, usize) = (1024, 1024);
const DEFAULT_PREP_DEG: f64 = 30.0;
const DEFAULT_MID_DEG: f64 = -30.0;

/// Rounds to 12 significant digits so that representation noise such as
/// -0.12500000000000003 prints as -0.125.
fn tidy(x: f64) -> f64 {
    let r: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

fn fmt_complex(z: Complex64) -> String {
    let snap = |x: f64| {
        if x.abs() <= 1e-12 * z.norm() {
            0.0
        } else {
            tidy(x)
        }
    };
    let (re, im) = (snap(z.re), snap(z.im));
    let sign = if im < 0.0 { '-' } else { '+' };
    format!("{re}{sign}{}i", im.abs())
}

fn report(r: &WeakValueResult) -> String {
    format!(
        "value = {}  interval=[{},{}]  {}",
        fmt_complex(r.value),
        tidy(r.interval.0),
        tidy(r.interval.1),
        if r.anomalous {
            "ANOMALOUS"
        } else {
            "not anomalous"
        }
    )
}

#[derive(Debug, Args)]
pub struct WeakValueArgs {
    /// Pre-selected state: H, V, a1, a2 or a pair re+imi,re+imi.
    #[arg(long, value_parser = parse::state)]
    pub pre: QubitState,
    /// First-measured observable of a sequential pair: proj:<state> or four entries.
    #[arg(long, value_parser = parse::observable, requires = "second", conflicts_with_all = ["post", "a"])]
    pub first: Option<Observable>,
    /// Second-measured observable of a sequential pair.
    #[arg(long, value_parser = parse::observable, requires = "first")]
    pub second: Option<Observable>,
    /// Post-selected state for a standard weak value.
    #[arg(long, value_parser = parse::state, requires = "a")]
    pub post: Option<QubitState>,
    /// Observable for a standard weak value.
    #[arg(long, value_parser = parse::observable, requires = "post")]
    pub a: Option<Observable>,
}

pub fn weak_value_cmd(args: WeakValueArgs) -> Result<(), CliError> {
    let result = match (&args.first, &args.second, &args.post, &args.a) {
        (Some(first), Some(second), None, None) => sequential_weak_value(&args.pre, first, second),
        (None, None, Some(post), Some(a)) => {
            WeakValueResult::classify(weak_value(&args.pre, post, a)?, a.eigenvalues())
        }
        _ => {
            return Err(CliError::Usage(
                "weak-value needs either --first and --second, or --post and --a".into(),
            ))
        }
    };
    println!("{}", report(&result));
    Ok(())
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// sequential, two-qubit or single.
    #[arg(long, value_parser = parse_scenario)]
    pub scenario: Option<ScenarioKind>,
    /// Pointer width with unit, e.g. 0.1116mm; defaults to the width that
    /// puts the anomaly boundary at 0.331 mm.
    #[arg(long, value_parser = parse::length)]
    pub sigma: Option<f64>,
    /// start:end:steps, endpoints in mm unless suffixed.
    #[arg(long, value_parser = parse::delta_range)]
    pub delta_range: Option<DeltaRange>,
    /// analytic, grid or both.
    #[arg(long, value_parser = parse_engine)]
    pub engine: Option<Engines>,
    /// Output CSV path; metadata goes to <out>.meta.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Grid for the grid engine: N or NxM.
    #[arg(long, value_parser = parse::grid_size)]
    pub grid_size: Option<(usize, usize)>,
    /// Grid pixel pitch with unit, e.g. 13.5um.
    #[arg(long, value_parser = parse::length)]
    pub pixel: Option<f64>,
    /// Preparation half-wave plate angle, degrees.
    #[arg(long, value_parser = parse::number, allow_hyphen_values = true)]
    pub prep_hwp: Option<f64>,
    /// Half-wave plate angle between the couplings, degrees.
    #[arg(long, value_parser = parse::number, allow_hyphen_values = true)]
    pub mid_hwp: Option<f64>,
}

const SWEEP_KEYS: &[&str] = &[
    "scenario",
    "sigma",
    "delta-range",
    "engine",
    "out",
    "grid-size",
    "pixel",
    "prep-hwp",
    "mid-hwp",
];

fn parse_scenario(s: &str) -> Result<ScenarioKind, String> {
    ScenarioKind::parse(s.trim())
        .ok_or_else(|| format!("'{s}' is not one of sequential, two-qubit, single"))
}

fn parse_engine(s: &str) -> Result<Engines, String> {
    match s.trim() {
        "analytic" => Ok(Engines::ANALYTIC),
        "grid" => Ok(Engines::GRID),
        "both" => Ok(Engines::BOTH),
        other => Err(format!("'{other}' is not one of analytic, grid, both")),
    }
}

fn resolve_grid(
    cfg: &ConfigFile,
    size: Option<(usize, usize)>,
    pixel: Option<f64>,
) -> Result<GridSpec, CliError> {
    let size = cfg
        .resolve(size, "grid-size", parse::grid_size)?
        .unwrap_or(DEFAULT_GRID);
    let pixel = cfg
        .resolve(pixel, "pixel", parse::length)?
        .unwrap_or(DEFAULT_PIXEL_MM);
    parse::grid(size, pixel).map_err(|e| CliError::Usage(format!("--grid-size/--pixel: {e}")))
}

fn resolve_sigma(cfg: &ConfigFile, sigma: Option<f64>) -> Result<f64, CliError> {
    let sigma = cfg
        .resolve(sigma, "sigma", parse::length)?
        .unwrap_or_else(default_sigma);
    if sigma > 0.0 {
        Ok(sigma)
    } else {
        Err(CliError::Usage(format!(
            "--sigma must be positive, got {sigma} mm"
        )))
    }
}

pub fn sweep_cmd(args: SweepArgs, cfg: &ConfigFile) -> Result<(), CliError> {
    cfg.check_keys("sweep", SWEEP_KEYS)?;
    let kind = cfg
        .resolve(args.scenario, "scenario", parse_scenario)?
        .unwrap_or(ScenarioKind::SequentialSingleQubit);
    let engines = cfg
        .resolve(args.engine, "engine", parse_engine)?
        .unwrap_or(Engines::ANALYTIC);
    let mut scenario = Scenario::new(kind, resolve_sigma(cfg, args.sigma)?);
    if let Some(p) = cfg.resolve(args.prep_hwp, "prep-hwp", parse::number)? {
        scenario.prep_deg = p;
    }
    if let Some(m) = cfg.resolve(args.mid_hwp, "mid-hwp", parse::number)? {
        scenario.mid_deg = m;
    }
    let mut spec = SweepSpec::standard(scenario);
    spec.engines = engines;
    spec.grid = resolve_grid(cfg, args.grid_size, args.pixel)?;
    if let Some(r) = cfg.resolve(args.delta_range, "delta-range", parse::delta_range)? {
        spec.delta_start = r.start;
        spec.delta_end = r.end;
        spec.steps = r.steps;
    }
    let out = cfg
        .resolve(args.out, "out", |s| Ok(PathBuf::from(s)))?
        .ok_or_else(|| CliError::Usage("sweep requires --out".into()))?;
    spec.validate()
        .map_err(|e| CliError::Usage(format!("--delta-range: {e}")))?;

    let records = run_sweep(&spec)?;
    write_csv_file(&records, &out)?;
    let meta = sidecar(&out);
    std::fs::write(&meta, metadata(&spec)).map_err(|source| Error::Io {
        path: meta.clone(),
        source,
    })?;
    println!(
        "wrote {} rows to {} (metadata {})",
        records.len(),
        out.display(),
        meta.display()
    );
    if let Ok(z) = find_zero_crossing(&records, &spec.scenario) {
        println!("xy changes sign at delta = {z:.6} mm");
    }
    if let Some(worst) = records
        .iter()
        .filter_map(|r| r.xy_discrepancy)
        .reduce(f64::max)
    {
        println!("max |xy_grid - xy_analytic| = {worst:.3e} mm^2");
    }
    Ok(())
}

fn sidecar(out: &std::path::Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".meta");
    PathBuf::from(s)
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("coupling").required(true).args(["delta", "alpha"])))]
pub struct ImageArgs {
    /// Coupling strength with unit, e.g. 0.37mm.
    #[arg(long, value_parser = parse::length)]
    pub delta: Option<f64>,
    /// SLM grating setting; delta = 0.0237 mm per unit.
    #[arg(long)]
    pub alpha: Option<u32>,
    /// Pointer width with unit.
    #[arg(long, value_parser = parse::length)]
    pub sigma: Option<f64>,
    /// Output PGM path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also dump the floating-point intensity here.
    #[arg(long)]
    pub raw: Option<PathBuf>,
    #[arg(long, value_parser = parse::grid_size)]
    pub grid_size: Option<(usize, usize)>,
    #[arg(long, value_parser = parse::length)]
    pub pixel: Option<f64>,
    #[arg(long, value_parser = parse::number, allow_hyphen_values = true)]
    pub prep_hwp: Option<f64>,
    #[arg(long, value_parser = parse::number, allow_hyphen_values = true)]
    pub mid_hwp: Option<f64>,
}

const IMAGE_KEYS: &[&str] = &[
    "sigma",
    "out",
    "raw",
    "grid-size",
    "pixel",
    "prep-hwp",
    "mid-hwp",
];

pub fn image_cmd(args: ImageArgs, cfg: &ConfigFile) -> Result<(), CliError> {
    cfg.check_keys("image", IMAGE_KEYS)?;
    let delta = match (args.delta, args.alpha) {
        (Some(d), None) => d,
        (None, Some(a)) => SLM_MM_PER_UNIT * a as f64,
        _ => {
            return Err(CliError::Usage(
                "exactly one of --delta and --alpha is required".into(),
            ))
        }
    };
    if delta < 0.0 {
        return Err(CliError::Usage(format!(
            "--delta must be >= 0, got {delta} mm"
        )));
    }
    let sigma = resolve_sigma(cfg, args.sigma)?;
    let grid = resolve_grid(cfg, args.grid_size, args.pixel)?;
    let prep = cfg
        .resolve(args.prep_hwp, "prep-hwp", parse::number)?
        .unwrap_or(DEFAULT_PREP_DEG);
    let mid = cfg
        .resolve(args.mid_hwp, "mid-hwp", parse::number)?
        .unwrap_or(DEFAULT_MID_DEG);
    let out = cfg
        .resolve(args.out, "out", |s| Ok(PathBuf::from(s)))?
        .ok_or_else(|| CliError::Usage("image requires --out".into()))?;
    let raw = cfg.resolve(args.raw, "raw", |s| Ok(PathBuf::from(s)))?;

    let image = sequential_train(grid, sigma, delta, prep, mid)
        .and_then(|f| f.intensity())
        .map_err(|e| Error::Engine {
            delta_mm: delta,
            source: Box::new(e),
        })?;
    let write = |path: &PathBuf, bytes: Vec<u8>| {
        std::fs::write(path, bytes).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        })
    };
    write(&out, render_pgm(&image))?;
    if let Some(raw) = &raw {
        write(raw, write_raw(&image))?;
    }
    let m = discrete_means(&image)?;
    println!(
        "delta = {delta} mm  <x> = {:.6} mm  <y> = {:.6} mm  <xy> = {:.6e} mm^2",
        m.x_mean, m.y_mean, m.xy_mean
    );
    println!("wrote {}", out.display());
    Ok(())
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Use 256 x 256 grids and a 1e-2 mm^2 engine tolerance.
    #[arg(long)]
    pub fast: bool,
    /// Replaces the SLM calibration constant (negative-control hook).
    #[arg(long, hide = true, value_parser = parse::number)]
    pub slm_k: Option<f64>,
}

pub fn verify_cmd(args: VerifyArgs) -> Result<(), CliError> {
    let opts = VerifyOptions {
        fast: args.fast,
        slm_mm_per_unit: args.slm_k.unwrap_or(SLM_MM_PER_UNIT),
    };
    let results = run_checks(&opts);
    let width = results.iter().map(|r| r.name.len()).max().unwrap_or(0);
    for r in &results {
        println!(
            "{:<width$}  {}  {}",
            r.name,
            if r.passed { "PASS" } else { "FAIL" },
            r.detail
        );
    }
    match results.iter().find(|r| !r.passed) {
        Some(r) => Err(CliError::Verification(r.name.to_string())),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tidy_formatting() {
        assert_eq!(
            fmt_complex(Complex64::new(-0.12500000000000003, -0.0)),
            "-0.125+0i"
        );
        assert_eq!(fmt_complex(Complex64::new(1.0, -2.5)), "1-2.5i");
        assert_eq!(fmt_complex(Complex64::new(3.0, 1e-17)), "3+0i");
        assert_eq!(tidy(1e-20), 1e-20);
    }
}
