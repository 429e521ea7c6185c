//! Coupling-strength sweeps over the measurement scenarios, feature
//! extraction (anomaly boundary, deepest reversal) and CSV export.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{self, discrete_means, GridSpec};
use crate::numeric;
use crate::pointer::{self, DeflectionTriple, GaussianPointerSpec};

/// Zero crossing of the joint deflection used to fix the default pointer
/// width, mm.
pub const REPORTED_THRESHOLD_MM: f64 = 0.331;
/// Reported coupling of the deepest joint reversal, mm.
pub const REPORTED_EXTREMUM_MM: f64 = 0.189;
/// Default sweep range, mm.
pub const DEFAULT_DELTA_END_MM: f64 = 0.711;
pub const DEFAULT_STEPS: usize = 31;
/// Root-finding and minimization tolerance on delta, mm.
pub const DELTA_TOL_MM: f64 = 1e-9;

pub const CSV_HEADER: &str =
    "delta_mm,x_analytic_mm,y_analytic_mm,xy_analytic_mm2,x_grid_mm,y_grid_mm,xy_grid_mm2,xy_discrepancy_mm2";

/// Pointer width that puts the anomaly boundary at `delta_star`.
pub fn infer_sigma_from_threshold(delta_star: f64) -> Result<f64> {
    if !(delta_star.is_finite() && delta_star > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "threshold must be positive, got {delta_star} mm"
        )));
    }
    Ok(delta_star / (8.0 * 3f64.ln()).sqrt())
}

/// Default pointer width, derived from [`REPORTED_THRESHOLD_MM`] (≈ 0.1116 mm).
pub fn default_sigma() -> f64 {
    REPORTED_THRESHOLD_MM / (8.0 * 3f64.ln()).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    /// Two noncommuting couplings on one photon.
    SequentialSingleQubit,
    /// One coupling on each of two photons.
    TwoQubitProduct,
    /// A single x coupling.
    SingleCoupling,
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::SequentialSingleQubit => "sequential",
            ScenarioKind::TwoQubitProduct => "two-qubit",
            ScenarioKind::SingleCoupling => "single",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "sequential" => Some(ScenarioKind::SequentialSingleQubit),
            "two-qubit" => Some(ScenarioKind::TwoQubitProduct),
            "single" => Some(ScenarioKind::SingleCoupling),
            _ => None,
        }
    }
}

/// A fixed optical train plus pointer width and wave-plate angles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub kind: ScenarioKind,
    pub sigma: f64,
    pub prep_deg: f64,
    pub mid_deg: f64,
}

impl Scenario {
    /// Scenario with the standard 30 deg / -30 deg wave plates.
    pub fn new(kind: ScenarioKind, sigma: f64) -> Self {
        Self {
            kind,
            sigma,
            prep_deg: 30.0,
            mid_deg: -30.0,
        }
    }

    fn pointer(&self) -> Result<GaussianPointerSpec> {
        GaussianPointerSpec::new(self.sigma)
    }

    /// Deflections from the Gaussian-superposition calculus.
    pub fn analytic(&self, delta: f64) -> Result<DeflectionTriple> {
        let pointer = self.pointer()?;
        match self.kind {
            ScenarioKind::SequentialSingleQubit => {
                Ok(
                    pointer::propagate_sequential(pointer, delta, self.prep_deg, self.mid_deg)?
                        .moments(),
                )
            }
            ScenarioKind::TwoQubitProduct => {
                pointer::two_qubit_moments(pointer, delta, self.prep_deg, self.mid_deg)
            }
            ScenarioKind::SingleCoupling => Ok(pointer::GaussianSuperposition::prepare(
                pointer,
                &crate::qubit::QubitState::h(),
            )
            .apply_polarization(&crate::qubit::waveplate_hwp(self.prep_deg))?
            .apply_coupling(pointer::Axis::X, delta)?
            .moments()),
        }
    }

    /// Deflections from the discretized optical train.
    pub fn grid(&self, grid_spec: GridSpec, delta: f64) -> Result<DeflectionTriple> {
        let image = match self.kind {
            ScenarioKind::SequentialSingleQubit => {
                grid::sequential_train(grid_spec, self.sigma, delta, self.prep_deg, self.mid_deg)?
                    .intensity()?
            }
            ScenarioKind::TwoQubitProduct => {
                grid::two_qubit_image(grid_spec, self.sigma, delta, self.prep_deg, self.mid_deg)?
            }
            ScenarioKind::SingleCoupling => {
                grid::single_coupling_train(grid_spec, self.sigma, delta, self.prep_deg)?
                    .intensity()?
            }
        };
        discrete_means(&image)
    }

    fn analytic_xy(&self, delta: f64) -> f64 {
        self.analytic(delta).map(|t| t.xy_mean).unwrap_or(f64::NAN)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Engines {
    pub analytic: bool,
    pub grid: bool,
}

impl Engines {
    pub const ANALYTIC: Engines = Engines {
        analytic: true,
        grid: false,
    };
    pub const GRID: Engines = Engines {
        analytic: false,
        grid: true,
    };
    pub const BOTH: Engines = Engines {
        analytic: true,
        grid: true,
    };

    pub fn name(&self) -> &'static str {
        match (self.analytic, self.grid) {
            (true, true) => "analytic+grid",
            (true, false) => "analytic",
            (false, true) => "grid",
            (false, false) => "none",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub scenario: Scenario,
    pub delta_start: f64,
    pub delta_end: f64,
    pub steps: usize,
    pub engines: Engines,
    pub grid: GridSpec,
}

impl SweepSpec {
    /// Analytic sweep over the default 0..0.711 mm range.
    pub fn standard(scenario: Scenario) -> Self {
        Self {
            scenario,
            delta_start: 0.0,
            delta_end: DEFAULT_DELTA_END_MM,
            steps: DEFAULT_STEPS,
            engines: Engines::ANALYTIC,
            grid: GridSpec::camera(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if !(self.delta_start.is_finite() && self.delta_start >= 0.0) {
            return bad(format!(
                "delta_start must be >= 0, got {}",
                self.delta_start
            ));
        }
        if !(self.delta_end.is_finite() && self.delta_end > self.delta_start) {
            return bad(format!(
                "delta_end ({}) must exceed delta_start ({})",
                self.delta_end, self.delta_start
            ));
        }
        if self.steps < 2 {
            return bad(format!("steps must be >= 2, got {}", self.steps));
        }
        if !(self.engines.analytic || self.engines.grid) {
            return bad("at least one engine must be selected".into());
        }
        if !(self.scenario.sigma.is_finite() && self.scenario.sigma > 0.0) {
            return bad(format!(
                "sigma must be positive, got {}",
                self.scenario.sigma
            ));
        }
        Ok(())
    }

    /// Uniform, inclusive delta samples.
    pub fn deltas(&self) -> Vec<f64> {
        let n = self.steps;
        (0..n)
            .map(|i| {
                if i == n - 1 {
                    self.delta_end
                } else {
                    self.delta_start
                        + (self.delta_end - self.delta_start) * i as f64 / (n - 1) as f64
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRecord {
    pub delta: f64,
    pub analytic: Option<DeflectionTriple>,
    pub grid: Option<DeflectionTriple>,
    pub xy_discrepancy: Option<f64>,
}

impl SweepRecord {
    pub fn new(
        delta: f64,
        analytic: Option<DeflectionTriple>,
        grid: Option<DeflectionTriple>,
    ) -> Self {
        let xy_discrepancy = match (&analytic, &grid) {
            (Some(a), Some(g)) => Some((g.xy_mean - a.xy_mean).abs()),
            _ => None,
        };
        Self {
            delta,
            analytic,
            grid,
            xy_discrepancy,
        }
    }

    /// Analytic triple when present, otherwise the grid one.
    pub fn best(&self) -> Option<&DeflectionTriple> {
        self.analytic.as_ref().or(self.grid.as_ref())
    }
}

fn run_point(spec: &SweepSpec, delta: f64) -> Result<SweepRecord> {
    let annotate = |e: Error| Error::Engine {
        delta_mm: delta,
        source: Box::new(e),
    };
    let analytic = if spec.engines.analytic {
        Some(spec.scenario.analytic(delta).map_err(annotate)?)
    } else {
        None
    };
    let grid = if spec.engines.grid {
        Some(spec.scenario.grid(spec.grid, delta).map_err(annotate)?)
    } else {
        None
    };
    Ok(SweepRecord::new(delta, analytic, grid))
}

/// Evaluates every delta of the sweep. Points run in parallel and the
/// records come back in ascending delta.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRecord>> {
    spec.validate()?;
    spec.deltas()
        .into_par_iter()
        .map(|delta| run_point(spec, delta))
        .collect()
}

fn xy_series(records: &[SweepRecord]) -> Vec<(f64, f64)> {
    records
        .iter()
        .filter_map(|r| r.best().map(|t| (r.delta, t.xy_mean)))
        .collect()
}

/// First sign change of `<x y>` across the records, refined by bisection
/// on the scenario's analytic model.
pub fn find_zero_crossing(records: &[SweepRecord], scenario: &Scenario) -> Result<f64> {
    let series = xy_series(records);
    let bracket = series.windows(2).find(|w| {
        let (a, b) = (w[0].1, w[1].1);
        (a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0) || (a < 0.0 && b == 0.0)
    });
    let Some(w) = bracket else {
        return Err(Error::NoSignChange);
    };
    numeric::bisect(|d| scenario.analytic_xy(d), w[0].0, w[1].0, DELTA_TOL_MM)
}

/// Interior minimum of `<x y>` across the records, refined by golden-section
/// search on the scenario's analytic model between the neighbouring records.
/// Returns `(delta, xy)`.
pub fn find_extremum(records: &[SweepRecord], scenario: &Scenario) -> Result<(f64, f64)> {
    let series = xy_series(records);
    if series.len() < 3 {
        return Err(Error::NoInteriorExtremum);
    }
    let (k, _) = series
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .expect("non-empty");
    if k == 0 || k == series.len() - 1 {
        return Err(Error::NoInteriorExtremum);
    }
    let (lo, hi) = (series[k - 1].0, series[k + 1].0);
    Ok(numeric::golden_section_min(
        |d| scenario.analytic_xy(d),
        lo,
        hi,
        DELTA_TOL_MM,
    ))
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes records as CSV: fixed header, empty cells for missing engines,
/// shortest round-trip decimals, LF line endings.
pub fn export_csv<W: Write>(records: &[SweepRecord], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(CSV_HEADER.split(','))?;
    for r in records {
        let a = r.analytic.as_ref();
        let g = r.grid.as_ref();
        w.write_record([
            r.delta.to_string(),
            opt(a.map(|t| t.x_mean)),
            opt(a.map(|t| t.y_mean)),
            opt(a.map(|t| t.xy_mean)),
            opt(g.map(|t| t.x_mean)),
            opt(g.map(|t| t.y_mean)),
            opt(g.map(|t| t.xy_mean)),
            opt(r.xy_discrepancy),
        ])?;
    }
    w.flush().map_err(|e| Error::Csv(e.into()))?;
    Ok(())
}

pub fn write_csv_file(records: &[SweepRecord], path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    export_csv(records, &mut buf)?;
    fs::write(path, buf).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Parses CSV produced by [`export_csv`].
pub fn read_csv<R: std::io::Read>(input: R) -> Result<Vec<SweepRecord>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(input);
    let header = rdr.headers()?.iter().collect::<Vec<_>>().join(",");
    if header != CSV_HEADER {
        return Err(Error::Format {
            format: "CSV",
            reason: format!("unexpected header {header:?}"),
        });
    }
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let num = |i: usize| -> Result<Option<f64>> {
            let s = row.get(i).unwrap_or("");
            if s.is_empty() {
                return Ok(None);
            }
            s.parse().map(Some).map_err(|_| Error::Format {
                format: "CSV",
                reason: format!("bad number {s:?}"),
            })
        };
        let triple = |i: usize| -> Result<Option<DeflectionTriple>> {
            Ok(match (num(i)?, num(i + 1)?, num(i + 2)?) {
                (Some(x), Some(y), Some(xy)) => Some(DeflectionTriple::new(x, y, xy)),
                _ => None,
            })
        };
        let delta = num(0)?.ok_or_else(|| Error::Format {
            format: "CSV",
            reason: "missing delta".into(),
        })?;
        out.push(SweepRecord {
            delta,
            analytic: triple(1)?,
            grid: triple(4)?,
            xy_discrepancy: num(7)?,
        });
    }
    Ok(out)
}

/// `key=value` sidecar describing how a dataset was produced.
pub fn metadata(spec: &SweepSpec) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "scenario={}", spec.scenario.kind.name());
    let _ = writeln!(s, "sigma_mm={}", spec.scenario.sigma);
    let sigma_source = if spec.scenario.sigma == default_sigma() {
        "derived from anomaly threshold 0.331 mm"
    } else {
        "user supplied"
    };
    let _ = writeln!(s, "sigma_source={sigma_source}");
    let _ = writeln!(s, "prep_hwp_deg={}", spec.scenario.prep_deg);
    let _ = writeln!(s, "mid_hwp_deg={}", spec.scenario.mid_deg);
    let _ = writeln!(
        s,
        "delta_range_mm={}:{}:{}",
        spec.delta_start, spec.delta_end, spec.steps
    );
    let _ = writeln!(
        s,
        "grid={}x{}@{}um",
        spec.grid.nx(),
        spec.grid.ny(),
        spec.grid.pixel_um()
    );
    let _ = writeln!(s, "engines={}", spec.engines.name());
    let _ = writeln!(s, "tool_version={}", env!("CARGO_PKG_VERSION"));
    s
}
