//! Self-checks run by the `verify` command: engine agreement, weak and
//! strong limits, anomaly boundary, two-qubit non-negativity and the SLM
//! grating calibration.

use crate::experiments::{
    default_sigma, find_zero_crossing, run_sweep, Engines, Scenario, ScenarioKind, SweepSpec,
};
use crate::grid::{discrete_means, GridSpec, PolarizedField, SLM_MM_PER_UNIT};
use crate::pointer::{anomaly_threshold, closed_form_sequential, Axis};
use crate::qubit::{sequential_weak_value, Observable, QubitState};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    /// 256 x 256 grids and a 1e-2 mm^2 engine tolerance.
    pub fast: bool,
    /// Calibration used when driving the SLM grating; replace to exercise
    /// the calibration check as a negative control.
    pub slm_mm_per_unit: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            fast: false,
            slm_mm_per_unit: SLM_MM_PER_UNIT,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn outcome(name: &'static str, passed: bool, detail: String) -> CheckOutcome {
    CheckOutcome {
        name,
        passed,
        detail,
    }
}

fn engine_equivalence(opts: &VerifyOptions, sigma: f64) -> CheckOutcome {
    let name = "engine-equivalence";
    let (grid, joint_tol) = if opts.fast {
        (GridSpec::new(256, 256, 13.5).expect("valid grid"), 1e-2)
    } else {
        (GridSpec::camera(), 1e-4)
    };
    let spec = SweepSpec {
        scenario: Scenario::new(ScenarioKind::SequentialSingleQubit, sigma),
        delta_start: 0.0,
        delta_end: 0.711,
        steps: if opts.fast { 5 } else { 15 },
        engines: Engines::BOTH,
        grid,
    };
    match run_sweep(&spec) {
        Ok(records) => {
            let (mut marg, mut joint) = (0.0f64, 0.0f64);
            for r in &records {
                let (a, g) = (r.analytic.unwrap(), r.grid.unwrap());
                marg = marg
                    .max((a.x_mean - g.x_mean).abs())
                    .max((a.y_mean - g.y_mean).abs());
                joint = joint.max((a.xy_mean - g.xy_mean).abs());
            }
            outcome(
                name,
                marg <= 1e-3 && joint <= joint_tol,
                format!("max |dx|,|dy| = {marg:.2e} mm, max |dxy| = {joint:.2e} mm^2"),
            )
        }
        Err(e) => outcome(name, false, e.to_string()),
    }
}

fn weak_limit(sigma: f64) -> CheckOutcome {
    let deltas = [1e-4, 2e-4, 3e-4, 4e-4, 5e-4];
    let (num, den) = deltas.iter().fold((0.0, 0.0), |(n, d), &x| {
        (
            n + closed_form_sequential(x, sigma).xy_mean * x * x,
            d + x.powi(4),
        )
    });
    let slope = num / den;
    let wv = sequential_weak_value(
        &QubitState::a1(),
        &Observable::projector(&QubitState::h()),
        &Observable::projector(&QubitState::a2()),
    )
    .value
    .re;
    outcome(
        "weak-limit",
        (slope - wv).abs() <= 0.02 * wv.abs() && (slope + 0.125).abs() <= 0.0025,
        format!("xy/delta^2 = {slope:.6}, weak value = {wv:.6}"),
    )
}

fn strong_limit(sigma: f64) -> CheckOutcome {
    let d = 10.0 * sigma;
    let ratio = closed_form_sequential(d, sigma).xy_mean / (d * d);
    outcome(
        "strong-limit",
        (ratio - 0.0625).abs() <= 0.005 * 0.0625,
        format!("xy/delta^2 = {ratio:.6}"),
    )
}

fn threshold(sigma: f64) -> CheckOutcome {
    let scenario = Scenario::new(ScenarioKind::SequentialSingleQubit, sigma);
    let records = run_sweep(&SweepSpec::standard(scenario));
    match records.and_then(|r| find_zero_crossing(&r, &scenario)) {
        Ok(z) => outcome(
            "anomaly-threshold",
            (z - anomaly_threshold(sigma)).abs() <= 1e-8 && (z - 0.331).abs() <= 1e-3,
            format!("zero crossing at {z:.6} mm"),
        ),
        Err(e) => outcome("anomaly-threshold", false, e.to_string()),
    }
}

fn two_qubit(sigma: f64) -> CheckOutcome {
    let scenario = Scenario::new(ScenarioKind::TwoQubitProduct, sigma);
    let mut spec = SweepSpec::standard(scenario);
    spec.delta_end = 20.0 * sigma;
    spec.steps = 101;
    match run_sweep(&spec) {
        Ok(records) => {
            let worst = records
                .iter()
                .map(|r| r.analytic.unwrap().xy_mean)
                .fold(f64::INFINITY, f64::min);
            outcome(
                "two-qubit-non-negative",
                worst >= 0.0,
                format!("min xy = {worst:.3e} mm^2"),
            )
        }
        Err(e) => outcome("two-qubit-non-negative", false, e.to_string()),
    }
}

fn slm_calibration(opts: &VerifyOptions, sigma: f64) -> CheckOutcome {
    let name = "slm-calibration";
    let grid = if opts.fast {
        GridSpec::new(256, 256, 13.5).expect("valid grid")
    } else {
        GridSpec::camera()
    };
    let alpha = 10;
    let expected = SLM_MM_PER_UNIT * alpha as f64;
    let run = || -> crate::Result<f64> {
        let field = PolarizedField::gaussian(grid, sigma, &QubitState::h())?
            .fourier_lens()
            .apply_slm_mask_calibrated(alpha, Axis::X, opts.slm_mm_per_unit)?
            .inverse_fourier_lens();
        Ok(discrete_means(&field.intensity()?)?.x_mean)
    };
    match run() {
        Ok(x) => outcome(
            name,
            (x - expected).abs() <= 1e-6,
            format!("alpha = {alpha}: shift {x:.6} mm, expected {expected:.6} mm"),
        ),
        Err(e) => outcome(name, false, e.to_string()),
    }
}

/// Runs every check and returns one outcome per check, in a fixed order.
pub fn run_checks(opts: &VerifyOptions) -> Vec<CheckOutcome> {
    let sigma = default_sigma();
    vec![
        engine_equivalence(opts, sigma),
        weak_limit(sigma),
        strong_limit(sigma),
        threshold(sigma),
        two_qubit(sigma),
        slm_calibration(opts, sigma),
    ]
}
