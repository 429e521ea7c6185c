//! Complete optical trains: wave plates, Fourier lenses and SLM gratings.
//!
//! Each coupling stage is a lens, a grating on the SLM and a returning lens.
//! The returning lens is modelled as the inverse transform so the image
//! stays upright between stages; with two forward transforms the first
//! stage's deflection would be mirrored by the second relay.

use crate::error::Result;
use crate::pointer::Axis;
use crate::qubit::{waveplate_hwp, QubitState};

use super::{GridSpec, IntensityImage, PolarizedField};

fn coupling_stage(field: PolarizedField, delta: f64, axis: Axis) -> Result<PolarizedField> {
    Ok(field
        .fourier_lens()
        .apply_slm_phase(delta, axis)?
        .inverse_fourier_lens())
}

/// HWP(prep) -> lens -> SLM-x -> lens -> HWP(mid) -> lens -> SLM-y -> lens,
/// starting from an H-polarized Gaussian.
pub fn sequential_train(
    grid: GridSpec,
    sigma: f64,
    delta: f64,
    prep_deg: f64,
    mid_deg: f64,
) -> Result<PolarizedField> {
    let field = PolarizedField::gaussian(grid, sigma, &QubitState::h())?
        .apply_polarization_unitary(&waveplate_hwp(prep_deg))?;
    let field = coupling_stage(field, delta, Axis::X)?
        .apply_polarization_unitary(&waveplate_hwp(mid_deg))?;
    coupling_stage(field, delta, Axis::Y)
}

/// HWP(prep) -> lens -> SLM-x -> lens.
pub fn single_coupling_train(
    grid: GridSpec,
    sigma: f64,
    delta: f64,
    prep_deg: f64,
) -> Result<PolarizedField> {
    let field = PolarizedField::gaussian(grid, sigma, &QubitState::h())?
        .apply_polarization_unitary(&waveplate_hwp(prep_deg))?;
    coupling_stage(field, delta, Axis::X)
}

/// Joint detection image for two photons measured separately: photon A is
/// coupled along x (then rotated by HWP(mid)), photon B along y. The joint
/// distribution of `(x_A, y_B)` is the outer product of the two marginals.
pub fn two_qubit_image(
    grid: GridSpec,
    sigma: f64,
    delta: f64,
    prep_deg: f64,
    mid_deg: f64,
) -> Result<IntensityImage> {
    let a = single_coupling_train(grid, sigma, delta, prep_deg)?
        .apply_polarization_unitary(&waveplate_hwp(mid_deg))?
        .intensity()?;
    let b = PolarizedField::gaussian(grid, sigma, &QubitState::h())?
        .apply_polarization_unitary(&waveplate_hwp(prep_deg))?;
    let b = coupling_stage(b, delta, Axis::Y)?.intensity()?;

    let (nx, ny) = (grid.nx(), grid.ny());
    let p = grid.pixel_mm();
    let mut marginal_x = vec![0.0; nx];
    for row in a.values().chunks_exact(nx) {
        for (m, v) in marginal_x.iter_mut().zip(row) {
            *m += v * p;
        }
    }
    let marginal_y: Vec<f64> = b
        .values()
        .chunks_exact(nx)
        .map(|row| row.iter().sum::<f64>() * p)
        .collect();
    let mut values = Vec::with_capacity(nx * ny);
    for py in &marginal_y {
        values.extend(marginal_x.iter().map(|px| px * py));
    }
    IntensityImage::new(grid, values)
}
