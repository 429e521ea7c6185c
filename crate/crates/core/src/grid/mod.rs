//! Discretized polarized field on a uniform pixel lattice.
//!
//! Pixel `(i, j)` (row `i`, column `j`) sits at
//! `x = (j - nx/2) * pixel`, `y = (ny/2 - i) * pixel`, so row 0 is the top
//! of the image. The momentum plane uses the same layout with spacing
//! `2 pi / (n * pixel)` rad/mm.
//!
//! A Fourier lens maps the position plane to the momentum plane with the
//! kernel `exp(+i eta x)`; with that convention a phase `exp(i delta eta)`
//! applied in the momentum plane translates the field by `+delta` once it
//! is carried back by the inverse lens.

mod fft;
mod image;
mod train;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pointer::Axis;
use crate::qubit::{Mat2, QubitState};

pub use fft::{centered_dft2, KernelSign};
pub use image::{
    discrete_means, parse_pgm, read_raw, render_pgm, write_raw, IntensityImage, RAW_MAGIC,
};
pub use train::{sequential_train, single_coupling_train, two_qubit_image};

/// Grating-to-coupling calibration: shift in mm per unit of grating density.
pub const SLM_MM_PER_UNIT: f64 = 0.0237;

/// Tolerance on total field norm after unitary steps.
pub const NORM_TOL: f64 = 1e-9;

/// Pixel lattice dimensions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    nx: usize,
    ny: usize,
    pixel_um: f64,
}

impl GridSpec {
    pub fn new(nx: usize, ny: usize, pixel_um: f64) -> Result<Self> {
        for (name, n) in [("nx", nx), ("ny", ny)] {
            if !n.is_power_of_two() || n < 64 {
                return Err(Error::InvalidGrid(format!(
                    "{name} = {n} must be a power of two >= 64"
                )));
            }
        }
        if !(pixel_um.is_finite() && pixel_um > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "pixel must be positive, got {pixel_um} um"
            )));
        }
        Ok(Self { nx, ny, pixel_um })
    }

    /// 1024 x 1024 at 13.5 um, matching the camera used for the images.
    pub fn camera() -> Self {
        Self {
            nx: 1024,
            ny: 1024,
            pixel_um: 13.5,
        }
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn pixel_um(&self) -> f64 {
        self.pixel_um
    }

    pub fn pixel_mm(&self) -> f64 {
        self.pixel_um * 1e-3
    }

    pub fn pixel_area_mm2(&self) -> f64 {
        self.pixel_mm() * self.pixel_mm()
    }

    pub fn extent_mm(&self, axis: Axis) -> f64 {
        match axis {
            Axis::X => self.nx as f64 * self.pixel_mm(),
            Axis::Y => self.ny as f64 * self.pixel_mm(),
        }
    }

    pub fn x_mm(&self, j: usize) -> f64 {
        (j as f64 - (self.nx / 2) as f64) * self.pixel_mm()
    }

    pub fn y_mm(&self, i: usize) -> f64 {
        ((self.ny / 2) as f64 - i as f64) * self.pixel_mm()
    }

    /// Momentum-plane spacing along `axis`, rad/mm.
    pub fn dk(&self, axis: Axis) -> f64 {
        2.0 * std::f64::consts::PI / self.extent_mm(axis)
    }

    pub fn kx(&self, j: usize) -> f64 {
        (j as f64 - (self.nx / 2) as f64) * self.dk(Axis::X)
    }

    pub fn ky(&self, i: usize) -> f64 {
        ((self.ny / 2) as f64 - i as f64) * self.dk(Axis::Y)
    }
}

/// Which plane a field currently lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Space {
    Position,
    Momentum,
}

impl Space {
    fn name(self) -> &'static str {
        match self {
            Space::Position => "position",
            Space::Momentum => "momentum",
        }
    }

    fn toggled(self) -> Self {
        match self {
            Space::Position => Space::Momentum,
            Space::Momentum => Space::Position,
        }
    }
}

/// H and V amplitude planes of a transverse field.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarizedField {
    grid: GridSpec,
    h: Vec<Complex64>,
    v: Vec<Complex64>,
    space: Space,
}

impl PolarizedField {
    /// Centred Gaussian (intensity standard deviation `sigma_mm`) in the
    /// given polarization, normalized so that `sum |h|^2 + |v|^2` times the
    /// pixel area is one.
    pub fn gaussian(grid: GridSpec, sigma_mm: f64, polarization: &QubitState) -> Result<Self> {
        if !(sigma_mm.is_finite() && sigma_mm > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "sigma must be positive, got {sigma_mm} mm"
            )));
        }
        if sigma_mm < 4.0 * grid.pixel_mm() {
            return Err(Error::GridTooCoarse {
                sigma_mm,
                max_pixel_mm: sigma_mm / 4.0,
            });
        }
        let extent = grid.extent_mm(Axis::X).min(grid.extent_mm(Axis::Y));
        if 6.0 * sigma_mm > extent {
            return Err(Error::GridTooSmall {
                required_mm: 6.0 * sigma_mm,
                extent_mm: extent,
            });
        }
        let inv = 1.0 / (4.0 * sigma_mm * sigma_mm);
        let gx: Vec<f64> = (0..grid.nx)
            .map(|j| (-grid.x_mm(j).powi(2) * inv).exp())
            .collect();
        let gy: Vec<f64> = (0..grid.ny)
            .map(|i| (-grid.y_mm(i).powi(2) * inv).exp())
            .collect();
        let sum_x: f64 = gx.iter().map(|g| g * g).sum();
        let sum_y: f64 = gy.iter().map(|g| g * g).sum();
        let scale = 1.0 / (sum_x * sum_y * grid.pixel_area_mm2()).sqrt();

        let mut h = Vec::with_capacity(grid.len());
        let mut v = Vec::with_capacity(grid.len());
        for &ay in &gy {
            for &ax in &gx {
                let a = ax * ay * scale;
                h.push(polarization.amp_h() * a);
                v.push(polarization.amp_v() * a);
            }
        }
        Ok(Self {
            grid,
            h,
            v,
            space: Space::Position,
        })
    }

    /// Wraps raw amplitude planes; both must hold `nx * ny` samples.
    pub fn from_planes(
        grid: GridSpec,
        h: Vec<Complex64>,
        v: Vec<Complex64>,
        space: Space,
    ) -> Result<Self> {
        if h.len() != grid.len() || v.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "planes hold {} and {} samples, grid needs {}",
                h.len(),
                v.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, h, v, space })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn h_plane(&self) -> &[Complex64] {
        &self.h
    }

    pub fn v_plane(&self) -> &[Complex64] {
        &self.v
    }

    /// `sum (|h|^2 + |v|^2) * pixel area`.
    pub fn norm(&self) -> f64 {
        let s: f64 = self
            .h
            .iter()
            .chain(self.v.iter())
            .map(|a| a.norm_sqr())
            .sum();
        s * self.grid.pixel_area_mm2()
    }

    /// Largest per-sample amplitude difference over both planes.
    pub fn max_abs_diff(&self, other: &PolarizedField) -> f64 {
        self.h
            .iter()
            .zip(&other.h)
            .chain(self.v.iter().zip(&other.v))
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn require(&self, expected: Space) -> Result<()> {
        if self.space == expected {
            Ok(())
        } else {
            Err(Error::WrongSpace {
                expected: expected.name(),
                actual: self.space.name(),
            })
        }
    }

    fn transform(mut self, sign: KernelSign) -> Self {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        centered_dft2(&mut self.h, nx, ny, sign);
        centered_dft2(&mut self.v, nx, ny, sign);
        self.space = self.space.toggled();
        self
    }

    /// Optical Fourier transform by a lens: centred unitary DFT with kernel
    /// `exp(+i eta x)` on both planes. Two applications invert the
    /// coordinates; four are the identity.
    pub fn fourier_lens(self) -> Self {
        self.transform(KernelSign::Positive)
    }

    /// Inverse of [`fourier_lens`](Self::fourier_lens): carries a
    /// momentum-plane field back to an upright position-plane image.
    pub fn inverse_fourier_lens(self) -> Self {
        self.transform(KernelSign::Negative)
    }

    /// Linear phase `exp(i delta eta)` on the H plane in the momentum plane,
    /// i.e. an ideal blazed grating whose first order shifts H by `delta`.
    pub fn apply_slm_phase(mut self, delta_mm: f64, axis: Axis) -> Result<Self> {
        self.require(Space::Momentum)?;
        let limit = self.grid.extent_mm(axis) / 2.0;
        if !delta_mm.is_finite() || delta_mm.abs() * self.grid.dk(axis) >= std::f64::consts::PI {
            return Err(Error::AliasingRisk {
                delta_mm,
                limit_mm: limit,
            });
        }
        let grid = self.grid;
        match axis {
            Axis::X => {
                let ramp: Vec<Complex64> = (0..grid.nx)
                    .map(|j| Complex64::from_polar(1.0, delta_mm * grid.kx(j)))
                    .collect();
                for row in self.h.chunks_exact_mut(grid.nx) {
                    for (a, r) in row.iter_mut().zip(&ramp) {
                        *a *= r;
                    }
                }
            }
            Axis::Y => {
                for (i, row) in self.h.chunks_exact_mut(grid.nx).enumerate() {
                    let r = Complex64::from_polar(1.0, delta_mm * grid.ky(i));
                    for a in row.iter_mut() {
                        *a *= r;
                    }
                }
            }
        }
        Ok(self)
    }

    /// SLM grating of integer density `alpha`, converted to a shift with
    /// `calibration_mm` per unit (normally [`SLM_MM_PER_UNIT`]).
    pub fn apply_slm_mask_calibrated(
        self,
        alpha: u32,
        axis: Axis,
        calibration_mm: f64,
    ) -> Result<Self> {
        self.apply_slm_phase(calibration_mm * alpha as f64, axis)
    }

    pub fn apply_slm_mask(self, alpha: u32, axis: Axis) -> Result<Self> {
        self.apply_slm_mask_calibrated(alpha, axis, SLM_MM_PER_UNIT)
    }

    /// `exp(-i delta p (x) |H><H|)` on a position-plane field: the H
    /// component moves by `+delta` along `axis` via a spectral phase ramp.
    pub fn apply_conditional_shift(self, delta_mm: f64, axis: Axis) -> Result<Self> {
        self.require(Space::Position)?;
        let limit = self.grid.extent_mm(axis) / 4.0;
        if !delta_mm.is_finite() || delta_mm.abs() >= limit {
            return Err(Error::ShiftTooLarge {
                delta_mm,
                limit_mm: limit,
            });
        }
        if delta_mm == 0.0 {
            return Ok(self);
        }
        Ok(self
            .fourier_lens()
            .apply_slm_phase(delta_mm, axis)?
            .inverse_fourier_lens())
    }

    /// Pixel-wise polarization transform `(h, v) -> u (h, v)`.
    pub fn apply_polarization_unitary(mut self, u: &Mat2) -> Result<Self> {
        u.check_unitary()?;
        for (h, v) in self.h.iter_mut().zip(self.v.iter_mut()) {
            let [nh, nv] = u.apply([*h, *v]);
            *h = nh;
            *v = nv;
        }
        Ok(self)
    }

    /// Polarization-traced intensity `|h|^2 + |v|^2`, as recorded by a
    /// camera with no polarizer in front of it.
    pub fn intensity(&self) -> Result<IntensityImage> {
        self.require(Space::Position)?;
        let values = self
            .h
            .iter()
            .zip(&self.v)
            .map(|(h, v)| h.norm_sqr() + v.norm_sqr())
            .collect();
        IntensityImage::new(self.grid, values)
    }
}
