//! Exact pointer dynamics for Gaussian pointers.
//!
//! A pointer state is a finite superposition of shifted 2-D Gaussians, each
//! tagged with a polarization. Couplings shift the H-tagged terms, wave
//! plates mix polarizations, and position moments follow from two Gaussian
//! integral kernels. The closed-form deflection formulas live alongside the
//! calculus so each can check the other.
//!
//! Width convention: the amplitude is `phi(x) ~ exp(-x^2 / (4 sigma^2))`, so
//! `sigma` is the standard deviation of the intensity `|phi|^2` and two
//! Gaussians shifted by `d` overlap as `exp(-d^2 / (8 sigma^2))`. Lengths are
//! in millimetres.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numeric;
use crate::qubit::{waveplate_hwp, Mat2, QubitState};

/// Shifts closer than this (mm) are treated as the same Gaussian.
pub const MERGE_TOL_MM: f64 = 1e-12;

/// Pointer axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarization {
    H,
    V,
}

impl Polarization {
    fn index(self) -> usize {
        match self {
            Polarization::H => 0,
            Polarization::V => 1,
        }
    }

    fn from_index(i: usize) -> Self {
        if i == 0 {
            Polarization::H
        } else {
            Polarization::V
        }
    }
}

/// Gaussian pointer width: standard deviation of the intensity profile, mm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPointerSpec {
    sigma: f64,
}

impl GaussianPointerSpec {
    pub fn new(sigma_mm: f64) -> Result<Self> {
        if !(sigma_mm.is_finite() && sigma_mm > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "sigma must be positive, got {sigma_mm} mm"
            )));
        }
        Ok(Self { sigma: sigma_mm })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

/// `<phi_a|phi_b>` for unit-norm Gaussians centred at `a` and `b`.
pub fn overlap(a_shift: f64, b_shift: f64, sigma: f64) -> f64 {
    let d = a_shift - b_shift;
    (-d * d / (8.0 * sigma * sigma)).exp()
}

/// `<phi_a|x|phi_b>` for unit-norm Gaussians centred at `a` and `b`.
pub fn first_moment(a_shift: f64, b_shift: f64, sigma: f64) -> f64 {
    0.5 * (a_shift + b_shift) * overlap(a_shift, b_shift, sigma)
}

/// Position means of a pointer: `<x>`, `<y>` (mm) and `<x y>` (mm^2).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DeflectionTriple {
    pub x_mean: f64,
    pub y_mean: f64,
    pub xy_mean: f64,
}

impl DeflectionTriple {
    pub fn new(x_mean: f64, y_mean: f64, xy_mean: f64) -> Self {
        Self {
            x_mean,
            y_mean,
            xy_mean,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.x_mean.is_finite() && self.y_mean.is_finite() && self.xy_mean.is_finite()
    }

    /// Largest absolute difference over the three components.
    pub fn max_abs_diff(&self, other: &DeflectionTriple) -> f64 {
        (self.x_mean - other.x_mean)
            .abs()
            .max((self.y_mean - other.y_mean).abs())
            .max((self.xy_mean - other.xy_mean).abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianTerm {
    pub coeff: Complex64,
    pub shift_x: f64,
    pub shift_y: f64,
    pub pol: Polarization,
}

/// Superposition of shifted Gaussian pointer amplitudes, each carrying a
/// definite polarization.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianSuperposition {
    pointer: GaussianPointerSpec,
    terms: Vec<GaussianTerm>,
}

impl GaussianSuperposition {
    /// Centred Gaussian pointer in the given polarization state.
    pub fn prepare(pointer: GaussianPointerSpec, polarization: &QubitState) -> Self {
        let mut state = Self {
            pointer,
            terms: vec![
                GaussianTerm {
                    coeff: polarization.amp_h(),
                    shift_x: 0.0,
                    shift_y: 0.0,
                    pol: Polarization::H,
                },
                GaussianTerm {
                    coeff: polarization.amp_v(),
                    shift_x: 0.0,
                    shift_y: 0.0,
                    pol: Polarization::V,
                },
            ],
        };
        state.terms.retain(|t| t.coeff != Complex64::new(0.0, 0.0));
        state
    }

    pub fn from_terms(pointer: GaussianPointerSpec, terms: Vec<GaussianTerm>) -> Self {
        let mut state = Self { pointer, terms };
        state.merge();
        state
    }

    pub fn pointer(&self) -> GaussianPointerSpec {
        self.pointer
    }

    pub fn terms(&self) -> &[GaussianTerm] {
        &self.terms
    }

    /// Von Neumann coupling `exp(-i delta p (x) |H><H|)`: every H term moves
    /// by `+delta` along `axis`.
    pub fn apply_coupling(&self, axis: Axis, delta: f64) -> Result<Self> {
        if !(delta.is_finite() && delta >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "coupling strength must be >= 0, got {delta} mm"
            )));
        }
        let mut out = self.clone();
        for t in out.terms.iter_mut().filter(|t| t.pol == Polarization::H) {
            match axis {
                Axis::X => t.shift_x += delta,
                Axis::Y => t.shift_y += delta,
            }
        }
        out.merge();
        Ok(out)
    }

    /// Applies a 2x2 polarization unitary to every term, merging terms that
    /// land on the same Gaussian and polarization.
    pub fn apply_polarization(&self, u: &Mat2) -> Result<Self> {
        u.check_unitary()?;
        let mut terms = Vec::with_capacity(2 * self.terms.len());
        for t in &self.terms {
            let col = t.pol.index();
            for row in 0..2 {
                terms.push(GaussianTerm {
                    coeff: t.coeff * u.0[row][col],
                    pol: Polarization::from_index(row),
                    ..*t
                });
            }
        }
        Ok(Self::from_terms(self.pointer, terms))
    }

    fn merge(&mut self) {
        let mut merged: Vec<GaussianTerm> = Vec::with_capacity(self.terms.len());
        for t in self.terms.drain(..) {
            match merged.iter_mut().find(|m| {
                m.pol == t.pol
                    && (m.shift_x - t.shift_x).abs() <= MERGE_TOL_MM
                    && (m.shift_y - t.shift_y).abs() <= MERGE_TOL_MM
            }) {
                Some(m) => m.coeff += t.coeff,
                None => merged.push(t),
            }
        }
        merged.retain(|t| t.coeff != Complex64::new(0.0, 0.0));
        self.terms = merged;
    }

    /// Pairwise sum `sum_ij conj(c_i) c_j K(i, j)` over same-polarization pairs.
    fn pair_sum<K: Fn(&GaussianTerm, &GaussianTerm) -> f64>(&self, kernel: K) -> f64 {
        let mut total = Complex64::new(0.0, 0.0);
        for a in &self.terms {
            for b in self.terms.iter().filter(|b| b.pol == a.pol) {
                total += a.coeff.conj() * b.coeff * kernel(a, b);
            }
        }
        total.re
    }

    /// `<Psi|Psi>`.
    pub fn norm_sqr(&self) -> f64 {
        let s = self.pointer.sigma;
        self.pair_sum(|a, b| overlap(a.shift_x, b.shift_x, s) * overlap(a.shift_y, b.shift_y, s))
    }

    /// `<x>`, `<y>` and `<x y>` of the pointer, traced over polarization.
    pub fn moments(&self) -> DeflectionTriple {
        let s = self.pointer.sigma;
        let norm = self.norm_sqr();
        let x = self.pair_sum(|a, b| {
            first_moment(a.shift_x, b.shift_x, s) * overlap(a.shift_y, b.shift_y, s)
        });
        let y = self.pair_sum(|a, b| {
            overlap(a.shift_x, b.shift_x, s) * first_moment(a.shift_y, b.shift_y, s)
        });
        let xy = self.pair_sum(|a, b| {
            first_moment(a.shift_x, b.shift_x, s) * first_moment(a.shift_y, b.shift_y, s)
        });
        DeflectionTriple::new(x / norm, y / norm, xy / norm)
    }
}

/// Single-qubit sequential measurement: prepare with a wave plate at
/// `prep_deg` from `|H>`, couple along x, rotate with a wave plate at
/// `mid_deg`, couple along y.
pub fn propagate_sequential(
    pointer: GaussianPointerSpec,
    delta: f64,
    prep_deg: f64,
    mid_deg: f64,
) -> Result<GaussianSuperposition> {
    GaussianSuperposition::prepare(pointer, &QubitState::h())
        .apply_polarization(&waveplate_hwp(prep_deg))?
        .apply_coupling(Axis::X, delta)?
        .apply_polarization(&waveplate_hwp(mid_deg))?
        .apply_coupling(Axis::Y, delta)
}

/// Two-particle measurement on a product state: particle A carries the
/// x pointer (prepare, couple along x, rotate at `mid_deg`), particle B the
/// y pointer (prepare, couple along y). Returns `<x_A>`, `<y_B>` and
/// `<x_A y_B>`.
pub fn two_qubit_moments(
    pointer: GaussianPointerSpec,
    delta: f64,
    prep_deg: f64,
    mid_deg: f64,
) -> Result<DeflectionTriple> {
    let start = GaussianSuperposition::prepare(pointer, &QubitState::h())
        .apply_polarization(&waveplate_hwp(prep_deg))?;
    let a = start
        .apply_coupling(Axis::X, delta)?
        .apply_polarization(&waveplate_hwp(mid_deg))?;
    let b = start.apply_coupling(Axis::Y, delta)?;
    let x = a.moments().x_mean;
    let y = b.moments().y_mean;
    Ok(DeflectionTriple::new(x, y, x * y))
}

/// Deflections after the single-qubit sequential measurement with the
/// standard `|a1>` preparation and `-30 deg` intermediate wave plate.
pub fn closed_form_sequential(delta: f64, sigma: f64) -> DeflectionTriple {
    let e = (-delta * delta / (8.0 * sigma * sigma)).exp();
    DeflectionTriple::new(
        delta / 4.0,
        delta / 8.0 * (5.0 - 3.0 * e),
        delta * delta / 16.0 * (1.0 - 3.0 * e),
    )
}

/// Deflections for two commuting measurements on separate qubits.
pub fn closed_form_two_qubit(delta: f64) -> DeflectionTriple {
    DeflectionTriple::new(delta / 4.0, delta / 4.0, delta * delta / 16.0)
}

/// Coupling strength at which `<x y>` of the sequential scenario changes
/// sign: `sigma * sqrt(8 ln 3)`.
pub fn anomaly_threshold(sigma: f64) -> f64 {
    sigma * (8.0 * 3f64.ln()).sqrt()
}

/// Coupling strength (mm) that makes `<x y>` most negative, and that
/// minimum (mm^2). Golden-section search on `(0, threshold)`.
pub fn max_reversal_delta(sigma: f64) -> (f64, f64) {
    numeric::golden_section_min(
        |d| closed_form_sequential(d, sigma).xy_mean,
        0.0,
        anomaly_threshold(sigma),
        1e-9,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubit::Mat2;
    use proptest::prelude::*;

    // Trapezoid rule on a wide, fine grid; the Gaussian integrands decay to
    // zero well inside the window.
    fn trapezoid<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, n: usize) -> f64 {
        let h = (hi - lo) / n as f64;
        let mut s = 0.5 * (f(lo) + f(hi));
        for i in 1..n {
            s += f(lo + i as f64 * h);
        }
        s * h
    }

    fn phi(x: f64, centre: f64, sigma: f64) -> f64 {
        let norm = (2.0 * std::f64::consts::PI * sigma * sigma).powf(-0.25);
        norm * (-(x - centre).powi(2) / (4.0 * sigma * sigma)).exp()
    }

    #[test]
    fn overlap_examples() {
        assert_eq!(overlap(0.3, 0.3, 0.1), 1.0);
        let sigma = 0.7;
        let d = sigma * (8.0 * 3f64.ln()).sqrt();
        assert!((overlap(0.0, d, sigma) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn first_moment_examples() {
        assert!((first_moment(0.4, 0.4, 0.2) - 0.4).abs() < 1e-15);
        assert_eq!(first_moment(0.0, 0.0, 0.2), 0.0);
    }

    #[test]
    fn kernels_match_quadrature() {
        for &(a, b, sigma) in &[
            (0.0f64, 0.3f64, 0.1116f64),
            (-0.2, 0.5, 0.4),
            (1.0, 1.7, 1.3),
            (0.05, -0.02, 0.03),
        ] {
            let lo = a.min(b) - 20.0 * sigma;
            let hi = a.max(b) + 20.0 * sigma;
            let n = 20_000;
            let ov = trapezoid(|x| phi(x, a, sigma) * phi(x, b, sigma), lo, hi, n);
            let fm = trapezoid(|x| x * phi(x, a, sigma) * phi(x, b, sigma), lo, hi, n);
            assert!((ov - overlap(a, b, sigma)).abs() < 1e-9, "overlap {ov}");
            assert!(
                (fm - first_moment(a, b, sigma)).abs() < 1e-9,
                "first moment {fm}"
            );
        }
    }

    fn pointer(s: f64) -> GaussianPointerSpec {
        GaussianPointerSpec::new(s).unwrap()
    }

    #[test]
    fn zero_coupling_is_identity() {
        let s = GaussianSuperposition::prepare(pointer(0.1), &QubitState::a1());
        assert_eq!(s.apply_coupling(Axis::X, 0.0).unwrap(), s);
        assert!(s.apply_coupling(Axis::X, -0.1).is_err());
    }

    #[test]
    fn first_coupling_shifts_h_component() {
        let d = 0.2;
        let s = GaussianSuperposition::prepare(pointer(0.1), &QubitState::a1())
            .apply_coupling(Axis::X, d)
            .unwrap();
        let h = s.terms().iter().find(|t| t.pol == Polarization::H).unwrap();
        let v = s.terms().iter().find(|t| t.pol == Polarization::V).unwrap();
        assert_eq!((h.shift_x, h.shift_y, h.coeff.re), (d, 0.0, 0.5));
        assert_eq!((v.shift_x, v.shift_y), (0.0, 0.0));
        assert!((v.coeff.re - 3f64.sqrt() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn final_state_matches_four_term_expansion() {
        // Hand expansion: a1 -> (1/2 H[d,0] + r3/2 V[0,0]) -> HWP(-30) -> couple y:
        //   1/4 H[d,d] - r3/4 V[d,0] - 3/4 H[0,d] - r3/4 V[0,0]
        // which is minus the printed final state (global phase).
        let d = 0.3;
        let r3 = 3f64.sqrt();
        let s = propagate_sequential(pointer(0.1), d, 30.0, -30.0).unwrap();
        assert_eq!(s.terms().len(), 4);
        let expect = [
            (Polarization::H, d, d, 0.25),
            (Polarization::V, d, 0.0, -r3 / 4.0),
            (Polarization::H, 0.0, d, -0.75),
            (Polarization::V, 0.0, 0.0, -r3 / 4.0),
        ];
        for (pol, sx, sy, coeff) in expect {
            let t = s
                .terms()
                .iter()
                .find(|t| t.pol == pol && t.shift_x == sx && t.shift_y == sy)
                .expect("term present");
            assert!(
                (t.coeff - Complex64::new(coeff, 0.0)).norm() < 1e-15,
                "{t:?}"
            );
        }
    }

    #[test]
    fn polarization_identity_and_hwp() {
        let s = GaussianSuperposition::prepare(pointer(0.1), &QubitState::h());
        assert_eq!(s.apply_polarization(&Mat2::identity()).unwrap(), s);
        let rotated = s.apply_polarization(&waveplate_hwp(30.0)).unwrap();
        let a1 = GaussianSuperposition::prepare(pointer(0.1), &QubitState::a1());
        assert_eq!(rotated.terms().len(), 2);
        for (r, e) in rotated.terms().iter().zip(a1.terms()) {
            assert_eq!((r.pol, r.shift_x, r.shift_y), (e.pol, e.shift_x, e.shift_y));
            assert!((r.coeff - e.coeff).norm() < 1e-15);
        }
        let bad = Mat2::from_real([[1.0, 1.0], [0.0, 1.0]]);
        assert!(matches!(
            s.apply_polarization(&bad),
            Err(Error::NonUnitary { .. })
        ));
    }

    #[test]
    fn moments_match_printed_formulas() {
        let (d, sigma) = (0.2, 0.1116);
        let m = propagate_sequential(pointer(sigma), d, 30.0, -30.0)
            .unwrap()
            .moments();
        let e = (-d * d / (8.0 * sigma * sigma)).exp();
        assert!((m.x_mean - d / 4.0).abs() < 1e-15);
        assert!((m.y_mean - d / 8.0 * (5.0 - 3.0 * e)).abs() < 1e-15);
        assert!((m.xy_mean - d * d / 16.0 * (1.0 - 3.0 * e)).abs() < 1e-15);
    }

    #[test]
    fn closed_form_limits() {
        assert_eq!(
            closed_form_sequential(0.0, 0.1),
            DeflectionTriple::default()
        );
        let sigma = 0.1116;
        let weak = 1e-5;
        assert!((closed_form_sequential(weak, sigma).xy_mean / (weak * weak) + 0.125).abs() < 1e-6);
        let strong = 100.0 * sigma;
        assert!(
            (closed_form_sequential(strong, sigma).xy_mean / (strong * strong) - 0.0625).abs()
                < 1e-12
        );
    }

    #[test]
    fn two_qubit_examples() {
        assert_eq!(closed_form_two_qubit(0.0), DeflectionTriple::default());
        let t = closed_form_two_qubit(0.4);
        assert!((t.x_mean - 0.1).abs() < 1e-15 && (t.y_mean - 0.1).abs() < 1e-15);
        assert!((t.xy_mean - 0.01).abs() < 1e-15);
        let m = two_qubit_moments(pointer(0.1116), 0.4, 30.0, -30.0).unwrap();
        assert!(m.max_abs_diff(&t) < 1e-15);
    }

    #[test]
    fn threshold_examples() {
        assert!((anomaly_threshold(1.0) - (8.0 * 3f64.ln()).sqrt()).abs() < 1e-15);
        assert!((anomaly_threshold(1.0) - 2.96461).abs() < 1e-5);
        assert!((anomaly_threshold(0.1116) - 0.331).abs() < 1e-3);
        let sigma = 0.25;
        let d = anomaly_threshold(sigma);
        assert!(closed_form_sequential(d - 1e-9, sigma).xy_mean < 0.0);
        assert!(closed_form_sequential(d + 1e-9, sigma).xy_mean > 0.0);
    }

    #[test]
    fn max_reversal_examples() {
        // Stationarity root of 3 e^-t (1 - t) = 1, solved by bisection.
        let t = numeric::bisect(|t| 3.0 * (-t).exp() * (1.0 - t) - 1.0, 0.1, 0.9, 1e-15).unwrap();
        assert!((t - 0.468).abs() < 1e-3);
        let (d1, xy1) = max_reversal_delta(1.0);
        assert!((d1 - (8.0 * t).sqrt()).abs() < 1e-7);
        assert!((d1 - 1.935).abs() < 5e-4);
        assert!((xy1 + 0.2056).abs() < 1e-4);
        let (d, _) = max_reversal_delta(0.1116);
        assert!((d - 0.1116 * d1).abs() < 1e-8);
        assert!((d - 0.216).abs() < 1e-3);
    }

    fn arb_unitary() -> impl Strategy<Value = Mat2> {
        (0.0f64..6.3, 0.0f64..6.3, 0.0f64..6.3, 0.0f64..1.6).prop_map(|(a, b, g, th)| {
            let (s, c) = th.sin_cos();
            let e = |p: f64| Complex64::from_polar(1.0, p);
            Mat2([[e(a) * c, -e(a + g) * s], [e(b) * s, e(b + g) * c]])
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn calculus_matches_closed_form(delta in 0.0f64..2.0, sigma in 0.01f64..1.0) {
            let m = propagate_sequential(pointer(sigma), delta, 30.0, -30.0).unwrap().moments();
            let c = closed_form_sequential(delta, sigma);
            prop_assert!(m.max_abs_diff(&c) <= 1e-10);
        }

        #[test]
        fn norm_preserved(
            delta1 in 0.0f64..1.0, delta2 in 0.0f64..1.0, sigma in 0.01f64..1.0,
            u1 in arb_unitary(), u2 in arb_unitary(),
        ) {
            let s = GaussianSuperposition::prepare(pointer(sigma), &QubitState::h())
                .apply_polarization(&u1).unwrap();
            prop_assert!((s.norm_sqr() - 1.0).abs() <= 1e-10);
            let s = s.apply_coupling(Axis::X, delta1).unwrap();
            prop_assert!((s.norm_sqr() - 1.0).abs() <= 1e-10);
            let s = s.apply_polarization(&u2).unwrap();
            prop_assert!((s.norm_sqr() - 1.0).abs() <= 1e-10);
            let s = s.apply_coupling(Axis::Y, delta2).unwrap();
            prop_assert!((s.norm_sqr() - 1.0).abs() <= 1e-10);
            prop_assert!(s.terms().len() <= 8);
        }

        #[test]
        fn single_marginal_independent_of_sigma(delta in 0.0f64..1.0, sigma in 0.01f64..10.0) {
            let m = propagate_sequential(pointer(sigma), delta, 30.0, -30.0).unwrap().moments();
            prop_assert!((m.x_mean - delta / 4.0).abs() <= 1e-12);
        }

        #[test]
        fn joint_sign_pattern(frac in 0.001f64..3.0, sigma in 0.01f64..5.0) {
            let d_star = anomaly_threshold(sigma);
            let delta = frac * d_star;
            let xy = closed_form_sequential(delta, sigma).xy_mean;
            if frac < 0.999 {
                prop_assert!(xy < 0.0);
            } else if frac > 1.001 {
                prop_assert!(xy > 0.0);
            }
            let (d_min, _) = max_reversal_delta(sigma);
            if delta > d_min * 1.001 {
                let later = closed_form_sequential(delta * 1.01, sigma).xy_mean;
                prop_assert!(later > xy);
            }
        }

        #[test]
        fn two_qubit_non_negative(delta in 0.0f64..5.0, sigma in 0.01f64..5.0) {
            let m = two_qubit_moments(pointer(sigma), delta, 30.0, -30.0).unwrap();
            prop_assert!(m.xy_mean >= 0.0);
            prop_assert!((m.xy_mean - m.x_mean * m.y_mean).abs() <= 1e-12);
        }
    }
}
