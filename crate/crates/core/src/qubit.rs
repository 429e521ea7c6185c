//! Two-level system algebra: polarization states, Hermitian observables,
//! weak values with and without post-selection, and anomaly classification.
//!
//! The computational basis is identified with polarization throughout:
//! `|0> = |H>` and `|1> = |V>`.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance for algebraic identities on 2x2 systems.
pub const ALGEBRA_TOL: f64 = 1e-12;
/// Tolerance for accumulated sums (decompositions, unitarity checks).
pub const SUM_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Normalized polarization state `amp_h |H> + amp_v |V>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState {
    amp_h: Complex64,
    amp_v: Complex64,
}

impl QubitState {
    /// Builds a state from amplitudes that must already be normalized.
    pub fn new(amp_h: Complex64, amp_v: Complex64) -> Result<Self> {
        let norm = amp_h.norm_sqr() + amp_v.norm_sqr();
        if !norm.is_finite() || (norm - 1.0).abs() > ALGEBRA_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { amp_h, amp_v })
    }

    /// Builds a state by rescaling arbitrary nonzero amplitudes.
    pub fn normalized(amp_h: Complex64, amp_v: Complex64) -> Result<Self> {
        let norm = (amp_h.norm_sqr() + amp_v.norm_sqr()).sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::NotNormalized { norm: norm * norm });
        }
        Ok(Self {
            amp_h: amp_h / norm,
            amp_v: amp_v / norm,
        })
    }

    pub fn h() -> Self {
        Self {
            amp_h: ONE,
            amp_v: ZERO,
        }
    }

    pub fn v() -> Self {
        Self {
            amp_h: ZERO,
            amp_v: ONE,
        }
    }

    /// `|a1> = 1/2 |H> + sqrt(3)/2 |V>`.
    pub fn a1() -> Self {
        Self {
            amp_h: c(0.5),
            amp_v: c(3f64.sqrt() / 2.0),
        }
    }

    /// `|a2> = 1/2 |H> - sqrt(3)/2 |V>`.
    pub fn a2() -> Self {
        Self {
            amp_h: c(0.5),
            amp_v: c(-(3f64.sqrt()) / 2.0),
        }
    }

    /// Looks up one of the built-in named states `H`, `V`, `a1`, `a2`.
    pub fn named(name: &str) -> Option<Self> {
        match name {
            "H" | "h" | "0" => Some(Self::h()),
            "V" | "v" | "1" => Some(Self::v()),
            "a1" => Some(Self::a1()),
            "a2" => Some(Self::a2()),
            _ => None,
        }
    }

    pub fn amp_h(&self) -> Complex64 {
        self.amp_h
    }

    pub fn amp_v(&self) -> Complex64 {
        self.amp_v
    }

    pub fn amplitudes(&self) -> [Complex64; 2] {
        [self.amp_h, self.amp_v]
    }

    /// Inner product `<self|other>`.
    pub fn inner(&self, other: &QubitState) -> Complex64 {
        self.amp_h.conj() * other.amp_h + self.amp_v.conj() * other.amp_v
    }

    /// `<self| m |other>`.
    fn sandwich(&self, m: &Mat2, other: &QubitState) -> Complex64 {
        let [h, v] = m.apply(other.amplitudes());
        self.amp_h.conj() * h + self.amp_v.conj() * v
    }
}

/// Dense 2x2 complex matrix in row-major order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[Complex64; 2]; 2]);

impl Mat2 {
    pub fn identity() -> Self {
        Mat2([[ONE, ZERO], [ZERO, ONE]])
    }

    pub fn from_real(m: [[f64; 2]; 2]) -> Self {
        Mat2([[c(m[0][0]), c(m[0][1])], [c(m[1][0]), c(m[1][1])]])
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Mat2([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }

    pub fn mul(&self, rhs: &Mat2) -> Mat2 {
        let (a, b) = (&self.0, &rhs.0);
        let mut out = [[ZERO; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Mat2(out)
    }

    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        let m = &self.0;
        [
            m[0][0] * v[0] + m[0][1] * v[1],
            m[1][0] * v[0] + m[1][1] * v[1],
        ]
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((self.0[i][j] - other.0[i][j]).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.adjoint()) <= tol
    }

    /// Deviation of `u^dagger u` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        self.adjoint().mul(self).max_abs_diff(&Mat2::identity())
    }

    /// Fails with [`Error::NonUnitary`] when `u^dagger u` is further than
    /// [`SUM_TOL`] from the identity.
    pub fn check_unitary(&self) -> Result<()> {
        let defect = self.unitarity_defect();
        if defect.is_finite() && defect <= SUM_TOL {
            Ok(())
        } else {
            Err(Error::NonUnitary { defect })
        }
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = &self.0;
        write!(
            f,
            "[[{}, {}], [{}, {}]]",
            m[0][0], m[0][1], m[1][0], m[1][1]
        )
    }
}

/// Half-wave plate with its optical axis at `theta_deg` degrees:
/// `[[cos 2t, sin 2t], [sin 2t, -cos 2t]]`. Hermitian and involutory.
pub fn waveplate_hwp(theta_deg: f64) -> Mat2 {
    let two_theta = 2.0 * theta_deg.to_radians();
    let (s, co) = two_theta.sin_cos();
    Mat2::from_real([[co, s], [s, -co]])
}

/// Hermitian 2x2 observable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observable {
    m: Mat2,
}

impl Observable {
    pub fn new(m: Mat2) -> Result<Self> {
        if !m.is_hermitian(ALGEBRA_TOL) {
            return Err(Error::NotHermitian);
        }
        Ok(Self { m })
    }

    /// Rank-one projector `|s><s|`.
    pub fn projector(s: &QubitState) -> Self {
        let a = s.amplitudes();
        let mut m = [[ZERO; 2]; 2];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = a[i] * a[j].conj();
            }
        }
        // Force exact hermiticity on the diagonal.
        m[0][0].im = 0.0;
        m[1][1].im = 0.0;
        Self { m: Mat2(m) }
    }

    /// Real diagonal observable `diag(d0, d1)` in the H/V basis.
    pub fn diagonal(d0: f64, d1: f64) -> Self {
        Self {
            m: Mat2::from_real([[d0, 0.0], [0.0, d1]]),
        }
    }

    pub fn pauli_z() -> Self {
        Self::diagonal(1.0, -1.0)
    }

    pub fn pauli_x() -> Self {
        Self {
            m: Mat2::from_real([[0.0, 1.0], [1.0, 0.0]]),
        }
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.m
    }

    /// Eigenvalues sorted ascending as `(eta_min, eta_max)`.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let m = &self.m.0;
        let a = m[0][0].re;
        let d = m[1][1].re;
        let mean = 0.5 * (a + d);
        let radius = (0.25 * (a - d) * (a - d) + m[0][1].norm_sqr()).sqrt();
        (mean - radius, mean + radius)
    }

    /// Whether `[self, other] = 0` within `tol`.
    pub fn commutes_with(&self, other: &Observable, tol: f64) -> bool {
        let ab = self.m.mul(&other.m);
        let ba = other.m.mul(&self.m);
        ab.max_abs_diff(&ba) <= tol
    }
}

/// A weak value that may be undefined because the post-selected state is
/// orthogonal to the preparation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeakValue {
    Defined(Complex64),
    Undefined,
}

impl WeakValue {
    pub fn value(&self) -> Option<Complex64> {
        match self {
            WeakValue::Defined(v) => Some(*v),
            WeakValue::Undefined => None,
        }
    }
}

/// Sequential weak value together with the eigenvalue-product interval and
/// the anomaly verdict.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakValueResult {
    pub value: Complex64,
    pub interval: (f64, f64),
    pub anomalous: bool,
}

impl WeakValueResult {
    pub fn classify(value: Complex64, interval: (f64, f64)) -> Self {
        let anomalous = value.re < interval.0 - ALGEBRA_TOL || value.re > interval.1 + ALGEBRA_TOL;
        Self {
            value,
            interval,
            anomalous,
        }
    }
}

/// Standard weak value `<post|A|pre> / <post|pre>`.
pub fn weak_value(pre: &QubitState, post: &QubitState, a: &Observable) -> Result<Complex64> {
    let overlap = post.inner(pre);
    if overlap.norm() <= ALGEBRA_TOL {
        return Err(Error::OrthogonalPostselection {
            overlap: overlap.norm(),
        });
    }
    Ok(post.sandwich(&a.m, pre) / overlap)
}

/// Weak value without post-selection, i.e. the expectation `<pre|A|pre>`.
pub fn expectation(pre: &QubitState, a: &Observable) -> Complex64 {
    pre.sandwich(&a.m, pre)
}

/// `(min, max)` over all products of one eigenvalue of `a` with one of `b`.
pub fn product_eigen_range(a: &Observable, b: &Observable) -> (f64, f64) {
    let (a0, a1) = a.eigenvalues();
    let (b0, b1) = b.eigenvalues();
    let products = [a0 * b0, a0 * b1, a1 * b0, a1 * b1];
    products
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &p| {
            (lo.min(p), hi.max(p))
        })
}

/// Sequential weak value without post-selection, `<pre| second * first |pre>`.
/// The first-measured observable acts on the state first.
pub fn sequential_weak_value(
    pre: &QubitState,
    first: &Observable,
    second: &Observable,
) -> WeakValueResult {
    let product = second.m.mul(&first.m);
    let value = pre.sandwich(&product, pre);
    WeakValueResult::classify(value, product_eigen_range(first, second))
}

/// One term of the expansion of an expectation value over a post-selection
/// basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecompositionTerm {
    pub probability: f64,
    pub weak_value: WeakValue,
}

/// Writes `<pre|A|pre>` as the probability-weighted sum of weak values
/// post-selected on each state of an orthonormal basis. Basis states
/// orthogonal to `pre` contribute a zero-probability term with an
/// [`WeakValue::Undefined`] value.
pub fn postselected_decomposition(
    pre: &QubitState,
    a: &Observable,
    basis: &[QubitState; 2],
) -> Result<Vec<DecompositionTerm>> {
    let cross = basis[0].inner(&basis[1]).norm();
    if cross > ALGEBRA_TOL {
        return Err(Error::NonOrthonormalBasis { overlap: cross });
    }
    Ok(basis
        .iter()
        .map(|b| {
            let probability = b.inner(pre).norm_sqr();
            let weak_value = match weak_value(pre, b, a) {
                Ok(v) => WeakValue::Defined(v),
                Err(_) => WeakValue::Undefined,
            };
            DecompositionTerm {
                probability,
                weak_value,
            }
        })
        .collect())
}

/// Reassembles `sum_i p_i * w_i`, skipping undefined terms.
pub fn recombine(terms: &[DecompositionTerm]) -> Complex64 {
    terms
        .iter()
        .filter_map(|t| t.weak_value.value().map(|w| w * t.probability))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    // Brute-force reference: expand every matrix product entry by entry.
    fn naive_sandwich(
        bra: [Complex64; 2],
        ms: &[[[Complex64; 2]; 2]],
        ket: [Complex64; 2],
    ) -> Complex64 {
        let mut v = ket;
        for m in ms.iter().rev() {
            let mut w = [ZERO; 2];
            for i in 0..2 {
                for k in 0..2 {
                    w[i] += m[i][k] * v[k];
                }
            }
            v = w;
        }
        bra[0].conj() * v[0] + bra[1].conj() * v[1]
    }

    #[test]
    fn hwp_zero_is_pauli_z() {
        let u = waveplate_hwp(0.0);
        assert_eq!(u, Mat2::from_real([[1.0, 0.0], [0.0, -1.0]]));
    }

    #[test]
    fn hwp_prepares_a1_and_a2() {
        let h = QubitState::h().amplitudes();
        let a1 = waveplate_hwp(30.0).apply(h);
        let a2 = waveplate_hwp(-30.0).apply(h);
        assert!(close(a1[0], c(0.5), 1e-15) && close(a1[1], c(3f64.sqrt() / 2.0), 1e-15));
        assert!(close(a2[0], c(0.5), 1e-15) && close(a2[1], c(-(3f64.sqrt()) / 2.0), 1e-15));
    }

    #[test]
    fn weak_value_examples() {
        let p0 = Observable::projector(&QubitState::h());
        let wv = weak_value(&QubitState::h(), &QubitState::h(), &p0).unwrap();
        assert!(close(wv, ONE, 1e-15));

        let ph = Observable::projector(&QubitState::h());
        let wv = weak_value(&QubitState::a1(), &QubitState::a1(), &ph).unwrap();
        assert!(close(wv, c(0.25), 1e-15));

        // <0|1><1|psi> / <0|psi> = 0
        let plus = QubitState::normalized(ONE, ONE).unwrap();
        let p1 = Observable::projector(&QubitState::v());
        let wv = weak_value(&plus, &QubitState::h(), &p1).unwrap();
        let oracle = naive_sandwich(
            QubitState::h().amplitudes(),
            &[p1.matrix().0],
            plus.amplitudes(),
        ) / QubitState::h().inner(&plus);
        assert!(close(wv, oracle, 1e-15));
        assert!(close(wv, ZERO, 1e-15));
    }

    #[test]
    fn orthogonal_postselection_is_an_error() {
        let ph = Observable::projector(&QubitState::h());
        let err = weak_value(&QubitState::h(), &QubitState::v(), &ph).unwrap_err();
        assert!(matches!(err, Error::OrthogonalPostselection { .. }));
    }

    #[test]
    fn expectation_examples() {
        let p0 = Observable::projector(&QubitState::h());
        assert!(close(expectation(&QubitState::h(), &p0), ONE, 1e-15));
        assert!(close(expectation(&QubitState::a1(), &p0), c(0.25), 1e-15));
        let pa2 = Observable::projector(&QubitState::a2());
        assert!(close(expectation(&QubitState::a1(), &pa2), c(0.25), 1e-15));
    }

    #[test]
    fn sequential_value_is_minus_one_eighth() {
        let first = Observable::projector(&QubitState::h());
        let second = Observable::projector(&QubitState::a2());
        let r = sequential_weak_value(&QubitState::a1(), &first, &second);
        let oracle = naive_sandwich(
            QubitState::a1().amplitudes(),
            &[second.matrix().0, first.matrix().0],
            QubitState::a1().amplitudes(),
        );
        assert!(close(r.value, oracle, 1e-15));
        assert!(close(r.value, c(-0.125), 1e-15));
        assert_abs_diff_eq!(r.interval.0, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.interval.1, 1.0, epsilon = 1e-15);
        assert!(r.anomalous);
    }

    #[test]
    fn ordering_is_first_measured_rightmost() {
        // <a1| P_a2 P_H |a1> and <a1| P_H P_a2 |a1> are complex conjugates.
        let ph = Observable::projector(&QubitState::h());
        let pa2 = Observable::projector(&QubitState::a2());
        let psi = QubitState::normalized(ONE, Complex64::new(0.3, 0.8)).unwrap();
        let ab = sequential_weak_value(&psi, &ph, &pa2).value;
        let ba = sequential_weak_value(&psi, &pa2, &ph).value;
        let expected = naive_sandwich(
            psi.amplitudes(),
            &[pa2.matrix().0, ph.matrix().0],
            psi.amplitudes(),
        );
        assert!(close(ab, expected, 1e-15));
        assert!(close(ab, ba.conj(), 1e-15));
        assert!(ab.im.abs() > 1e-3);
    }

    #[test]
    fn commuting_projector_on_eigenstate() {
        let p0 = Observable::projector(&QubitState::h());
        let r = sequential_weak_value(&QubitState::h(), &p0, &p0);
        assert!(close(r.value, ONE, 1e-15));
        assert!(!r.anomalous);
    }

    #[test]
    fn eigen_range_examples() {
        let ph = Observable::projector(&QubitState::h());
        let pa = Observable::projector(&QubitState::a2());
        let (lo, hi) = product_eigen_range(&ph, &pa);
        assert_abs_diff_eq!(lo, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(hi, 1.0, epsilon = 1e-15);
        assert_eq!(
            product_eigen_range(&Observable::pauli_z(), &Observable::pauli_z()),
            (-1.0, 1.0)
        );
        assert_eq!(
            product_eigen_range(
                &Observable::diagonal(2.0, 3.0),
                &Observable::diagonal(-1.0, 1.0)
            ),
            (-3.0, 3.0)
        );
    }

    #[test]
    fn decomposition_examples() {
        let p0 = Observable::projector(&QubitState::h());
        let basis = [QubitState::h(), QubitState::v()];
        let terms = postselected_decomposition(&QubitState::h(), &p0, &basis).unwrap();
        assert_eq!(terms[0].probability, 1.0);
        assert_eq!(terms[0].weak_value, WeakValue::Defined(ONE));
        assert_eq!(terms[1].probability, 0.0);
        assert_eq!(terms[1].weak_value, WeakValue::Undefined);

        let terms = postselected_decomposition(&QubitState::a1(), &p0, &basis).unwrap();
        assert_abs_diff_eq!(terms[0].probability, 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(terms[1].probability, 0.75, epsilon = 1e-15);
        assert!(close(terms[0].weak_value.value().unwrap(), ONE, 1e-15));
        assert!(close(terms[1].weak_value.value().unwrap(), ZERO, 1e-15));
        assert!(close(recombine(&terms), c(0.25), 1e-15));
    }

    #[test]
    fn non_orthonormal_basis_rejected() {
        let p0 = Observable::projector(&QubitState::h());
        let basis = [QubitState::h(), QubitState::a1()];
        assert!(postselected_decomposition(&QubitState::h(), &p0, &basis).is_err());
    }

    #[test]
    fn constructors_validate() {
        assert!(QubitState::new(ONE, ONE).is_err());
        assert!(QubitState::normalized(ZERO, ZERO).is_err());
        let not_hermitian = Mat2([[ONE, ONE], [ZERO, ONE]]);
        assert!(Observable::new(not_hermitian).is_err());
        assert!(Mat2([[ONE, ONE], [ZERO, ONE]]).check_unitary().is_err());
        assert!(waveplate_hwp(12.0).check_unitary().is_ok());
    }

    fn arb_complex() -> impl Strategy<Value = Complex64> {
        (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| Complex64::new(re, im))
    }

    fn arb_state() -> impl Strategy<Value = QubitState> {
        (arb_complex(), arb_complex())
            .prop_filter("nonzero", |(a, b)| a.norm_sqr() + b.norm_sqr() > 1e-6)
            .prop_map(|(a, b)| QubitState::normalized(a, b).unwrap())
    }

    fn arb_observable() -> impl Strategy<Value = Observable> {
        (-3.0f64..3.0, -3.0f64..3.0, arb_complex())
            .prop_map(|(a, d, b)| Observable::new(Mat2([[c(a), b], [b.conj(), c(d)]])).unwrap())
    }

    // Orthonormal basis built from a random state and its orthogonal complement.
    fn arb_basis() -> impl Strategy<Value = [QubitState; 2]> {
        arb_state().prop_map(|s| {
            let perp = QubitState::new(-s.amp_v().conj(), s.amp_h().conj()).unwrap();
            [s, perp]
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn decomposition_reconstructs_expectation(psi in arb_state(), a in arb_observable(), basis in arb_basis()) {
            let terms = postselected_decomposition(&psi, &a, &basis).unwrap();
            let total_p: f64 = terms.iter().map(|t| t.probability).sum();
            prop_assert!((total_p - 1.0).abs() <= SUM_TOL);
            prop_assert!(close(recombine(&terms), expectation(&psi, &a), SUM_TOL));
        }

        #[test]
        fn expectation_is_real_and_in_spectrum(psi in arb_state(), a in arb_observable()) {
            let e = expectation(&psi, &a);
            let (lo, hi) = a.eigenvalues();
            prop_assert!(e.im.abs() <= ALGEBRA_TOL);
            prop_assert!(e.re >= lo - SUM_TOL && e.re <= hi + SUM_TOL);
        }

        #[test]
        fn hwp_is_involutory(theta in -720.0f64..720.0) {
            let u = waveplate_hwp(theta);
            prop_assert!(u.mul(&u).max_abs_diff(&Mat2::identity()) <= ALGEBRA_TOL);
            prop_assert!(u.is_hermitian(ALGEBRA_TOL));
        }

        #[test]
        fn commuting_pairs_never_anomalous(
            psi in arb_state(),
            d in proptest::array::uniform4(-3.0f64..3.0),
            basis in arb_basis(),
        ) {
            // Simultaneously diagonal in a random basis: U diag U^dagger.
            let u = Mat2([
                [basis[0].amp_h(), basis[1].amp_h()],
                [basis[0].amp_v(), basis[1].amp_v()],
            ]);
            let conj = |d0: f64, d1: f64| {
                let m = u.mul(&Mat2::from_real([[d0, 0.0], [0.0, d1]])).mul(&u.adjoint());
                let mut m = m.0;
                m[1][0] = m[0][1].conj();
                m[0][0].im = 0.0;
                m[1][1].im = 0.0;
                Observable::new(Mat2(m)).unwrap()
            };
            let a = conj(d[0], d[1]);
            let b = conj(d[2], d[3]);
            prop_assert!(a.commutes_with(&b, 1e-9));
            let r = sequential_weak_value(&psi, &a, &b);
            prop_assert!(!r.anomalous, "value {} outside {:?}", r.value, r.interval);
        }

        #[test]
        fn eigenstate_gives_squared_eigenvalue(a in arb_observable()) {
            // eigenvector of the larger eigenvalue
            let (_, hi) = a.eigenvalues();
            let m = a.matrix().0;
            let v = if m[0][1].norm() > 1e-9 {
                QubitState::normalized(m[0][1], c(hi) - m[0][0]).unwrap()
            } else if (m[0][0].re - hi).abs() < 1e-12 {
                QubitState::h()
            } else {
                QubitState::v()
            };
            let r = sequential_weak_value(&v, &a, &a);
            prop_assert!(close(r.value, c(hi * hi), 1e-9 * (1.0 + hi * hi)));
        }
    }

    #[test]
    fn diagonal_pairs_sample_never_anomalous() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let a = Observable::diagonal(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let b = Observable::diagonal(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let psi = QubitState::normalized(
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            )
            .unwrap();
            let r = sequential_weak_value(&psi, &a, &b);
            assert!(r.value.re >= r.interval.0 - 1e-12 && r.value.re <= r.interval.1 + 1e-12);
            assert!(!r.anomalous);
        }
    }
}
