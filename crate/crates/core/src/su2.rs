//! Exact 2×2 complex algebra: Pauli operators, closed-form SU(2) exponentials,
//! trace fidelity and Bloch-vector mapping.
//!
//! Matrices are stored as four explicit complex entries. Nothing here
//! generalises beyond one qubit.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance used when a matrix is required to be unitary.
pub const UNITARY_TOL: f64 = 1e-12;

/// Tolerance used when a state is required to be normalized.
pub const NORM_TOL: f64 = 1e-10;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

/// A 2×2 complex matrix, row-major.
///
/// The name reflects its main use (propagators, gates, targets), but the same
/// type also carries the Hermitian operators H(t) and I(t).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Unitary2 {
    m: [[Complex64; 2]; 2],
}

impl Unitary2 {
    pub const fn new(m: [[Complex64; 2]; 2]) -> Self {
        Self { m }
    }

    pub const fn from_entries(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Self {
            m: [[a, b], [c, d]],
        }
    }

    pub const fn identity() -> Self {
        Self::from_entries(ONE, ZERO, ZERO, ONE)
    }

    pub const fn zero() -> Self {
        Self::from_entries(ZERO, ZERO, ZERO, ZERO)
    }

    /// Builds `v·σ` for a real (or complex) 3-vector of coefficients.
    pub fn pauli_vector(v: [f64; 3]) -> Self {
        let [x, y, z] = v;
        Self::from_entries(
            Complex64::new(z, 0.0),
            Complex64::new(x, -y),
            Complex64::new(x, y),
            Complex64::new(-z, 0.0),
        )
    }

    pub fn entries(&self) -> [[Complex64; 2]; 2] {
        self.m
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.m[row][col]
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.m;
        Self::from_entries(
            m[0][0].conj(),
            m[1][0].conj(),
            m[0][1].conj(),
            m[1][1].conj(),
        )
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let m = &self.m;
        Self::from_entries(s * m[0][0], s * m[0][1], s * m[1][0], s * m[1][1])
    }

    pub fn trace(&self) -> Complex64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn det(&self) -> Complex64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    /// `[self, other] = self·other − other·self`.
    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.m
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// `‖self − other‖_max`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (*self - *other).max_abs()
    }

    /// `‖U†U − I‖_max`.
    pub fn unitarity_defect(&self) -> f64 {
        (self.adjoint() * *self).max_abs_diff(&Self::identity())
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() <= tol
    }

    /// `‖A − A†‖_max`.
    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn apply(&self, v: &Ket) -> Ket {
        let m = &self.m;
        let [a, b] = v.0;
        Ket([m[0][0] * a + m[0][1] * b, m[1][0] * a + m[1][1] * b])
    }

    /// Returns `self` unchanged if it is unitary within [`UNITARY_TOL`].
    pub fn checked_unitary(self) -> Result<Self> {
        let defect = self.unitarity_defect();
        if defect <= UNITARY_TOL && defect.is_finite() {
            Ok(self)
        } else {
            Err(Error::NotUnitary(defect))
        }
    }

    /// Spectral decomposition of a unitary matrix.
    ///
    /// Any U(2) element factors as `e^{iφ}(cos a·I + i sin a·n·σ)`; its
    /// eigenvalues are `e^{i(φ±a)}` with eigenvectors those of `n·σ`. Phases
    /// are returned in `[0, 2π)`. If the matrix is proportional to the
    /// identity the computational basis is returned.
    pub fn unitary_eigen(&self) -> [(f64, Ket); 2] {
        let phi = self.det().arg() / 2.0;
        let v = self.scale(Complex64::from_polar(1.0, -phi));
        let m = &v.m;
        let cos_a = 0.5 * (m[0][0] + m[1][1]).re;
        let sn = [
            0.5 * (m[0][1] + m[1][0]).im,
            0.5 * (m[0][1] - m[1][0]).re,
            0.5 * (m[0][0] - m[1][1]).im,
        ];
        let sin_a = norm3(sn);
        let a = sin_a.atan2(cos_a);
        if sin_a <= 1e-15 {
            return [
                (wrap_phase(phi + a), Ket::zero_state()),
                (wrap_phase(phi - a), Ket::one_state()),
            ];
        }
        let n = [sn[0] / sin_a, sn[1] / sin_a, sn[2] / sin_a];
        let (up, down) = pauli_axis_eigenvectors(n);
        [(wrap_phase(phi + a), up), (wrap_phase(phi - a), down)]
    }
}

impl Add for Unitary2 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let (a, b) = (&self.m, &rhs.m);
        Self::from_entries(
            a[0][0] + b[0][0],
            a[0][1] + b[0][1],
            a[1][0] + b[1][0],
            a[1][1] + b[1][1],
        )
    }
}

impl Sub for Unitary2 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for Unitary2 {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-ONE)
    }
}

impl Mul for Unitary2 {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let (a, b) = (&self.m, &rhs.m);
        Self::from_entries(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

impl Mul<Ket> for Unitary2 {
    type Output = Ket;
    fn mul(self, rhs: Ket) -> Ket {
        self.apply(&rhs)
    }
}

impl fmt::Display for Unitary2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (r, row) in self.m.iter().enumerate() {
            if r > 0 {
                writeln!(f)?;
            }
            write!(
                f,
                "[{:+.12} {:+.12}i, {:+.12} {:+.12}i]",
                row[0].re, row[0].im, row[1].re, row[1].im
            )?;
        }
        Ok(())
    }
}

/// A single-qubit state vector `(a, b) = a|0⟩ + b|1⟩`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ket(pub [Complex64; 2]);

impl Ket {
    pub const fn new(a: Complex64, b: Complex64) -> Self {
        Self([a, b])
    }

    pub const fn zero_state() -> Self {
        Self([ONE, ZERO])
    }

    pub const fn one_state() -> Self {
        Self([ZERO, ONE])
    }

    pub fn norm(&self) -> f64 {
        (self.0[0].norm_sqr() + self.0[1].norm_sqr()).sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Ket) -> Complex64 {
        self.0[0].conj() * other.0[0] + self.0[1].conj() * other.0[1]
    }

    /// `⟨self|A|self⟩`.
    pub fn expectation(&self, a: &Unitary2) -> Complex64 {
        self.inner(&a.apply(self))
    }

    /// The outer product `|self⟩⟨other|`.
    pub fn outer(&self, other: &Ket) -> Unitary2 {
        let (a, b) = (&self.0, &other.0);
        Unitary2::from_entries(
            a[0] * b[0].conj(),
            a[0] * b[1].conj(),
            a[1] * b[0].conj(),
            a[1] * b[1].conj(),
        )
    }

    pub fn normalized(&self) -> Option<Ket> {
        let n = self.norm();
        (n > 0.0 && n.is_finite()).then(|| Ket([self.0[0] / n, self.0[1] / n]))
    }
}

/// Pauli operator label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

pub fn pauli(axis: Axis) -> Unitary2 {
    match axis {
        Axis::X => Unitary2::from_entries(ZERO, ONE, ONE, ZERO),
        Axis::Y => Unitary2::from_entries(ZERO, -I, I, ZERO),
        Axis::Z => Unitary2::from_entries(ONE, ZERO, ZERO, -ONE),
    }
}

/// `exp(i·angle·(n·σ))` for the unit vector `n = axis/|axis|`.
///
/// Evaluated through the Euler identity `cos(angle)·I + i·sin(angle)·(n·σ)`,
/// so the result is unitary with determinant one up to rounding.
pub fn su2_exp(angle: f64, axis: [f64; 3]) -> Result<Unitary2> {
    let norm = norm3(axis);
    if norm.is_nan() || norm <= 0.0 || !norm.is_finite() {
        return Err(Error::ZeroAxis);
    }
    Ok(euler(
        angle,
        [axis[0] / norm, axis[1] / norm, axis[2] / norm],
    ))
}

/// `exp(i·(v·σ))` for an arbitrary real vector, identity when `v = 0`.
pub(crate) fn pauli_vector_exp(v: [f64; 3]) -> Unitary2 {
    let norm = norm3(v);
    if norm == 0.0 {
        return Unitary2::identity();
    }
    euler(norm, [v[0] / norm, v[1] / norm, v[2] / norm])
}

fn euler(angle: f64, n: [f64; 3]) -> Unitary2 {
    let (s, c) = angle.sin_cos();
    Unitary2::from_entries(
        Complex64::new(c, s * n[2]),
        Complex64::new(s * n[1], s * n[0]),
        Complex64::new(-s * n[1], s * n[0]),
        Complex64::new(c, -s * n[2]),
    )
}

/// Eigenvectors `(+1, −1)` of `n·σ` for a unit vector `n`, choosing the
/// better-conditioned of the two textbook forms.
fn pauli_axis_eigenvectors(n: [f64; 3]) -> (Ket, Ket) {
    let [x, y, z] = n;
    let t = Complex64::new(x, y);
    if z >= 0.0 {
        let up = Ket::new(Complex64::new(1.0 + z, 0.0), t);
        let down = Ket::new(-t.conj(), Complex64::new(1.0 + z, 0.0));
        (up.normalized().unwrap(), down.normalized().unwrap())
    } else {
        let up = Ket::new(t.conj(), Complex64::new(1.0 - z, 0.0));
        let down = Ket::new(Complex64::new(1.0 - z, 0.0), -t);
        (up.normalized().unwrap(), down.normalized().unwrap())
    }
}

pub(crate) fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// Maps a phase into `[0, 2π)`.
pub fn wrap_phase(x: f64) -> f64 {
    let w = x.rem_euclid(2.0 * PI);
    if w >= 2.0 * PI {
        0.0
    } else {
        w
    }
}

/// Distance between two phases on the circle, in `[0, π]`.
pub fn phase_distance(a: f64, b: f64) -> f64 {
    let d = wrap_phase(a - b);
    d.min(2.0 * PI - d)
}

/// Trace overlap between an implemented gate and a target.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FidelityReport {
    /// `|tr(u†v)|/2`, insensitive to global phase.
    pub magnitude: f64,
    /// `Re tr(u†v)/2`.
    pub phase_sensitive: f64,
    /// `arg tr(u†v)`.
    pub relative_phase: f64,
}

impl FidelityReport {
    pub fn infidelity(&self) -> f64 {
        1.0 - self.magnitude
    }

    pub fn phase_sensitive_infidelity(&self) -> f64 {
        1.0 - self.phase_sensitive
    }
}

/// `tr(u†v)/tr(v†v)` split into magnitude, real part and phase. For 2×2
/// unitaries the denominator is 2.
pub fn fidelity(u: &Unitary2, v: &Unitary2) -> FidelityReport {
    let overlap = (u.adjoint() * *v).trace() / 2.0;
    FidelityReport {
        magnitude: overlap.norm(),
        phase_sensitive: overlap.re,
        relative_phase: overlap.arg(),
    }
}

/// A point on the Bloch sphere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochPoint {
    pub fn norm(&self) -> f64 {
        norm3([self.x, self.y, self.z])
    }
}

/// `(⟨σx⟩, ⟨σy⟩, ⟨σz⟩)` of a normalized state.
pub fn bloch_of(state: &Ket) -> Result<BlochPoint> {
    let n = state.norm();
    if n.is_nan() || (n - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized(n));
    }
    let [a, b] = state.0;
    let cross = a.conj() * b;
    Ok(BlochPoint {
        x: 2.0 * cross.re,
        y: 2.0 * cross.im,
        z: a.norm_sqr() - b.norm_sqr(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn pauli_matrices() {
        assert_eq!(pauli(Axis::X), Unitary2::from_entries(ZERO, ONE, ONE, ZERO));
        assert_eq!(
            pauli(Axis::Y),
            Unitary2::from_entries(ZERO, c(0.0, -1.0), c(0.0, 1.0), ZERO)
        );
        assert_eq!(
            pauli(Axis::Z),
            Unitary2::from_entries(ONE, ZERO, ZERO, c(-1.0, 0.0))
        );
        for axis in [Axis::X, Axis::Y, Axis::Z] {
            let p = pauli(axis);
            assert_eq!(p.trace(), ZERO);
            assert_eq!(p.hermiticity_defect(), 0.0);
            assert_eq!(p * p, Unitary2::identity());
        }
    }

    #[test]
    fn pauli_algebra() {
        let (x, y, z) = (pauli(Axis::X), pauli(Axis::Y), pauli(Axis::Z));
        assert_eq!(x * y, z.scale(I));
        assert_eq!(x.commutator(&y), z.scale(c(0.0, 2.0)));
        assert_eq!(
            Unitary2::pauli_vector([1.0, 2.0, 3.0]),
            x + y.scale(c(2.0, 0.0)) + z.scale(c(3.0, 0.0))
        );
    }

    #[test]
    fn su2_exp_examples() {
        let id = su2_exp(0.0, [0.3, -1.0, 2.0]).unwrap();
        assert!(id.max_abs_diff(&Unitary2::identity()) < 1e-15);

        let minus = su2_exp(PI, [0.0, 0.0, 1.0]).unwrap();
        assert!(minus.max_abs_diff(&-Unitary2::identity()) < 1e-15);

        let ix = su2_exp(FRAC_PI_2, [1.0, 0.0, 0.0]).unwrap();
        assert!(ix.max_abs_diff(&pauli(Axis::X).scale(I)) < 1e-15);
    }

    #[test]
    fn su2_exp_normalizes_axis() {
        let a = su2_exp(0.7, [0.0, 0.0, 5.0]).unwrap();
        let b = su2_exp(0.7, [0.0, 0.0, 1.0]).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-15);
    }

    #[test]
    fn su2_exp_rejects_zero_axis() {
        assert_eq!(su2_exp(1.0, [0.0; 3]), Err(Error::ZeroAxis));
        assert_eq!(su2_exp(1.0, [f64::NAN, 0.0, 0.0]), Err(Error::ZeroAxis));
    }

    #[test]
    fn fidelity_examples() {
        let u = su2_exp(0.4, [1.0, 2.0, -0.5]).unwrap();
        let f = fidelity(&u, &u);
        assert!((f.magnitude - 1.0).abs() < 1e-15);
        assert!((f.phase_sensitive - 1.0).abs() < 1e-15);

        let f = fidelity(&Unitary2::identity(), &pauli(Axis::X));
        assert_eq!(f.magnitude, 0.0);

        let f = fidelity(&Unitary2::identity(), &-Unitary2::identity());
        assert_eq!(f.magnitude, 1.0);
        assert_eq!(f.phase_sensitive, -1.0);
        assert!((f.relative_phase.abs() - PI).abs() < 1e-15);
    }

    #[test]
    fn bloch_examples() {
        let p = bloch_of(&Ket::zero_state()).unwrap();
        assert_eq!((p.x, p.y, p.z), (0.0, 0.0, 1.0));
        let p = bloch_of(&Ket::one_state()).unwrap();
        assert_eq!((p.x, p.y, p.z), (0.0, 0.0, -1.0));
        let plus = Ket::new(c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0));
        let p = bloch_of(&plus).unwrap();
        assert!((p.x - 1.0).abs() < 1e-15 && p.y.abs() < 1e-15 && p.z.abs() < 1e-15);
    }

    #[test]
    fn bloch_rejects_unnormalized() {
        let s = Ket::new(ONE, ONE);
        assert!(matches!(bloch_of(&s), Err(Error::NotNormalized(_))));
    }

    #[test]
    fn eigen_of_diagonal_and_identity() {
        let z = su2_exp(0.3, [0.0, 0.0, 1.0]).unwrap();
        let [(p0, v0), (p1, v1)] = z.unitary_eigen();
        assert!((p0 - 0.3).abs() < 1e-14);
        assert!((p1 - (2.0 * PI - 0.3)).abs() < 1e-14);
        assert!((v0.inner(&Ket::zero_state()).norm() - 1.0).abs() < 1e-14);
        assert!((v1.inner(&Ket::one_state()).norm() - 1.0).abs() < 1e-14);

        let [(p0, _), (p1, _)] = (-Unitary2::identity()).unitary_eigen();
        assert!(phase_distance(p0, PI) < 1e-15 && phase_distance(p1, PI) < 1e-15);
    }

    #[test]
    fn wrap_and_distance() {
        assert_eq!(wrap_phase(-0.5), 2.0 * PI - 0.5);
        assert_eq!(wrap_phase(2.0 * PI), 0.0);
        assert!(phase_distance(1e-9, 2.0 * PI - 1e-9) < 3e-9);
    }

    fn unit_axis() -> impl Strategy<Value = [f64; 3]> {
        (0.0..PI, 0.0..2.0 * PI)
            .prop_map(|(th, ph)| [th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()])
    }

    fn state() -> impl Strategy<Value = Ket> {
        (0.0..PI, 0.0..2.0 * PI, 0.0..2.0 * PI).prop_map(|(th, ph, g)| {
            Ket::new(
                Complex64::from_polar((th / 2.0).cos(), g),
                Complex64::from_polar((th / 2.0).sin(), g + ph),
            )
        })
    }

    proptest! {
        #[test]
        fn exp_inverse_is_negated_angle(a in -10.0..10.0f64, n in unit_axis()) {
            let u = su2_exp(a, n).unwrap() * su2_exp(-a, n).unwrap();
            prop_assert!(u.max_abs_diff(&Unitary2::identity()) <= 1e-12);
        }

        #[test]
        fn exp_spectrum(a in -10.0..10.0f64, n in unit_axis()) {
            let u = su2_exp(a, n).unwrap();
            prop_assert!((u.trace() - c(2.0 * a.cos(), 0.0)).norm() <= 1e-12);
            prop_assert!((u.det() - ONE).norm() <= 1e-12);
            prop_assert!(u.unitarity_defect() <= 1e-12);
        }

        #[test]
        fn fidelity_ignores_global_phase(
            a in -4.0..4.0f64, n in unit_axis(), b in -4.0..4.0f64, m in unit_axis(), phi in -PI..PI
        ) {
            let u = su2_exp(a, n).unwrap();
            let v = su2_exp(b, m).unwrap();
            let f0 = fidelity(&u, &v);
            let f1 = fidelity(&u.scale(Complex64::from_polar(1.0, phi)), &v);
            prop_assert!((f0.magnitude - f1.magnitude).abs() <= 1e-12);
            prop_assert!(f0.magnitude >= f0.phase_sensitive.abs() - 1e-15);
            prop_assert!(f0.magnitude <= 1.0 + 1e-12);
        }

        #[test]
        fn bloch_stays_on_sphere(a in -4.0..4.0f64, n in unit_axis(), s in state()) {
            let u = su2_exp(a, n).unwrap();
            let p = bloch_of(&u.apply(&s)).unwrap();
            prop_assert!((p.norm() - 1.0).abs() <= 1e-10);
        }

        #[test]
        fn unitary_eigen_reconstructs(a in -4.0..4.0f64, n in unit_axis(), phi in -PI..PI) {
            let u = su2_exp(a, n).unwrap().scale(Complex64::from_polar(1.0, phi));
            let eig = u.unitary_eigen();
            let rebuilt = eig.iter().fold(Unitary2::zero(), |acc, (p, v)| {
                acc + v.outer(v).scale(Complex64::from_polar(1.0, *p))
            });
            prop_assert!(rebuilt.max_abs_diff(&u) <= 1e-12);
            prop_assert!(eig[0].1.inner(&eig[1].1).norm() <= 1e-12);
        }
    }
}
