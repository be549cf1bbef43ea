//! The rotating-field qubit drive, its Lewis-Riesenfeld invariant, and the
//! one-parameter family of holonomic gates it produces.
//!
//! ```text
//! H(t) = ½(Ω cos ωt σx + Ω sin ωt σy + Δ σz)
//! I(t) =   Ω cos ωt σx + Ω sin ωt σy + (Δ−ω) σz
//! ```
//!
//! `I` has eigenvalues `±λ`, `λ = √(Ω² + (Δ−ω)²)`, with eigenvectors
//! `(e^{−iωt} cos θ±, sin θ±)`. The dynamical phase of both eigenvectors
//! vanishes identically iff `Ω² + Δ(Δ−ω) = 0`; parameterising that curve by
//! `cos²β = Δ/ω` gives the gate `U_β = −exp(iπ sin β (−cos β σx + sin β σz))`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{out_of_range, Result};
use crate::su2::{su2_exp, Ket, Unitary2};

/// Relative size (in units of ω) below which Ω and λ are treated as zero.
pub const SINGULAR_TOL: f64 = 1e-12;

/// Physical drive `(Ω, Δ, ω)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DriveParams {
    omega_rabi: f64,
    detuning: f64,
    omega_drive: f64,
}

impl DriveParams {
    pub fn new(omega_rabi: f64, detuning: f64, omega_drive: f64) -> Result<Self> {
        if !(omega_drive > 0.0 && omega_drive.is_finite()) {
            return Err(out_of_range("omega_drive", omega_drive, "finite and > 0"));
        }
        if !(omega_rabi >= 0.0 && omega_rabi.is_finite()) {
            return Err(out_of_range("omega_rabi", omega_rabi, "finite and >= 0"));
        }
        if !detuning.is_finite() {
            return Err(out_of_range("detuning", detuning, "finite"));
        }
        Ok(Self {
            omega_rabi,
            detuning,
            omega_drive,
        })
    }

    /// Rabi amplitude Ω.
    pub fn omega_rabi(&self) -> f64 {
        self.omega_rabi
    }

    /// Detuning Δ.
    pub fn detuning(&self) -> f64 {
        self.detuning
    }

    /// Drive angular frequency ω.
    pub fn omega_drive(&self) -> f64 {
        self.omega_drive
    }

    /// `T = 2π/ω`.
    pub fn period(&self) -> f64 {
        2.0 * PI / self.omega_drive
    }

    /// Invariant eigenvalue magnitude `λ = √(Ω² + (Δ−ω)²)`.
    pub fn lambda(&self) -> f64 {
        self.omega_rabi.hypot(self.detuning - self.omega_drive)
    }
}

/// A point on the holonomy curve, labelled by `β ∈ [0, π/2]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HolonomicGate {
    beta: f64,
    omega_drive: f64,
}

impl HolonomicGate {
    pub fn new(beta: f64, omega_drive: f64) -> Result<Self> {
        check_beta(beta)?;
        if !(omega_drive > 0.0 && omega_drive.is_finite()) {
            return Err(out_of_range("omega_drive", omega_drive, "finite and > 0"));
        }
        Ok(Self { beta, omega_drive })
    }

    /// Gate with ω = 1, the default unit of frequency.
    pub fn unit(beta: f64) -> Result<Self> {
        Self::new(beta, 1.0)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn omega_drive(&self) -> f64 {
        self.omega_drive
    }
}

pub(crate) fn check_beta(beta: f64) -> Result<()> {
    if (0.0..=FRAC_PI_2).contains(&beta) {
        Ok(())
    } else {
        Err(out_of_range("beta", beta, "[0, pi/2]"))
    }
}

/// Eigenvector branch of the invariant: `+λ` or `−λ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub const BOTH: [Branch; 2] = [Branch::Plus, Branch::Minus];

    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

/// `(cos θ, sin θ)` of an invariant eigenvector; `sin θ ≥ 0` always.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MixingAngle {
    pub cos: f64,
    pub sin: f64,
}

impl MixingAngle {
    fn from_unnormalized(c: f64, s: f64) -> Self {
        let n = c.hypot(s);
        Self {
            cos: c / n,
            sin: s / n,
        }
    }

    /// `(e^{−iωt} cos θ, sin θ)`.
    pub fn eigenvector(&self, omega_drive: f64, t: f64) -> Ket {
        Ket::new(
            Complex64::from_polar(self.cos, -omega_drive * t),
            Complex64::new(self.sin, 0.0),
        )
    }
}

/// Eigen-decomposition of `I(t)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InvariantEigensystem {
    pub lambda: f64,
    pub theta_plus: MixingAngle,
    pub theta_minus: MixingAngle,
    pub eigvec_plus: Ket,
    pub eigvec_minus: Ket,
}

impl InvariantEigensystem {
    pub fn eigvec(&self, branch: Branch) -> Ket {
        match branch {
            Branch::Plus => self.eigvec_plus,
            Branch::Minus => self.eigvec_minus,
        }
    }
}

pub fn hamiltonian(p: &DriveParams, t: f64) -> Unitary2 {
    Unitary2::pauli_vector(hamiltonian_vector(p, t))
}

/// `H(t)` as its Pauli vector `h`, with `H = h·σ`.
pub(crate) fn hamiltonian_vector(p: &DriveParams, t: f64) -> [f64; 3] {
    let (s, c) = (p.omega_drive * t).sin_cos();
    [
        0.5 * p.omega_rabi * c,
        0.5 * p.omega_rabi * s,
        0.5 * p.detuning,
    ]
}

pub fn invariant(p: &DriveParams, t: f64) -> Unitary2 {
    let (s, c) = (p.omega_drive * t).sin_cos();
    Unitary2::pauli_vector([
        p.omega_rabi * c,
        p.omega_rabi * s,
        p.detuning - p.omega_drive,
    ])
}

/// Mixing angles `(θ+, θ−)`. They do not depend on time.
///
/// Each eigenvector is proportional to `(ξ±, 1)`, which is evaluated from
/// whichever of the two equivalent forms `((Δ−ω) ± λ, Ω)` or
/// `(Ω, λ ∓ (Δ−ω))` avoids cancellation. With Ω = 0 this yields the
/// Ω → 0⁺ limit exactly. When λ = 0 the invariant vanishes; the basis
/// returned there is the limit along the holonomy curve as β → 0⁺.
pub fn mixing_angles(p: &DriveParams) -> (MixingAngle, MixingAngle) {
    let omega = p.omega_drive;
    let lambda = p.lambda();
    if lambda < SINGULAR_TOL * omega {
        return (
            MixingAngle {
                cos: FRAC_1_SQRT_2,
                sin: FRAC_1_SQRT_2,
            },
            MixingAngle {
                cos: -FRAC_1_SQRT_2,
                sin: FRAC_1_SQRT_2,
            },
        );
    }
    let rabi = if p.omega_rabi < SINGULAR_TOL * omega {
        0.0
    } else {
        p.omega_rabi
    };
    let d = p.detuning - omega;
    let plus = if d >= 0.0 {
        MixingAngle::from_unnormalized(d + lambda, rabi)
    } else {
        MixingAngle::from_unnormalized(rabi, lambda - d)
    };
    let minus = if d <= 0.0 {
        MixingAngle::from_unnormalized(d - lambda, rabi)
    } else {
        MixingAngle::from_unnormalized(-rabi, d + lambda)
    };
    (plus, minus)
}

pub fn eigensystem(p: &DriveParams, t: f64) -> InvariantEigensystem {
    let (theta_plus, theta_minus) = mixing_angles(p);
    InvariantEigensystem {
        lambda: p.lambda(),
        theta_plus,
        theta_minus,
        eigvec_plus: theta_plus.eigenvector(p.omega_drive, t),
        eigvec_minus: theta_minus.eigenvector(p.omega_drive, t),
    }
}

pub fn eigenvector(p: &DriveParams, t: f64, branch: Branch) -> Ket {
    let (plus, minus) = mixing_angles(p);
    match branch {
        Branch::Plus => plus.eigenvector(p.omega_drive, t),
        Branch::Minus => minus.eigenvector(p.omega_drive, t),
    }
}

/// `d|φ±(t)⟩/dt`; only the `e^{−iωt}` factor carries time dependence.
pub fn eigenvector_derivative(p: &DriveParams, t: f64, branch: Branch) -> Ket {
    let (plus, minus) = mixing_angles(p);
    let theta = match branch {
        Branch::Plus => plus,
        Branch::Minus => minus,
    };
    let w = p.omega_drive;
    Ket::new(
        Complex64::new(0.0, -w) * Complex64::from_polar(theta.cos, -w * t),
        Complex64::new(0.0, 0.0),
    )
}

/// Closed-form Lewis-Riesenfeld phases `α±(t) = (ω ∓ λ)t/2`.
pub fn lr_phase(p: &DriveParams, t: f64) -> (f64, f64) {
    let lambda = p.lambda();
    let w = p.omega_drive;
    (0.5 * (w - lambda) * t, 0.5 * (w + lambda) * t)
}

/// `Ω² + Δ(Δ−ω)`; zero exactly on the holonomy curve.
pub fn holonomy_residual(p: &DriveParams) -> f64 {
    p.omega_rabi * p.omega_rabi + p.detuning * (p.detuning - p.omega_drive)
}

/// `Δ = ω cos²β`, `Ω = ω cos β sin β`.
pub fn params_from_beta(g: &HolonomicGate) -> DriveParams {
    let (s, c) = g.beta.sin_cos();
    let w = g.omega_drive;
    DriveParams {
        omega_rabi: (w * c * s).max(0.0),
        detuning: w * c * c,
        omega_drive: w,
    }
}

/// `U_β(T) = −exp(iπ sin β (−cos β σx + sin β σz))`.
pub fn analytic_gate(g: &HolonomicGate) -> Unitary2 {
    let (s, c) = g.beta.sin_cos();
    -su2_exp(PI * s, [-c, 0.0, s]).expect("axis (-cos b, 0, sin b) has unit norm")
}

/// `⟨φ±(t)|H(t)|φ±(t)⟩`.
pub fn dynamical_integrand(p: &DriveParams, t: f64, branch: Branch) -> f64 {
    let phi = eigenvector(p, t, branch);
    phi.expectation(&hamiltonian(p, t)).re
}

/// `i⟨φ±(t)|dφ±(t)/dt⟩`.
pub fn geometric_integrand(p: &DriveParams, t: f64, branch: Branch) -> f64 {
    let phi = eigenvector(p, t, branch);
    let dphi = eigenvector_derivative(p, t, branch);
    (Complex64::new(0.0, 1.0) * phi.inner(&dphi)).re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::su2::{pauli, Axis};
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_4;

    fn params(o: f64, d: f64, w: f64) -> DriveParams {
        DriveParams::new(o, d, w).unwrap()
    }

    fn real(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn drive_params_validation() {
        assert!(DriveParams::new(1.0, 0.0, 0.0).is_err());
        assert!(DriveParams::new(1.0, 0.0, -1.0).is_err());
        assert!(DriveParams::new(-1.0, 0.0, 1.0).is_err());
        assert!(DriveParams::new(1.0, f64::NAN, 1.0).is_err());
        assert!(DriveParams::new(0.0, -3.0, 1.0).is_ok());
    }

    #[test]
    fn holonomic_gate_validation() {
        assert!(HolonomicGate::unit(-1e-3).is_err());
        assert!(HolonomicGate::unit(2.0).is_err());
        assert!(HolonomicGate::unit(f64::NAN).is_err());
        assert!(HolonomicGate::new(0.5, 0.0).is_err());
        assert!(HolonomicGate::unit(0.0).is_ok());
        assert!(HolonomicGate::unit(FRAC_PI_2).is_ok());
    }

    #[test]
    fn hamiltonian_examples() {
        let h = hamiltonian(&params(0.0, 1.0, 1.0), 0.0);
        assert!(h.max_abs_diff(&pauli(Axis::Z).scale(real(0.5))) < 1e-15);
        let h = hamiltonian(&params(1.0, 0.0, 1.0), 0.0);
        assert!(h.max_abs_diff(&pauli(Axis::X).scale(real(0.5))) < 1e-15);
        let h = hamiltonian(&params(1.0, 1.0, 1.0), FRAC_PI_2);
        let expected = (pauli(Axis::Y) + pauli(Axis::Z)).scale(real(0.5));
        assert!(h.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn invariant_examples() {
        let i = invariant(&params(1.0, 1.0, 1.0), 0.0);
        assert!(i.max_abs_diff(&pauli(Axis::X)) < 1e-15);
        for t in [0.0, 0.3, 7.1] {
            let i = invariant(&params(0.0, 2.0, 1.0), t);
            assert!(i.max_abs_diff(&pauli(Axis::Z)) < 1e-15);
        }
        let i = invariant(&params(1.0, 0.0, 1.0), 0.0);
        assert!(i.max_abs_diff(&(pauli(Axis::X) - pauli(Axis::Z))) < 1e-15);
    }

    #[test]
    fn eigensystem_examples() {
        let e = eigensystem(&params(1.0, 1.0, 1.0), 0.0);
        assert!((e.lambda - 1.0).abs() < 1e-15);
        let v = e.eigvec_plus.0;
        assert!((v[0] - real(FRAC_1_SQRT_2)).norm() < 1e-15);
        assert!((v[1] - real(FRAC_1_SQRT_2)).norm() < 1e-15);

        let e = eigensystem(&params(0.0, 2.0, 1.0), 0.0);
        assert_eq!(e.lambda, 1.0);
        assert_eq!(e.eigvec_plus, Ket::zero_state());
        assert_eq!(e.eigvec_minus, Ket::one_state());

        for t in [0.0, 1.3] {
            let e = eigensystem(&params(3.0, 0.0, 5.0), t);
            assert!((e.lambda - 34f64.sqrt()).abs() < 1e-14);
        }
    }

    #[test]
    fn singular_rabi_takes_limit_basis() {
        // Δ < ω: the +λ vector is |1⟩, the −λ vector is −e^{−iωt}|0⟩.
        let p = params(0.0, 0.0, 1.0);
        let e = eigensystem(&p, 0.0);
        assert_eq!(e.theta_plus, MixingAngle { cos: 0.0, sin: 1.0 });
        assert_eq!(
            e.theta_minus,
            MixingAngle {
                cos: -1.0,
                sin: 0.0
            }
        );
        // Matches a tiny positive Ω.
        let q = params(1e-9, 0.0, 1.0);
        let f = eigensystem(&q, 0.0);
        assert!((f.theta_plus.cos - e.theta_plus.cos).abs() < 1e-8);
        assert!((f.theta_minus.cos - e.theta_minus.cos).abs() < 1e-8);
    }

    #[test]
    fn degenerate_invariant_basis_is_orthonormal() {
        let p = params(0.0, 1.0, 1.0);
        let e = eigensystem(&p, 0.4);
        assert_eq!(e.lambda, 0.0);
        assert!(e.eigvec_plus.inner(&e.eigvec_minus).norm() < 1e-15);
        assert!(dynamical_integrand(&p, 0.4, Branch::Plus).abs() < 1e-15);
    }

    #[test]
    fn lr_phase_examples() {
        let p = params(0.7, 0.2, 1.3);
        assert_eq!(lr_phase(&p, 0.0), (0.0, 0.0));
        // λ = ω when Ω = 0 and Δ = 0.
        let (a, b) = lr_phase(&params(0.0, 0.0, 1.0), 2.0 * PI);
        assert!(a.abs() < 1e-15 && (b - 2.0 * PI).abs() < 1e-15);
        // Ω = 0, Δ = ω is the degenerate point λ = 0.
        let (a, b) = lr_phase(&params(0.0, 1.0, 1.0), 2.0 * PI);
        assert!((a - PI).abs() < 1e-15 && (b - PI).abs() < 1e-15);

        // λ computed by brute force from the derived drive.
        let beta = PI / 6.0;
        let (delta, rabi) = (beta.cos().powi(2), beta.cos() * beta.sin());
        let lambda_brute = (rabi * rabi + (delta - 1.0) * (delta - 1.0)).sqrt();
        assert!((lambda_brute - 0.5).abs() < 1e-15);
        let p = params_from_beta(&HolonomicGate::unit(beta).unwrap());
        let (a, b) = lr_phase(&p, 2.0 * PI);
        assert!((a - FRAC_PI_2).abs() < 1e-12);
        assert!((b - 1.5 * PI).abs() < 1e-12);
    }

    #[test]
    fn holonomy_residual_examples() {
        assert_eq!(holonomy_residual(&params(0.0, 1.0, 1.0)), 0.0);
        assert_eq!(holonomy_residual(&params(0.5, 0.5, 1.0)), 0.0);
        assert_eq!(holonomy_residual(&params(1.0, 1.0, 1.0)), 1.0);
    }

    #[test]
    fn params_from_beta_examples() {
        let p = params_from_beta(&HolonomicGate::unit(0.0).unwrap());
        assert_eq!((p.omega_rabi(), p.detuning()), (0.0, 1.0));
        let p = params_from_beta(&HolonomicGate::unit(FRAC_PI_2).unwrap());
        assert!(p.omega_rabi().abs() < 1e-15 && p.detuning().abs() < 1e-15);
        let p = params_from_beta(&HolonomicGate::unit(FRAC_PI_4).unwrap());
        assert!((p.omega_rabi() - 0.5).abs() < 1e-15);
        assert!((p.detuning() - 0.5).abs() < 1e-15);
        assert!(holonomy_residual(&p).abs() <= 1e-12);
    }

    #[test]
    fn analytic_gate_examples() {
        let u = analytic_gate(&HolonomicGate::unit(0.0).unwrap());
        assert!(u.max_abs_diff(&-Unitary2::identity()) < 1e-15);
        let u = analytic_gate(&HolonomicGate::unit(FRAC_PI_2).unwrap());
        assert!(u.max_abs_diff(&Unitary2::identity()) < 1e-15);

        let a = PI / 2f64.sqrt();
        let n = (pauli(Axis::Z) - pauli(Axis::X)).scale(real(FRAC_1_SQRT_2));
        let expected =
            -(Unitary2::identity().scale(real(a.cos())) + n.scale(Complex64::new(0.0, a.sin())));
        let u = analytic_gate(&HolonomicGate::unit(FRAC_PI_4).unwrap());
        assert!(u.max_abs_diff(&expected) < 1e-15);
        assert!((u.det() - real(1.0)).norm() < 1e-12);
    }

    #[test]
    fn dynamical_integrand_examples() {
        let p = params_from_beta(&HolonomicGate::unit(FRAC_PI_4).unwrap());
        for t in [0.0, 0.9, 3.3, 6.0] {
            for b in Branch::BOTH {
                assert!(dynamical_integrand(&p, t, b).abs() < 1e-12);
            }
        }
        assert!(
            (dynamical_integrand(&params(0.0, 2.0, 1.0), 0.5, Branch::Plus) - 1.0).abs() < 1e-15
        );

        let p = params_from_beta(&HolonomicGate::unit(0.423).unwrap());
        let period = p.period();
        for k in 0..100 {
            let t = period * k as f64 / 99.0;
            for b in Branch::BOTH {
                assert!(dynamical_integrand(&p, t, b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn spectral_form_reproduces_analytic_gate() {
        for k in 0..=20 {
            let g = HolonomicGate::unit(FRAC_PI_2 * k as f64 / 20.0).unwrap();
            let p = params_from_beta(&g);
            let e = eigensystem(&p, 0.0);
            let (ap, am) = lr_phase(&p, p.period());
            let u = e
                .eigvec_plus
                .outer(&e.eigvec_plus)
                .scale(Complex64::from_polar(1.0, ap))
                + e.eigvec_minus
                    .outer(&e.eigvec_minus)
                    .scale(Complex64::from_polar(1.0, am));
            assert!(
                u.max_abs_diff(&analytic_gate(&g)) < 1e-10,
                "beta {}",
                g.beta()
            );
        }
    }

    fn any_params() -> impl Strategy<Value = DriveParams> {
        (0.0..3.0f64, -3.0..3.0f64, 0.1..3.0f64).prop_map(|(o, d, w)| params(o, d, w))
    }

    proptest! {
        #[test]
        fn eigenvectors_diagonalize_invariant(p in any_params(), t in -10.0..10.0f64) {
            let e = eigensystem(&p, t);
            let inv = invariant(&p, t);
            prop_assert!((e.lambda - p.lambda()).abs() <= 1e-12);
            prop_assert!(e.eigvec_plus.inner(&e.eigvec_minus).norm() <= 1e-12);
            prop_assert!((e.eigvec_plus.norm() - 1.0).abs() <= 1e-12);
            prop_assert!((e.eigvec_minus.norm() - 1.0).abs() <= 1e-12);
            for (v, s) in [(e.eigvec_plus, 1.0), (e.eigvec_minus, -1.0)] {
                let lhs = inv.apply(&v);
                for k in 0..2 {
                    prop_assert!((lhs.0[k] - v.0[k] * s * e.lambda).norm() <= 1e-10);
                }
            }
            prop_assert!(e.theta_plus.sin >= 0.0 && e.theta_minus.sin >= 0.0);
        }

        #[test]
        fn operators_are_periodic(p in any_params(), t in -5.0..5.0f64) {
            let t2 = t + p.period();
            prop_assert!(hamiltonian(&p, t).max_abs_diff(&hamiltonian(&p, t2)) <= 1e-12);
            prop_assert!(invariant(&p, t).max_abs_diff(&invariant(&p, t2)) <= 1e-12);
            for b in Branch::BOTH {
                let (u, v) = (eigenvector(&p, t, b), eigenvector(&p, t2, b));
                prop_assert!((u.0[0] - v.0[0]).norm() <= 1e-12 && (u.0[1] - v.0[1]).norm() <= 1e-12);
            }
        }

        #[test]
        fn holonomic_lambda_is_omega_sin_beta(beta in 0.0..=FRAC_PI_2, w in 0.1..5.0f64) {
            let g = HolonomicGate::new(beta, w).unwrap();
            let p = params_from_beta(&g);
            prop_assert!((p.lambda() - w * beta.sin()).abs() <= 1e-12 * w.max(1.0));
            prop_assert!(holonomy_residual(&p).abs() <= 1e-12 * w * w);
            if beta > 0.0 && beta < FRAC_PI_2 {
                prop_assert!(p.omega_rabi() > 0.0);
            }
        }

        #[test]
        fn analytic_gate_eigenphases(beta in 0.0..=FRAC_PI_2) {
            let u = analytic_gate(&HolonomicGate::unit(beta).unwrap());
            let s = beta.sin();
            let expected = [PI * (1.0 - s), PI * (1.0 + s)];
            let got = u.unitary_eigen();
            let d = |a: f64, b: f64| crate::su2::phase_distance(a, b);
            let direct = d(got[0].0, expected[0]).max(d(got[1].0, expected[1]));
            let swapped = d(got[0].0, expected[1]).max(d(got[1].0, expected[0]));
            prop_assert!(direct.min(swapped) <= 1e-10);
        }
    }
}
