//! Brute-force time-ordered propagation and numerical checks of the
//! invariant-based closed forms.
//!
//! The propagator is a product of midpoint exponentials
//! `exp(−i H(t_mid) δt)`; each factor is an exact SU(2) element because `H`
//! is a Pauli vector, so the product stays unitary without renormalisation
//! and converges at second order in `δt`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{out_of_range, Error, Result};
use crate::model::{
    self, eigenvector, hamiltonian, hamiltonian_vector, invariant, Branch, DriveParams,
};
use crate::su2::{pauli_vector_exp, phase_distance, Unitary2};

/// Steps per period used when the caller does not choose.
pub const DEFAULT_STEPS: usize = 10_000;

/// Fewest steps accepted by [`full_report`] and [`spectral_propagator`].
pub const MIN_REPORT_STEPS: usize = 16;

/// A propagated `U(T)` further than this from unitary aborts the report.
pub const UNITARITY_ABORT_TOL: f64 = 1e-8;

/// Per-branch pair of values, `(plus, minus)`.
pub type BranchPair = (f64, f64);

/// Numerical one-period evolution and everything derived from it.
#[derive(Clone, Debug, PartialEq)]
pub struct EvolutionReport {
    pub params: DriveParams,
    pub steps: usize,
    pub propagator: Unitary2,
    pub unitarity_defect: f64,
    /// `γ^g + γ^d`, integrated on the propagation grid.
    pub alpha_numeric: BranchPair,
    /// `α±(T)` from the closed form, for comparison.
    pub alpha_closed_form: BranchPair,
    pub gamma_geometric: BranchPair,
    pub gamma_dynamical: BranchPair,
    /// `max |⟨φ±(t)|H(t)|φ±(t)⟩|` over the grid and both branches.
    pub max_integrand: f64,
    /// `1 − min_k |⟨φ_k(T)|U(T)|φ_k(0)⟩|`.
    pub transitionless_defect: f64,
    /// Eigenphases of `U(T)` in `[0, 2π)`, matched to branches by overlap
    /// with `|φ±(0)⟩`.
    pub aa_eigenphases: BranchPair,
}

/// Phase integrals over one period.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseIntegrals {
    pub gamma_geometric: BranchPair,
    pub gamma_dynamical: BranchPair,
    pub max_integrand: f64,
}

impl PhaseIntegrals {
    pub fn alpha(&self) -> BranchPair {
        (
            self.gamma_geometric.0 + self.gamma_dynamical.0,
            self.gamma_geometric.1 + self.gamma_dynamical.1,
        )
    }
}

fn check_steps(steps: usize, min: usize) -> Result<()> {
    if steps < min {
        return Err(out_of_range(
            "steps",
            steps as f64,
            if min <= 1 { ">= 1" } else { ">= 16" },
        ));
    }
    Ok(())
}

/// Midpoint product over `[t0, t1]` in `steps` uniform slices.
fn propagate_interval(p: &DriveParams, t0: f64, t1: f64, steps: usize) -> Unitary2 {
    let dt = (t1 - t0) / steps as f64;
    (0..steps).fold(Unitary2::identity(), |u, k| {
        let t_mid = t0 + (k as f64 + 0.5) * dt;
        let h = hamiltonian_vector(p, t_mid);
        pauli_vector_exp([-h[0] * dt, -h[1] * dt, -h[2] * dt]) * u
    })
}

/// Time-ordered `U(duration)` from `t = 0`.
pub fn propagate(p: &DriveParams, duration: f64, steps: usize) -> Result<Unitary2> {
    check_steps(steps, 1)?;
    if !(duration >= 0.0 && duration.is_finite()) {
        return Err(out_of_range("duration", duration, "finite and >= 0"));
    }
    Ok(propagate_interval(p, 0.0, duration, steps))
}

/// `U(t_j)` at `samples` evenly spaced times `t_j ∈ [0, duration]`, built as
/// partial products of one propagation. At least `steps` midpoint slices are
/// used in total.
pub fn propagate_samples(
    p: &DriveParams,
    duration: f64,
    steps: usize,
    samples: usize,
) -> Result<Vec<(f64, Unitary2)>> {
    check_steps(steps, 1)?;
    if samples < 2 {
        return Err(out_of_range("samples", samples as f64, ">= 2"));
    }
    if !(duration >= 0.0 && duration.is_finite()) {
        return Err(out_of_range("duration", duration, "finite and >= 0"));
    }
    let intervals = samples - 1;
    let sub = steps.div_ceil(intervals).max(1);
    let time = |j: usize| duration * j as f64 / intervals as f64;
    let mut out = Vec::with_capacity(samples);
    let mut u = Unitary2::identity();
    out.push((0.0, u));
    for j in 1..samples {
        u = propagate_interval(p, time(j - 1), time(j), sub) * u;
        out.push((time(j), u));
    }
    Ok(out)
}

/// Composite-trapezoid `γ^g = ∫ i⟨φ|∂φ⟩` and `γ^d = −∫ ⟨φ|H|φ⟩` over one
/// period on a grid of `steps` intervals.
pub fn phase_integrals(p: &DriveParams, steps: usize) -> Result<PhaseIntegrals> {
    check_steps(steps, 1)?;
    let period = p.period();
    let dt = period / steps as f64;
    let mut geo = [0.0; 2];
    let mut dyn_ = [0.0; 2];
    let mut max_integrand: f64 = 0.0;
    for j in 0..=steps {
        let t = j as f64 * dt;
        let w = if j == 0 || j == steps { 0.5 } else { 1.0 };
        for (k, branch) in Branch::BOTH.into_iter().enumerate() {
            let g = model::geometric_integrand(p, t, branch);
            let d = model::dynamical_integrand(p, t, branch);
            geo[k] += w * g;
            dyn_[k] += w * d;
            max_integrand = max_integrand.max(d.abs());
        }
    }
    Ok(PhaseIntegrals {
        gamma_geometric: (geo[0] * dt, geo[1] * dt),
        gamma_dynamical: (-dyn_[0] * dt, -dyn_[1] * dt),
        max_integrand,
    })
}

/// Propagates one period and checks every invariant-based claim against it.
pub fn full_report(p: &DriveParams, steps: usize) -> Result<EvolutionReport> {
    check_steps(steps, MIN_REPORT_STEPS)?;
    let period = p.period();
    let propagator = propagate(p, period, steps)?;
    let unitarity_defect = propagator.unitarity_defect();
    if unitarity_defect.is_nan() || unitarity_defect > UNITARITY_ABORT_TOL {
        return Err(Error::Inconsistent(format!(
            "propagator unitarity defect {unitarity_defect:e} exceeds {UNITARITY_ABORT_TOL:e}"
        )));
    }

    let phases = phase_integrals(p, steps)?;

    let transitionless_defect = Branch::BOTH
        .into_iter()
        .map(|b| {
            let start = eigenvector(p, 0.0, b);
            let end = eigenvector(p, period, b);
            (1.0 - end.inner(&propagator.apply(&start)).norm()).abs()
        })
        .fold(0.0, f64::max);

    Ok(EvolutionReport {
        params: *p,
        steps,
        propagator,
        unitarity_defect,
        alpha_numeric: phases.alpha(),
        alpha_closed_form: model::lr_phase(p, period),
        gamma_geometric: phases.gamma_geometric,
        gamma_dynamical: phases.gamma_dynamical,
        max_integrand: phases.max_integrand,
        transitionless_defect,
        aa_eigenphases: aa_eigenphases(p, &propagator),
    })
}

/// Eigenphases of `u`, ordered `(plus, minus)` by which eigenvector overlaps
/// more with `|φ+(0)⟩`.
pub fn aa_eigenphases(p: &DriveParams, u: &Unitary2) -> BranchPair {
    let [(c0, v0), (c1, v1)] = u.unitary_eigen();
    let plus = eigenvector(p, 0.0, Branch::Plus);
    if plus.inner(&v0).norm() >= plus.inner(&v1).norm() {
        (c0, c1)
    } else {
        (c1, c0)
    }
}

/// Largest circular distance between two unordered pairs of phases, after
/// choosing the pairing that minimises it.
pub fn phase_set_distance(found: BranchPair, expected: BranchPair) -> f64 {
    let direct = phase_distance(found.0, expected.0).max(phase_distance(found.1, expected.1));
    let swapped = phase_distance(found.0, expected.1).max(phase_distance(found.1, expected.0));
    direct.min(swapped)
}

/// `U(T) = Σ± e^{iα±(T)} |φ±(T)⟩⟨φ±(0)|` with the phases integrated
/// numerically.
pub fn spectral_propagator(p: &DriveParams, steps: usize) -> Result<Unitary2> {
    check_steps(steps, MIN_REPORT_STEPS)?;
    let period = p.period();
    let (alpha_plus, alpha_minus) = phase_integrals(p, steps)?.alpha();
    Ok([(Branch::Plus, alpha_plus), (Branch::Minus, alpha_minus)]
        .into_iter()
        .fold(Unitary2::zero(), |acc, (b, alpha)| {
            let end = eigenvector(p, period, b);
            let start = eigenvector(p, 0.0, b);
            acc + end.outer(&start).scale(Complex64::from_polar(1.0, alpha))
        }))
}

/// `‖(I(t+h) − I(t−h))/(2h) + i[H(t), I(t)]‖_max`, the central-difference
/// residual of `i ∂I/∂t = [H, I]`.
pub fn invariant_residual(p: &DriveParams, t: f64, h: f64) -> Result<f64> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(out_of_range("h", h, "finite and > 0"));
    }
    let derivative =
        (invariant(p, t + h) - invariant(p, t - h)).scale(Complex64::new(0.5 / h, 0.0));
    let commutator = hamiltonian(p, t).commutator(&invariant(p, t));
    Ok((derivative + commutator.scale(Complex64::new(0.0, 1.0))).max_abs())
}

/// `π(1 ∓ sin β)`, the closed-form eigenphases of a holonomic gate.
pub fn holonomic_eigenphases(beta: f64) -> BranchPair {
    let s = beta.sin();
    (PI * (1.0 - s), PI * (1.0 + s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{analytic_gate, params_from_beta, HolonomicGate};
    use crate::su2::{pauli, Axis};
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn params(o: f64, d: f64, w: f64) -> DriveParams {
        DriveParams::new(o, d, w).unwrap()
    }

    fn holonomic(beta: f64) -> DriveParams {
        params_from_beta(&HolonomicGate::unit(beta).unwrap())
    }

    #[test]
    fn propagate_trivial_cases() {
        let p = params(0.7, 0.3, 1.0);
        assert_eq!(propagate(&p, 0.0, 10).unwrap(), Unitary2::identity());

        let u = propagate(&params(0.0, 1.0, 1.0), 2.0 * PI, 1).unwrap();
        assert!(u.max_abs_diff(&-Unitary2::identity()) < 1e-15);
    }

    #[test]
    fn propagate_rejects_bad_input() {
        let p = params(1.0, 0.0, 1.0);
        assert!(propagate(&p, 1.0, 0).is_err());
        assert!(propagate(&p, -1.0, 4).is_err());
        assert!(full_report(&p, 15).is_err());
        assert!(spectral_propagator(&p, 8).is_err());
        assert!(invariant_residual(&p, 0.0, 0.0).is_err());
        assert!(propagate_samples(&p, 1.0, 100, 1).is_err());
    }

    #[test]
    fn propagate_matches_analytic_gate() {
        let g = HolonomicGate::unit(0.3).unwrap();
        let p = params_from_beta(&g);
        let exact = analytic_gate(&g);
        let e1 = propagate(&p, p.period(), 10_000)
            .unwrap()
            .max_abs_diff(&exact);
        let e2 = propagate(&p, p.period(), 20_000)
            .unwrap()
            .max_abs_diff(&exact);
        assert!(e1 <= 1e-7, "error {e1:e}");
        let ratio = e1 / e2;
        assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn samples_end_at_full_propagator() {
        let p = holonomic(FRAC_PI_4);
        let path = propagate_samples(&p, p.period(), 1000, 11).unwrap();
        assert_eq!(path.len(), 11);
        assert_eq!(path[0].0, 0.0);
        assert!((path[10].0 - p.period()).abs() < 1e-15);
        let full = propagate(&p, p.period(), 1000).unwrap();
        assert!(path[10].1.max_abs_diff(&full) < 1e-12);
    }

    #[test]
    fn report_holonomic_quarter_pi() {
        let p = holonomic(FRAC_PI_4);
        let r = full_report(&p, 10_000).unwrap();
        assert!(r.gamma_dynamical.0.abs() <= 1e-8 && r.gamma_dynamical.1.abs() <= 1e-8);
        let s = FRAC_PI_4.sin();
        assert!((r.alpha_numeric.0 - PI * (1.0 - s)).abs() <= 1e-6);
        assert!((r.alpha_numeric.1 - PI * (1.0 + s)).abs() <= 1e-6);
        let split = (
            r.gamma_geometric.0 + r.gamma_dynamical.0,
            r.gamma_geometric.1 + r.gamma_dynamical.1,
        );
        assert_eq!(split, r.alpha_numeric);
    }

    #[test]
    fn report_non_holonomic_has_dynamical_phase() {
        let p = params(1.0, 1.0, 1.0);
        let r = full_report(&p, 10_000).unwrap();
        // φ+ = (1,1)/√2 up to phase, ⟨φ+|H|φ+⟩ = ½(λ + ω cos 2θ+) = ½,
        // so γ^d_+ = −½·2π = −π.
        assert!(r.gamma_dynamical.0.abs() > 0.1);
        assert!((r.gamma_dynamical.0 + PI).abs() < 1e-9);
    }

    #[test]
    fn report_transitionless() {
        let r = full_report(&holonomic(0.5), 10_000).unwrap();
        assert!(r.transitionless_defect <= 1e-7);
    }

    #[test]
    fn spectral_propagator_examples() {
        let u = spectral_propagator(&params(0.0, 1.0, 1.0), 10_000).unwrap();
        assert!(u.max_abs_diff(&-Unitary2::identity()) < 1e-10);

        let g = HolonomicGate::unit(0.3).unwrap();
        let u = spectral_propagator(&params_from_beta(&g), 10_000).unwrap();
        assert!(u.max_abs_diff(&analytic_gate(&g)) < 1e-6);

        let p = holonomic(0.423);
        let u = spectral_propagator(&p, 10_000).unwrap();
        let v = propagate(&p, p.period(), 10_000).unwrap();
        assert!(u.max_abs_diff(&v) < 1e-6);
    }

    #[test]
    fn invariant_residual_examples() {
        let p = params(1.0, 0.0, 2.0);
        let r1 = invariant_residual(&p, 0.7, 1e-4).unwrap();
        let r2 = invariant_residual(&p, 0.7, 5e-5).unwrap();
        // Central difference of Ω e^{−iωt}: error Ωω³h²/6.
        assert!((r1 - 8.0 * 1e-8 / 6.0).abs() < 1e-11);
        let ratio = r1 / r2;
        assert!((3.9..=4.1).contains(&ratio), "ratio {ratio}");

        let r = invariant_residual(&params(0.0, 0.4, 1.0), 0.3, 1e-5).unwrap();
        assert!(r <= 1e-12);
    }

    #[test]
    fn aa_phases_at_singular_ends() {
        for beta in [0.0, FRAC_PI_2] {
            let r = full_report(&holonomic(beta), 64).unwrap();
            assert!(phase_set_distance(r.aa_eigenphases, holonomic_eigenphases(beta)) < 1e-12);
        }
    }

    #[test]
    fn phase_set_distance_wraps() {
        assert!(phase_set_distance((2.0 * PI - 1e-9, 1.0), (1.0, 0.0)) < 2e-9);
    }

    #[test]
    fn sigma_z_drive_has_exact_single_step() {
        let p = params(0.0, 2.0, 1.0);
        let u = propagate(&p, 1.0, 1).unwrap();
        let exact = crate::su2::su2_exp(-1.0, [0.0, 0.0, 1.0]).unwrap();
        assert!(u.max_abs_diff(&exact) < 1e-15);
        assert_eq!(pauli(Axis::Z).trace().re, 0.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn propagator_stays_unitary(o in 0.0..2.0f64, d in -2.0..2.0f64, w in 0.2..2.0f64, steps in 1usize..4000) {
            let p = params(o, d, w);
            let u = propagate(&p, p.period(), steps).unwrap();
            prop_assert!(u.unitarity_defect() <= 1e-12 * steps as f64);
        }

        #[test]
        fn phase_split_is_exact(beta in 0.0..=FRAC_PI_2) {
            let r = full_report(&holonomic(beta), 256).unwrap();
            prop_assert_eq!(r.alpha_numeric.0, r.gamma_geometric.0 + r.gamma_dynamical.0);
            prop_assert_eq!(r.alpha_numeric.1, r.gamma_geometric.1 + r.gamma_dynamical.1);
        }
    }
}
