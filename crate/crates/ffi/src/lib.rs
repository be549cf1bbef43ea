//! C ABI for the `holonomic` library.
//!
//! Every fallible function returns an [`HgStatus`]; outputs go through
//! caller-provided pointers, which are left untouched on failure. After a
//! non-`HG_OK` status, [`hg_last_error_message`] describes what went wrong.
//!
//! Evolution reports and synthesis results are opaque handles. Create them
//! with `hg_evolution_report_new` / `hg_synthesize`, read them with the
//! getters, and release them with the matching `_free` function.
//!
//! Matrices cross the boundary as [`HgMatrix2`]: row-major entries split
//! into real and imaginary parts.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use holonomic::evolution::{self, EvolutionReport};
use holonomic::model;
use holonomic::su2::{self, Unitary2};
use holonomic::synthesis::{
    self, NamedGate, PulseSequence, SynthesisConfig, SynthesisResult, TargetGate,
};
use holonomic::{DriveParams, Error, HolonomicGate};
use num_complex::Complex64;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HgStatus {
    Ok = 0,
    NullPointer = 1,
    OutOfRange = 2,
    NotUnitary = 3,
    ZeroAxis = 4,
    NotNormalized = 5,
    Inconsistent = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

/// A 2×2 complex matrix, row-major: index `2 * row + col`.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct HgMatrix2 {
    pub re: [f64; 4],
    pub im: [f64; 4],
}

/// Drive amplitude, detuning and drive frequency.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct HgDriveParams {
    pub omega_rabi: f64,
    pub detuning: f64,
    pub omega_drive: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HgNamedGate {
    Not = 0,
    Hadamard = 1,
    Phase = 2,
    T = 3,
}

/// Which fidelity `hg_synthesize` maximises.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HgObjective {
    Magnitude = 0,
    PhaseSensitive = 1,
}

/// Opaque evolution report.
pub struct HgEvolutionReport(EvolutionReport);

/// Opaque synthesis result.
pub struct HgSynthesisResult(SynthesisResult);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Failure(HgStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::OutOfRange { .. } => HgStatus::OutOfRange,
            Error::ZeroAxis => HgStatus::ZeroAxis,
            Error::NotNormalized(_) => HgStatus::NotNormalized,
            Error::NotUnitary(_) => HgStatus::NotUnitary,
            Error::Inconsistent(_) => HgStatus::Inconsistent,
        };
        Failure(status, e.to_string())
    }
}

fn null(name: &str) -> Failure {
    Failure(HgStatus::NullPointer, format!("{name} is null"))
}

/// Runs `f`, converting errors and panics into a status and a message.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> HgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            HgStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            HgStatus::Panic
        }
    }
}

unsafe fn out<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(name))
}

unsafe fn input<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(name))
}

impl From<&Unitary2> for HgMatrix2 {
    fn from(u: &Unitary2) -> Self {
        let mut m = HgMatrix2::default();
        for (k, z) in u.entries().iter().flatten().enumerate() {
            m.re[k] = z.re;
            m.im[k] = z.im;
        }
        m
    }
}

impl From<&HgMatrix2> for Unitary2 {
    fn from(m: &HgMatrix2) -> Self {
        let c = |k: usize| Complex64::new(m.re[k], m.im[k]);
        Unitary2::from_entries(c(0), c(1), c(2), c(3))
    }
}

impl From<&DriveParams> for HgDriveParams {
    fn from(p: &DriveParams) -> Self {
        Self {
            omega_rabi: p.omega_rabi(),
            detuning: p.detuning(),
            omega_drive: p.omega_drive(),
        }
    }
}

fn drive(p: &HgDriveParams) -> Result<DriveParams, Failure> {
    Ok(DriveParams::new(p.omega_rabi, p.detuning, p.omega_drive)?)
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn hg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or an empty string.
/// Valid until the next `hg_` call on the same thread.
#[no_mangle]
pub extern "C" fn hg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// `U_β` for drive frequency `omega_drive`.
///
/// # Safety
/// `out_gate` must be null or point to writable memory for one `HgMatrix2`.
#[no_mangle]
pub unsafe extern "C" fn hg_analytic_gate(
    beta: f64,
    omega_drive: f64,
    out_gate: *mut HgMatrix2,
) -> HgStatus {
    guard(|| {
        let dst = out(out_gate, "out_gate")?;
        let g = HolonomicGate::new(beta, omega_drive)?;
        *dst = (&model::analytic_gate(&g)).into();
        Ok(())
    })
}

/// Drive parameters that realise `U_β`.
///
/// # Safety
/// `out_params` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hg_params_from_beta(
    beta: f64,
    omega_drive: f64,
    out_params: *mut HgDriveParams,
) -> HgStatus {
    guard(|| {
        let dst = out(out_params, "out_params")?;
        let g = HolonomicGate::new(beta, omega_drive)?;
        *dst = (&model::params_from_beta(&g)).into();
        Ok(())
    })
}

/// Propagator `U(duration)` from `steps` midpoint slices.
///
/// # Safety
/// `params` must be null or valid for reads; `out_propagator` null or valid
/// for writes.
#[no_mangle]
pub unsafe extern "C" fn hg_propagate(
    params: *const HgDriveParams,
    duration: f64,
    steps: usize,
    out_propagator: *mut HgMatrix2,
) -> HgStatus {
    guard(|| {
        let p = drive(input(params, "params")?)?;
        let dst = out(out_propagator, "out_propagator")?;
        *dst = (&evolution::propagate(&p, duration, steps)?).into();
        Ok(())
    })
}

/// `|tr(U†V)|/2` and `Re tr(U†V)/2`.
///
/// # Safety
/// `u` and `v` must be null or valid for reads; the two outputs null or
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hg_fidelity(
    u: *const HgMatrix2,
    v: *const HgMatrix2,
    out_magnitude: *mut f64,
    out_phase_sensitive: *mut f64,
) -> HgStatus {
    guard(|| {
        let u: Unitary2 = input(u, "u")?.into();
        let v: Unitary2 = input(v, "v")?.into();
        let mag = out(out_magnitude, "out_magnitude")?;
        let ps = out(out_phase_sensitive, "out_phase_sensitive")?;
        let f = su2::fidelity(&u, &v);
        *mag = f.magnitude;
        *ps = f.phase_sensitive;
        Ok(())
    })
}

/// Product of `U_β` for `len` angles, first-acting first (ω = 1).
///
/// # Safety
/// `betas` must point to `len` readable doubles (may be null when `len` is
/// 0); `out_gate` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hg_compose(
    betas: *const f64,
    len: usize,
    out_gate: *mut HgMatrix2,
) -> HgStatus {
    guard(|| {
        let betas = slice(betas, len, "betas")?;
        let dst = out(out_gate, "out_gate")?;
        *dst = (&synthesis::compose_betas(betas)?).into();
        Ok(())
    })
}

unsafe fn slice<'a>(p: *const f64, len: usize, name: &str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(name));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

/// Standard gate matrix, including its conventional global phase.
///
/// # Safety
/// `out_gate` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hg_named_gate(gate: HgNamedGate, out_gate: *mut HgMatrix2) -> HgStatus {
    guard(|| {
        let dst = out(out_gate, "out_gate")?;
        *dst = (&named(gate).matrix()).into();
        Ok(())
    })
}

fn named(g: HgNamedGate) -> NamedGate {
    match g {
        HgNamedGate::Not => NamedGate::Not,
        HgNamedGate::Hadamard => NamedGate::Hadamard,
        HgNamedGate::Phase => NamedGate::Phase,
        HgNamedGate::T => NamedGate::T,
    }
}

/// Propagates one period and computes the phase bookkeeping.
///
/// # Safety
/// `params` must be null or valid for reads; `out_report` null or valid for
/// writes. The handle written to `out_report` must be released with
/// `hg_evolution_report_free`.
#[no_mangle]
pub unsafe extern "C" fn hg_evolution_report_new(
    params: *const HgDriveParams,
    steps: usize,
    out_report: *mut *mut HgEvolutionReport,
) -> HgStatus {
    guard(|| {
        let p = drive(input(params, "params")?)?;
        let dst = out(out_report, "out_report")?;
        let report = evolution::full_report(&p, steps)?;
        *dst = Box::into_raw(Box::new(HgEvolutionReport(report)));
        Ok(())
    })
}

/// # Safety
/// `report` must be null or a handle from `hg_evolution_report_new` that has
/// not been freed.
#[no_mangle]
pub unsafe extern "C" fn hg_evolution_report_free(report: *mut HgEvolutionReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// # Safety
/// `report` must be a live handle or null; `out_propagator` null or valid
/// for writes.
#[no_mangle]
pub unsafe extern "C" fn hg_evolution_report_propagator(
    report: *const HgEvolutionReport,
    out_propagator: *mut HgMatrix2,
) -> HgStatus {
    guard(|| {
        let r = &input(report, "report")?.0;
        *out(out_propagator, "out_propagator")? = (&r.propagator).into();
        Ok(())
    })
}

/// A per-branch quantity of an evolution report.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HgBranchQuantity {
    AlphaNumeric = 0,
    AlphaClosedForm = 1,
    GammaGeometric = 2,
    GammaDynamical = 3,
    AaEigenphases = 4,
}

/// Writes the `(+, −)` pair of `quantity`.
///
/// # Safety
/// `report` must be a live handle or null; both outputs null or valid for
/// writes.
#[no_mangle]
pub unsafe extern "C" fn hg_evolution_report_branches(
    report: *const HgEvolutionReport,
    quantity: HgBranchQuantity,
    out_plus: *mut f64,
    out_minus: *mut f64,
) -> HgStatus {
    guard(|| {
        let r = &input(report, "report")?.0;
        let plus = out(out_plus, "out_plus")?;
        let minus = out(out_minus, "out_minus")?;
        let pair = match quantity {
            HgBranchQuantity::AlphaNumeric => r.alpha_numeric,
            HgBranchQuantity::AlphaClosedForm => r.alpha_closed_form,
            HgBranchQuantity::GammaGeometric => r.gamma_geometric,
            HgBranchQuantity::GammaDynamical => r.gamma_dynamical,
            HgBranchQuantity::AaEigenphases => r.aa_eigenphases,
        };
        (*plus, *minus) = pair;
        Ok(())
    })
}

/// Scalar diagnostics of an evolution report.
///
/// # Safety
/// `report` must be a live handle or null; outputs null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hg_evolution_report_diagnostics(
    report: *const HgEvolutionReport,
    out_unitarity_defect: *mut f64,
    out_max_integrand: *mut f64,
    out_transitionless_defect: *mut f64,
) -> HgStatus {
    guard(|| {
        let r = &input(report, "report")?.0;
        let unitarity = out(out_unitarity_defect, "out_unitarity_defect")?;
        let integrand = out(out_max_integrand, "out_max_integrand")?;
        let transitionless = out(out_transitionless_defect, "out_transitionless_defect")?;
        *unitarity = r.unitarity_defect;
        *integrand = r.max_integrand;
        *transitionless = r.transitionless_defect;
        Ok(())
    })
}

/// Multi-start search for a `length`-pulse sequence approximating `target`.
/// Deterministic for fixed arguments.
///
/// # Safety
/// `target` must be null or valid for reads; `out_result` null or valid for
/// writes. Release the handle with `hg_synthesis_result_free`.
#[no_mangle]
pub unsafe extern "C" fn hg_synthesize(
    target: *const HgMatrix2,
    length: usize,
    restarts: usize,
    seed: u64,
    objective: HgObjective,
    out_result: *mut *mut HgSynthesisResult,
) -> HgStatus {
    guard(|| {
        let target = TargetGate::custom(input(target, "target")?.into())?;
        let dst = out(out_result, "out_result")?;
        let cfg = SynthesisConfig {
            restarts,
            objective: match objective {
                HgObjective::Magnitude => synthesis::Objective::Magnitude,
                HgObjective::PhaseSensitive => synthesis::Objective::PhaseSensitive,
            },
            ..Default::default()
        };
        let result = synthesis::synthesize(&target, length, &cfg, seed)?;
        *dst = Box::into_raw(Box::new(HgSynthesisResult(result)));
        Ok(())
    })
}

/// # Safety
/// `result` must be null or a handle from `hg_synthesize` that has not been
/// freed.
#[no_mangle]
pub unsafe extern "C" fn hg_synthesis_result_free(result: *mut HgSynthesisResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// Number of pulses in the result; 0 for a null handle.
///
/// # Safety
/// `result` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn hg_synthesis_result_len(result: *const HgSynthesisResult) -> usize {
    result.as_ref().map_or(0, |r| r.0.sequence.len())
}

/// Copies the β values into `buf`, which must hold at least
/// `hg_synthesis_result_len` doubles.
///
/// # Safety
/// `result` must be a live handle or null; `buf` must point to `capacity`
/// writable doubles.
#[no_mangle]
pub unsafe extern "C" fn hg_synthesis_result_betas(
    result: *const HgSynthesisResult,
    buf: *mut f64,
    capacity: usize,
) -> HgStatus {
    guard(|| {
        let betas = input(result, "result")?.0.sequence.betas();
        if capacity < betas.len() {
            return Err(Failure(
                HgStatus::BufferTooSmall,
                format!("need {} doubles, buffer holds {capacity}", betas.len()),
            ));
        }
        if betas.is_empty() {
            return Ok(());
        }
        if buf.is_null() {
            return Err(null("buf"));
        }
        ptr::copy_nonoverlapping(betas.as_ptr(), buf, betas.len());
        Ok(())
    })
}

/// Summary numbers of a synthesis result.
///
/// # Safety
/// `result` must be a live handle or null; outputs null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hg_synthesis_result_summary(
    result: *const HgSynthesisResult,
    out_infidelity: *mut f64,
    out_fidelity_magnitude: *mut f64,
    out_fidelity_phase_sensitive: *mut f64,
    out_converged: *mut bool,
) -> HgStatus {
    guard(|| {
        let r = &input(result, "result")?.0;
        let infidelity = out(out_infidelity, "out_infidelity")?;
        let magnitude = out(out_fidelity_magnitude, "out_fidelity_magnitude")?;
        let phase_sensitive = out(out_fidelity_phase_sensitive, "out_fidelity_phase_sensitive")?;
        let converged = out(out_converged, "out_converged")?;
        *infidelity = r.infidelity;
        *magnitude = r.fidelity.magnitude;
        *phase_sensitive = r.fidelity.phase_sensitive;
        *converged = r.converged;
        Ok(())
    })
}

/// Objective evaluations and restarts spent.
///
/// # Safety
/// `result` must be a live handle or null; outputs null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hg_synthesis_result_effort(
    result: *const HgSynthesisResult,
    out_evaluations: *mut usize,
    out_restarts_used: *mut usize,
) -> HgStatus {
    guard(|| {
        let r = &input(result, "result")?.0;
        let evaluations = out(out_evaluations, "out_evaluations")?;
        let restarts = out(out_restarts_used, "out_restarts_used")?;
        *evaluations = r.evaluations;
        *restarts = r.restarts_used;
        Ok(())
    })
}

/// Composes a result's sequence.
///
/// # Safety
/// `result` must be a live handle or null; `out_gate` null or valid for
/// writes.
#[no_mangle]
pub unsafe extern "C" fn hg_synthesis_result_compose(
    result: *const HgSynthesisResult,
    out_gate: *mut HgMatrix2,
) -> HgStatus {
    guard(|| {
        let seq: &PulseSequence = &input(result, "result")?.0.sequence;
        *out(out_gate, "out_gate")? = (&synthesis::compose(seq)).into();
        Ok(())
    })
}
