//! Composition of holonomic pulses into arbitrary one-qubit gates and a
//! multi-start simplex search for sequences `{β_i}` that reach a target.
//!
//! Sequences are listed in time order: `β_1` acts first, so the composed
//! gate is `U_{β_N} ··· U_{β_1}`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, FRAC_PI_8};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{out_of_range, Error, Result};
use crate::model::{analytic_gate, check_beta, HolonomicGate};
use crate::nelder_mead::{minimize, NelderMeadOptions};
use crate::su2::{fidelity, FidelityReport, Unitary2, UNITARY_TOL};

/// Restarts run together before checking whether any has converged. Fixed
/// so that results do not depend on the thread count.
const RESTART_BATCH: usize = 16;

/// Infidelity is quartic in the distance to β = π/2, so near-bound optima
/// can sit far from the bound in β while equal to it in objective.
const SNAP_WINDOW: f64 = 1e-3;

/// Coordinate sweeps over a β grid run before each simplex descent. They
/// lift the share of random starts that reach a global optimum several-fold.
const SWEEPS: usize = 3;
const SWEEP_GRID: usize = 64;

/// An ordered list of pulse parameters, first-acting first.
#[derive(Clone, Debug, PartialEq)]
pub struct PulseSequence {
    betas: Vec<f64>,
    omega_drive: f64,
}

impl PulseSequence {
    pub fn new(betas: Vec<f64>, omega_drive: f64) -> Result<Self> {
        for &b in &betas {
            check_beta(b)?;
        }
        if !(omega_drive > 0.0 && omega_drive.is_finite()) {
            return Err(out_of_range("omega_drive", omega_drive, "finite and > 0"));
        }
        Ok(Self { betas, omega_drive })
    }

    /// Sequence with ω = 1.
    pub fn unit(betas: Vec<f64>) -> Result<Self> {
        Self::new(betas, 1.0)
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    pub fn omega_drive(&self) -> f64 {
        self.omega_drive
    }

    pub fn len(&self) -> usize {
        self.betas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.betas.is_empty()
    }

    /// Total duration `N·2π/ω`.
    pub fn duration(&self) -> f64 {
        self.betas.len() as f64 * 2.0 * std::f64::consts::PI / self.omega_drive
    }

    pub fn gates(&self) -> impl Iterator<Item = HolonomicGate> + '_ {
        self.betas
            .iter()
            .map(|&b| HolonomicGate::new(b, self.omega_drive).expect("validated on construction"))
    }
}

/// `U_{β_N} ··· U_{β_1}`.
pub fn compose(seq: &PulseSequence) -> Unitary2 {
    compose_unchecked(&seq.betas)
}

/// [`compose`] on a bare slice, validating the range of each β.
pub fn compose_betas(betas: &[f64]) -> Result<Unitary2> {
    for &b in betas {
        check_beta(b)?;
    }
    Ok(compose_unchecked(betas))
}

fn compose_unchecked(betas: &[f64]) -> Unitary2 {
    betas
        .iter()
        .fold(Unitary2::identity(), |acc, &b| gate_of(b) * acc)
}

/// `‖U_{b1}U_{b2} − U_{b2}U_{b1}‖_max`.
pub fn noncommutativity_witness(b1: f64, b2: f64) -> Result<f64> {
    let u1 = analytic_gate(&HolonomicGate::unit(b1)?);
    let u2 = analytic_gate(&HolonomicGate::unit(b2)?);
    Ok(u1.commutator(&u2).max_abs())
}

/// The standard gates used as synthesis targets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NamedGate {
    Not,
    Hadamard,
    Phase,
    /// The π/8 gate.
    T,
}

impl NamedGate {
    pub const ALL: [NamedGate; 4] = [
        NamedGate::Not,
        NamedGate::Hadamard,
        NamedGate::Phase,
        NamedGate::T,
    ];

    /// The matrix including its global phase, e.g. `e^{iπ/2}σx` for NOT.
    pub fn matrix(self) -> Unitary2 {
        let c = Complex64::new;
        let zero = c(0.0, 0.0);
        match self {
            NamedGate::Not => Unitary2::from_entries(zero, c(0.0, 1.0), c(0.0, 1.0), zero),
            NamedGate::Hadamard => {
                let h = c(0.0, FRAC_1_SQRT_2);
                Unitary2::from_entries(h, h, h, -h)
            }
            NamedGate::Phase => Unitary2::from_entries(
                Complex64::from_polar(1.0, -FRAC_PI_4),
                zero,
                zero,
                Complex64::from_polar(1.0, FRAC_PI_4),
            ),
            NamedGate::T => Unitary2::from_entries(
                Complex64::from_polar(1.0, -FRAC_PI_8),
                zero,
                zero,
                Complex64::from_polar(1.0, FRAC_PI_8),
            ),
        }
    }
}

impl fmt::Display for NamedGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NamedGate::Not => "NOT",
            NamedGate::Hadamard => "Hadamard",
            NamedGate::Phase => "Phase",
            NamedGate::T => "T",
        })
    }
}

impl FromStr for NamedGate {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "not" | "x" => Ok(NamedGate::Not),
            "hadamard" | "h" => Ok(NamedGate::Hadamard),
            "phase" | "s" => Ok(NamedGate::Phase),
            "t" | "pi8" | "pi/8" => Ok(NamedGate::T),
            _ => Err(format!(
                "unknown gate name '{s}' (expected NOT, Hadamard, Phase or T)"
            )),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TargetGate {
    pub name: Option<NamedGate>,
    matrix: Unitary2,
}

impl TargetGate {
    pub fn named(gate: NamedGate) -> Self {
        Self {
            name: Some(gate),
            matrix: gate.matrix(),
        }
    }

    pub fn custom(matrix: Unitary2) -> Result<Self> {
        Ok(Self {
            name: None,
            matrix: matrix.checked_unitary()?,
        })
    }

    pub fn matrix(&self) -> &Unitary2 {
        &self.matrix
    }

    pub fn label(&self) -> String {
        self.name
            .map_or_else(|| "custom".to_owned(), |g| g.to_string())
    }
}

/// A reference sequence and the fidelity quoted for it.
#[derive(Clone, Debug, PartialEq)]
pub struct CatalogEntry {
    pub target: TargetGate,
    pub sequence: PulseSequence,
    pub claimed_fidelity: f64,
}

pub fn catalog() -> Vec<CatalogEntry> {
    let entry = |gate, betas: &[f64], claimed| CatalogEntry {
        target: TargetGate::named(gate),
        sequence: PulseSequence::unit(betas.to_vec()).expect("catalog betas are in range"),
        claimed_fidelity: claimed,
    };
    vec![
        entry(NamedGate::Not, &[0.423, 0.680, 0.236, 0.222], 0.99999999990),
        entry(
            NamedGate::Hadamard,
            &[0.331, 0.783, 0.300, 0.926, 0.174, 0.851, 0.347],
            0.99999999791,
        ),
        entry(
            NamedGate::Phase,
            &[0.827, 0.102, 0.287, 0.777],
            0.99999999993,
        ),
        entry(NamedGate::T, &[0.788, 0.514, 0.788], 0.99999999996),
    ]
}

/// Which fidelity the search maximises.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Objective {
    /// `1 − |tr(U†V)|/2`, blind to global phase.
    #[default]
    Magnitude,
    /// `1 − Re tr(U†V)/2`, pins the target's global phase.
    PhaseSensitive,
}

impl Objective {
    fn infidelity(self, f: &FidelityReport) -> f64 {
        match self {
            Objective::Magnitude => f.infidelity(),
            Objective::PhaseSensitive => f.phase_sensitive_infidelity(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SynthesisConfig {
    pub restarts: usize,
    /// Evaluation budget per restart, shared by the initial descent and the
    /// polishing passes.
    pub max_evals: usize,
    /// Simplex stopping tolerance on the objective.
    pub simplex_tol: f64,
    /// Infidelity at or below which a result counts as converged.
    pub tolerance: f64,
    pub objective: Objective,
    /// Stop launching restart batches once one restart has converged.
    pub stop_when_converged: bool,
}

impl Default for SynthesisConfig {
    fn default() -> Self {
        Self {
            restarts: 100,
            max_evals: 5000,
            simplex_tol: 1e-14,
            tolerance: 1e-9,
            objective: Objective::Magnitude,
            stop_when_converged: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SynthesisResult {
    pub sequence: PulseSequence,
    pub fidelity: FidelityReport,
    /// Value of the configured objective at `sequence`.
    pub infidelity: f64,
    pub evaluations: usize,
    pub restarts_used: usize,
    pub converged: bool,
}

/// Unconstrained simplex coordinate to β. Smooth and onto `[0, π/2]`.
fn beta_of_raw(x: f64) -> f64 {
    FRAC_PI_4 * (1.0 - x.cos())
}

fn raw_of_beta(beta: f64) -> f64 {
    (1.0 - beta / FRAC_PI_4).clamp(-1.0, 1.0).acos()
}

struct Search<'a> {
    target: &'a Unitary2,
    objective: Objective,
}

impl Search<'_> {
    fn eval(&self, betas: &[f64]) -> f64 {
        let u = compose_unchecked(betas);
        self.objective.infidelity(&fidelity(&u, self.target))
    }

    fn eval_raw(&self, x: &[f64]) -> f64 {
        let betas: Vec<f64> = x.iter().map(|&v| beta_of_raw(v)).collect();
        self.eval(&betas)
    }

    /// Descends from `x0`, then re-seeds the simplex at the incumbent with a
    /// shrinking step until the budget is spent or nothing improves.
    fn local(&self, x0: &[f64], step: f64, cfg: &SynthesisConfig) -> (Vec<f64>, f64, usize) {
        let mut evals = 0;
        let mut x: Vec<f64> = x0.iter().map(|&b| raw_of_beta(b)).collect();
        let mut f = f64::INFINITY;
        let mut step = step;
        while evals < cfg.max_evals {
            let opts = NelderMeadOptions {
                max_evals: cfg.max_evals - evals,
                f_tol: cfg.simplex_tol,
                x_tol: 1e-13,
                initial_step: step,
            };
            let m = minimize(|v| self.eval_raw(v), &x, &opts);
            evals += m.evals;
            let improved = m.f < f - cfg.simplex_tol;
            if m.f <= f {
                x = m.x;
                f = m.f;
            }
            if !improved || f <= 0.0 {
                break;
            }
            step = (step * 0.1).max(1e-7);
        }
        let mut betas: Vec<f64> = x.iter().map(|&v| beta_of_raw(v)).collect();
        let snapped = self.snap_to_bounds(&mut betas, &mut f);
        (betas, f, evals + snapped)
    }

    /// Cyclic coordinate descent where each coordinate moves to the best
    /// point of `grid` with the others held fixed. Returns evaluations used.
    fn coordinate_sweeps(&self, betas: &mut [f64], grid: &GateGrid) -> usize {
        let n = betas.len();
        let mut gates: Vec<Unitary2> = betas.iter().map(|&b| gate_of(b)).collect();
        let mut evals = 0;
        for _ in 0..SWEEPS {
            for i in 0..n {
                // U = after · U_βi · before
                let before = gates[..i]
                    .iter()
                    .fold(Unitary2::identity(), |acc, g| *g * acc);
                let after = gates[i + 1..]
                    .iter()
                    .fold(Unitary2::identity(), |acc, g| *g * acc);
                let score = |g: &Unitary2| {
                    self.objective
                        .infidelity(&fidelity(&(after * *g * before), self.target))
                };
                let mut best = (score(&gates[i]), betas[i], gates[i]);
                for &(b, g) in &grid.points {
                    let v = score(&g);
                    if v < best.0 {
                        best = (v, b, g);
                    }
                }
                evals += grid.points.len() + 1;
                betas[i] = best.1;
                gates[i] = best.2;
            }
        }
        evals
    }

    /// Moves coordinates within `SNAP_WINDOW` of a bound onto it when that
    /// does not increase the objective.
    fn snap_to_bounds(&self, betas: &mut [f64], f: &mut f64) -> usize {
        let mut evals = 0;
        for i in 0..betas.len() {
            let bound = if betas[i] < SNAP_WINDOW {
                0.0
            } else if betas[i] > FRAC_PI_2 - SNAP_WINDOW {
                FRAC_PI_2
            } else {
                continue;
            };
            if betas[i] == bound {
                continue;
            }
            let old = betas[i];
            betas[i] = bound;
            let trial = self.eval(betas);
            evals += 1;
            if trial <= *f {
                *f = trial;
            } else {
                betas[i] = old;
            }
        }
        evals
    }
}

/// `U_β` precomputed on an even grid of `[0, π/2]`.
struct GateGrid {
    points: Vec<(f64, Unitary2)>,
}

impl GateGrid {
    fn new(intervals: usize) -> Self {
        let points = (0..=intervals)
            .map(|k| {
                let b = FRAC_PI_2 * k as f64 / intervals as f64;
                (b, gate_of(b))
            })
            .collect();
        Self { points }
    }
}

fn gate_of(beta: f64) -> Unitary2 {
    analytic_gate(&HolonomicGate::unit(beta).expect("beta checked by caller"))
}

fn restart_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

fn check_target(target: &TargetGate) -> Result<()> {
    let defect = target.matrix.unitarity_defect();
    if defect <= UNITARY_TOL {
        Ok(())
    } else {
        Err(Error::NotUnitary(defect))
    }
}

fn finish(
    target: &TargetGate,
    betas: Vec<f64>,
    infidelity: f64,
    evaluations: usize,
    restarts_used: usize,
    cfg: &SynthesisConfig,
) -> SynthesisResult {
    let sequence = PulseSequence::unit(betas).expect("search output lies in [0, pi/2]");
    let fid = fidelity(&compose(&sequence), &target.matrix);
    SynthesisResult {
        sequence,
        fidelity: fid,
        infidelity,
        evaluations,
        restarts_used,
        converged: infidelity <= cfg.tolerance,
    }
}

/// Multi-start simplex search for a length-`length` sequence maximising
/// fidelity to `target`. Deterministic for a given `seed` and `cfg`.
pub fn synthesize(
    target: &TargetGate,
    length: usize,
    cfg: &SynthesisConfig,
    seed: u64,
) -> Result<SynthesisResult> {
    if length < 1 {
        return Err(out_of_range("length", length as f64, ">= 1"));
    }
    if cfg.restarts < 1 {
        return Err(out_of_range("restarts", cfg.restarts as f64, ">= 1"));
    }
    check_target(target)?;
    let search = Search {
        target: &target.matrix,
        objective: cfg.objective,
    };

    let grid = GateGrid::new(SWEEP_GRID);
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut evaluations = 0;
    let mut restarts_used = 0;
    while restarts_used < cfg.restarts {
        let batch = RESTART_BATCH.min(cfg.restarts - restarts_used);
        let results: Vec<(Vec<f64>, f64, usize)> = (restarts_used..restarts_used + batch)
            .into_par_iter()
            .map(|r| {
                let mut rng = restart_rng(seed, r);
                let mut x0: Vec<f64> = (0..length)
                    .map(|_| rng.gen_range(0.0..=FRAC_PI_2))
                    .collect();
                let swept = search.coordinate_sweeps(&mut x0, &grid);
                let (betas, f, evals) = search.local(&x0, 0.25, cfg);
                (betas, f, evals + swept)
            })
            .collect();
        restarts_used += batch;
        for (betas, f, evals) in results {
            evaluations += evals;
            // strict `<` keeps the lowest restart index on ties
            if best.as_ref().is_none_or(|(_, bf)| f < *bf) {
                best = Some((betas, f));
            }
        }
        if cfg.stop_when_converged && best.as_ref().is_some_and(|(_, f)| *f <= cfg.tolerance) {
            break;
        }
    }

    let (betas, f) = best.expect("at least one restart ran");
    Ok(finish(target, betas, f, evaluations, restarts_used, cfg))
}

/// Local search seeded at `seed_sequence`, with a small initial simplex.
pub fn refine(
    target: &TargetGate,
    seed_sequence: &PulseSequence,
    cfg: &SynthesisConfig,
) -> Result<SynthesisResult> {
    check_target(target)?;
    let search = Search {
        target: &target.matrix,
        objective: cfg.objective,
    };
    let (betas, f, evals) = search.local(seed_sequence.betas(), 1e-3, cfg);
    let start = search.eval(seed_sequence.betas());
    let (betas, f) = if start < f {
        (seed_sequence.betas().to_vec(), start)
    } else {
        (betas, f)
    };
    Ok(finish(target, betas, f, evals + 1, 1, cfg))
}

/// Tries lengths `1..=max_length` in turn and returns the first converged
/// result, or the best one found if none converged.
pub fn synthesize_shortest(
    target: &TargetGate,
    max_length: usize,
    cfg: &SynthesisConfig,
    seed: u64,
) -> Result<SynthesisResult> {
    if max_length < 1 {
        return Err(out_of_range("max_length", max_length as f64, ">= 1"));
    }
    let mut best: Option<SynthesisResult> = None;
    for length in 1..=max_length {
        let r = synthesize(target, length, cfg, seed)?;
        if r.converged {
            return Ok(r);
        }
        if best.as_ref().is_none_or(|b| r.infidelity < b.infidelity) {
            best = Some(r);
        }
    }
    Ok(best.expect("max_length >= 1"))
}

/// Outcome of recomposing and refining one catalog row.
#[derive(Clone, Debug, PartialEq)]
pub struct CatalogCheck {
    pub entry: CatalogEntry,
    pub computed: FidelityReport,
    pub refined: SynthesisResult,
    /// Phase-sensitive fidelity reached by refining under that objective.
    pub refined_phase_sensitive: f64,
}

/// Fidelity shortfall allowed for β rounded to 3 decimals.
pub const CATALOG_ROUNDING_TOL: f64 = 1e-5;

/// Slack when comparing a refined fidelity against a quoted one.
pub const CATALOG_REFINE_TOL: f64 = 1e-10;

impl CatalogCheck {
    pub fn reproduced(&self) -> bool {
        self.computed.magnitude >= 1.0 - CATALOG_ROUNDING_TOL
    }

    pub fn refined_fidelity(&self) -> f64 {
        self.refined.fidelity.magnitude
    }

    pub fn refined_matches_claim(&self) -> bool {
        self.refined.infidelity <= 1.0 - self.entry.claimed_fidelity + CATALOG_REFINE_TOL
    }

    pub fn passed(&self) -> bool {
        self.reproduced() && self.refined_matches_claim()
    }
}

pub fn check_catalog() -> Vec<CatalogCheck> {
    let magnitude = SynthesisConfig::default();
    let phase = SynthesisConfig {
        objective: Objective::PhaseSensitive,
        ..magnitude
    };
    catalog()
        .into_iter()
        .map(|entry| {
            let computed = fidelity(&compose(&entry.sequence), entry.target.matrix());
            let refined = refine(&entry.target, &entry.sequence, &magnitude)
                .expect("catalog targets are unitary");
            let refined_phase_sensitive = refine(&entry.target, &entry.sequence, &phase)
                .expect("catalog targets are unitary")
                .fidelity
                .phase_sensitive;
            CatalogCheck {
                entry,
                computed,
                refined,
                refined_phase_sensitive,
            }
        })
        .collect()
}
