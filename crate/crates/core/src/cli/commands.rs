use std::f64::consts::{FRAC_PI_2, PI};
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use crate::error::Error;
use crate::evolution::{self, phase_set_distance, DEFAULT_STEPS};
use crate::model::{self, analytic_gate, params_from_beta, DriveParams, HolonomicGate};
use crate::su2::{bloch_of, Ket, Unitary2};
use crate::synthesis::{self, NamedGate, SynthesisConfig, TargetGate};

use super::formats::{
    parse_matrix, write_trajectory_csv, Basis, SynthesisRecord, TrajectoryRecord,
};
use super::{Check, CliError, RunReport};

/// Thresholds shared by `verify` and the acceptance suite.
pub mod tol {
    pub const UNITARITY: f64 = 1e-12;
    pub const PROPAGATOR_UNITARITY: f64 = 1e-8;
    pub const HOLONOMY_RESIDUAL: f64 = 1e-12;
    pub const INTEGRAND: f64 = 1e-12;
    pub const GAMMA_DYNAMICAL: f64 = 1e-8;
    pub const TRANSITIONLESS: f64 = 1e-7;
    pub const PHASE: f64 = 1e-6;
    pub const PROPAGATOR: f64 = 1e-6;
    pub const INVARIANT_RESIDUAL: f64 = 1e-8;
    pub const INVARIANT_H: f64 = 1e-5;
    pub const SPHERE: f64 = 1e-10;
    pub const SYNTHESIS: f64 = 1e-9;
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn push_matrix(report: &mut RunReport, prefix: &str, u: &Unitary2) {
    let m = u.entries();
    for (r, row) in m.iter().enumerate() {
        for (c, z) in row.iter().enumerate() {
            report.value(format!("{prefix}{r}{c}.re"), z.re);
            report.value(format!("{prefix}{r}{c}.im"), z.im);
        }
    }
}

/// Prints `U_β`, its drive, and its phases.
pub fn cmd_gate(beta: f64) -> Result<RunReport, CliError> {
    let start = Instant::now();
    let gate = HolonomicGate::unit(beta)?;
    let p = params_from_beta(&gate);
    let u = analytic_gate(&gate);
    let period = p.period();
    let (alpha_plus, alpha_minus) = model::lr_phase(&p, period);
    let (aa_plus, aa_minus) = evolution::aa_eigenphases(&p, &u);

    let mut r = RunReport::new("gate");
    r.param("beta", beta);
    r.param("omega_drive", 1.0);
    r.notes.push(format!("U_beta(T) =\n{u}"));
    push_matrix(&mut r, "u", &u);
    r.value("omega_rabi", p.omega_rabi());
    r.value("detuning", p.detuning());
    r.value("lambda", p.lambda());
    r.value("period", period);
    r.value("alpha_plus", alpha_plus);
    r.value("alpha_minus", alpha_minus);
    r.value("aa_eigenphase_plus", aa_plus);
    r.value("aa_eigenphase_minus", aa_minus);
    r.check(Check::at_most(
        "unitarity_defect",
        u.unitarity_defect(),
        tol::UNITARITY,
    ));
    r.check(Check::at_most(
        "holonomy_residual",
        model::holonomy_residual(&p).abs(),
        tol::HOLONOMY_RESIDUAL,
    ));
    r.check(Check::at_most(
        "aa_vs_lr_phase",
        phase_set_distance((aa_plus, aa_minus), (alpha_plus, alpha_minus)),
        tol::PHASE,
    ));
    r.wall_time_s = start.elapsed().as_secs_f64();
    Ok(r)
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyArgs {
    pub beta: Option<f64>,
    /// Overrides the drive directly (ω = 1); both must be given together.
    pub rabi: Option<f64>,
    pub detuning: Option<f64>,
    pub steps: usize,
}

impl Default for VerifyArgs {
    fn default() -> Self {
        Self {
            beta: None,
            rabi: None,
            detuning: None,
            steps: DEFAULT_STEPS,
        }
    }
}

/// Propagates one period and checks every closed-form claim against it.
pub fn cmd_verify(args: &VerifyArgs) -> Result<RunReport, CliError> {
    let start = Instant::now();
    let mut r = RunReport::new("verify");
    let (params, gate) = match (args.beta, args.rabi, args.detuning) {
        (Some(b), None, None) => {
            let g = HolonomicGate::unit(b)?;
            r.param("beta", b);
            (params_from_beta(&g), Some(g))
        }
        (None, Some(o), Some(d)) => {
            r.param("omega_rabi", o);
            r.param("detuning", d);
            (DriveParams::new(o, d, 1.0)?, None)
        }
        _ => {
            return Err(CliError::Usage(
                "verify needs either --beta or both --rabi and --detuning".into(),
            ))
        }
    };
    r.param("omega_drive", 1.0);
    r.param("steps", args.steps);

    let report = match evolution::full_report(&params, args.steps) {
        Ok(rep) => rep,
        Err(Error::Inconsistent(msg)) => {
            r.notes.push(msg);
            r.check(Check::at_most(
                "propagator_unitarity",
                f64::INFINITY,
                tol::PROPAGATOR_UNITARITY,
            ));
            r.wall_time_s = start.elapsed().as_secs_f64();
            return Ok(r);
        }
        Err(e) => return Err(e.into()),
    };
    let period = params.period();
    let spectral = evolution::spectral_propagator(&params, args.steps)?;
    let doubled = evolution::propagate(&params, period, 2 * args.steps)?;
    // Richardson estimate for a second-order method: err(N) ≈ 4/3 ‖U_N − U_2N‖.
    let error_estimate = report.propagator.max_abs_diff(&doubled) * 4.0 / 3.0;
    let invariant_residual = (0..16)
        .map(|k| evolution::invariant_residual(&params, period * k as f64 / 16.0, tol::INVARIANT_H))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let alpha_err = (report.alpha_numeric.0 - report.alpha_closed_form.0)
        .abs()
        .max((report.alpha_numeric.1 - report.alpha_closed_form.1).abs());

    push_matrix(&mut r, "u", &report.propagator);
    r.value("lambda", params.lambda());
    r.value("holonomy_residual", model::holonomy_residual(&params));
    r.value("alpha_numeric_plus", report.alpha_numeric.0);
    r.value("alpha_numeric_minus", report.alpha_numeric.1);
    r.value("alpha_closed_form_plus", report.alpha_closed_form.0);
    r.value("alpha_closed_form_minus", report.alpha_closed_form.1);
    r.value("gamma_geometric_plus", report.gamma_geometric.0);
    r.value("gamma_geometric_minus", report.gamma_geometric.1);
    r.value("gamma_dynamical_plus", report.gamma_dynamical.0);
    r.value("gamma_dynamical_minus", report.gamma_dynamical.1);
    r.value("aa_eigenphase_plus", report.aa_eigenphases.0);
    r.value("aa_eigenphase_minus", report.aa_eigenphases.1);

    r.check(Check::at_most(
        "propagator_unitarity",
        report.unitarity_defect,
        tol::PROPAGATOR_UNITARITY,
    ));
    r.check(Check::at_most(
        "propagator_error_estimate",
        error_estimate,
        tol::PROPAGATOR,
    ));
    if let Some(g) = gate {
        r.check(Check::at_most(
            "propagator_vs_analytic",
            report.propagator.max_abs_diff(&analytic_gate(&g)),
            tol::PROPAGATOR,
        ));
    }
    r.check(Check::at_most(
        "max_dynamical_integrand",
        report.max_integrand,
        tol::INTEGRAND,
    ));
    r.check(Check::at_most(
        "gamma_dynamical",
        report
            .gamma_dynamical
            .0
            .abs()
            .max(report.gamma_dynamical.1.abs()),
        tol::GAMMA_DYNAMICAL,
    ));
    r.check(Check::at_most(
        "transitionless_defect",
        report.transitionless_defect,
        tol::TRANSITIONLESS,
    ));
    r.check(Check::at_most(
        "alpha_numeric_vs_closed_form",
        alpha_err,
        tol::PHASE,
    ));
    r.check(Check::at_most(
        "aa_eigenphases_vs_alpha",
        phase_set_distance(report.aa_eigenphases, report.alpha_closed_form),
        tol::PHASE,
    ));
    r.check(Check::at_most(
        "spectral_vs_propagated",
        spectral.max_abs_diff(&report.propagator),
        tol::PROPAGATOR,
    ));
    r.check(Check::at_most(
        "invariant_residual",
        invariant_residual,
        tol::INVARIANT_RESIDUAL,
    ));
    r.wall_time_s = start.elapsed().as_secs_f64();
    Ok(r)
}

/// A synthesis target given on the command line.
#[derive(Clone, Debug, PartialEq)]
pub enum TargetSpec {
    Named(NamedGate),
    File(PathBuf),
}

/// A gate name if it is one, otherwise a path to a matrix file.
pub fn parse_target(s: &str) -> TargetSpec {
    s.parse::<NamedGate>()
        .map_or_else(|_| TargetSpec::File(PathBuf::from(s)), TargetSpec::Named)
}

fn load_target(spec: &TargetSpec) -> Result<(TargetGate, String), CliError> {
    match spec {
        TargetSpec::Named(g) => Ok((TargetGate::named(*g), g.to_string())),
        TargetSpec::File(path) => {
            let text = fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            let m = parse_matrix(&text)
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            let target = TargetGate::custom(m).map_err(|e| {
                CliError::Usage(format!("{}: target rejected: {e}", path.display()))
            })?;
            Ok((target, path.display().to_string()))
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SynthArgs {
    pub target: TargetSpec,
    pub length: usize,
    pub restarts: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

pub fn cmd_synth(args: &SynthArgs) -> Result<RunReport, CliError> {
    let start = Instant::now();
    let (target, label) = load_target(&args.target)?;
    let cfg = SynthesisConfig {
        restarts: args.restarts,
        tolerance: tol::SYNTHESIS,
        ..Default::default()
    };
    let result = synthesis::synthesize(&target, args.length, &cfg, args.seed)?;
    let record = SynthesisRecord::from_result(label.clone(), args.seed, &result);

    let mut r = RunReport::new("synth");
    r.param("target", &label);
    r.param("length", args.length);
    r.param("restarts", args.restarts);
    r.param("seed", args.seed);
    let betas: Vec<String> = result
        .sequence
        .betas()
        .iter()
        .map(|b| format!("{b:.6}"))
        .collect();
    r.notes.push(format!(
        "sequence (first acting first): {{{}}}",
        betas.join(", ")
    ));
    r.notes
        .push(format!("fidelity: {:.11}", result.fidelity.magnitude));
    r.text(
        "betas",
        record
            .betas
            .iter()
            .map(|&b| super::fmt_f64(b))
            .collect::<Vec<_>>()
            .join(";"),
    );
    r.value("fidelity_magnitude", result.fidelity.magnitude);
    r.value("fidelity_phase_sensitive", result.fidelity.phase_sensitive);
    r.value("infidelity_magnitude", record.infidelity_magnitude);
    r.value(
        "infidelity_phase_sensitive",
        record.infidelity_phase_sensitive,
    );
    r.text("evaluations", result.evaluations);
    r.text("restarts_used", result.restarts_used);
    r.text("converged", result.converged);
    r.check(Check::at_most(
        "infidelity",
        result.infidelity,
        tol::SYNTHESIS,
    ));
    if let Some(path) = &args.out {
        write_file(path, &record.to_text())?;
        r.param("out", path.display());
    }
    r.wall_time_s = start.elapsed().as_secs_f64();
    Ok(r)
}

/// Recomposes and refines the four built-in sequences.
pub fn cmd_catalog() -> Result<RunReport, CliError> {
    let start = Instant::now();
    let mut r = RunReport::new("catalog");
    r.notes.push(format!(
        "{:<9} {:>3}  {:>13}  {:>13}  {:>13}  {:>14}",
        "gate", "N", "claimed", "computed", "refined", "phase-sens."
    ));
    let mut magnitude_ok = true;
    let mut phase_ok = true;
    for check in synthesis::check_catalog() {
        let name = check.entry.target.label();
        let key = name.to_ascii_lowercase();
        r.notes.push(format!(
            "{:<9} {:>3}  {:>13.11}  {:>13.11}  {:>13.11}  {:>+14.11}",
            name,
            check.entry.sequence.len(),
            check.entry.claimed_fidelity,
            check.computed.magnitude,
            check.refined_fidelity(),
            check.computed.phase_sensitive,
        ));
        r.value(format!("{key}.claimed"), check.entry.claimed_fidelity);
        r.value(
            format!("{key}.computed_magnitude"),
            check.computed.magnitude,
        );
        r.value(
            format!("{key}.computed_phase_sensitive"),
            check.computed.phase_sensitive,
        );
        r.value(format!("{key}.refined_magnitude"), check.refined_fidelity());
        r.value(
            format!("{key}.refined_phase_sensitive"),
            check.refined_phase_sensitive,
        );
        magnitude_ok &= check.computed.magnitude >= 1.0 - synthesis::CATALOG_ROUNDING_TOL;
        phase_ok &= check.computed.phase_sensitive >= 1.0 - synthesis::CATALOG_ROUNDING_TOL;
        r.check(Check::at_least(
            format!("{key}.reproduced"),
            check.computed.magnitude,
            1.0 - synthesis::CATALOG_ROUNDING_TOL,
        ));
        r.check(Check::at_least(
            format!("{key}.refined"),
            check.refined_fidelity(),
            check.entry.claimed_fidelity - synthesis::CATALOG_REFINE_TOL,
        ));
    }
    r.text("magnitude_convention_reproduces", magnitude_ok);
    r.text("phase_sensitive_convention_reproduces", phase_ok);
    r.wall_time_s = start.elapsed().as_secs_f64();
    Ok(r)
}

/// β values for `trajectory`: a comma list (`0,0.5,pi/2`) or an inclusive
/// sweep `start:stop:count`.
#[derive(Clone, Debug, PartialEq)]
pub struct BetaSweep(pub Vec<f64>);

fn parse_angle(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let bad = || format!("cannot parse angle '{s}'");
    if let Some(rest) = s.strip_prefix("pi") {
        if rest.is_empty() {
            return Ok(PI);
        }
        let d: f64 = rest
            .strip_prefix('/')
            .ok_or_else(bad)?
            .parse()
            .map_err(|_| bad())?;
        return Ok(PI / d);
    }
    s.parse().map_err(|_| bad())
}

impl FromStr for BetaSweep {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            [a, b, n] => {
                let (a, b) = (parse_angle(a)?, parse_angle(b)?);
                let n: usize = n.trim().parse().map_err(|_| format!("bad count '{n}'"))?;
                match n {
                    0 => Err("sweep count must be >= 1".into()),
                    1 => Ok(BetaSweep(vec![a])),
                    _ => Ok(BetaSweep(
                        (0..n)
                            .map(|k| {
                                if k == n - 1 {
                                    b
                                } else {
                                    a + (b - a) * k as f64 / (n - 1) as f64
                                }
                            })
                            .collect(),
                    )),
                }
            }
            [list] => list
                .split(',')
                .map(parse_angle)
                .collect::<Result<_, _>>()
                .map(BetaSweep),
            _ => Err(format!("cannot parse beta sweep '{s}'")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum TrajectoryMode {
    /// Bloch vectors along `t ∈ [0, T]` for each β.
    #[default]
    Time,
    /// `U_β|0⟩`, `U_β|1⟩` at `t = T` across the β sweep.
    Endpoint,
}

impl FromStr for TrajectoryMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "time" => Ok(TrajectoryMode::Time),
            "endpoint" => Ok(TrajectoryMode::Endpoint),
            _ => Err(format!("mode must be 'time' or 'endpoint', got '{s}'")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryArgs {
    pub betas: BetaSweep,
    pub samples: usize,
    pub mode: TrajectoryMode,
    pub steps: usize,
    pub out: Option<PathBuf>,
}

fn bloch_pair(beta: f64, t: f64, u: &Unitary2) -> Result<[TrajectoryRecord; 2], CliError> {
    let rec = |branch, state: Ket| -> Result<TrajectoryRecord, CliError> {
        Ok(TrajectoryRecord {
            beta,
            t,
            branch,
            point: bloch_of(&u.apply(&state))?,
        })
    };
    Ok([
        rec(Basis::Zero, Ket::zero_state())?,
        rec(Basis::One, Ket::one_state())?,
    ])
}

/// Bloch-sphere data for `U_β|0⟩` and `U_β|1⟩`. Returns the report and the
/// CSV text, which is also written to `args.out` when given.
pub fn cmd_trajectory(args: &TrajectoryArgs) -> Result<(RunReport, String), CliError> {
    let start = Instant::now();
    if args.samples < 2 {
        return Err(crate::error::out_of_range("samples", args.samples as f64, ">= 2").into());
    }
    if args.betas.0.is_empty() {
        return Err(CliError::Usage("no beta values given".into()));
    }
    let mut records = Vec::new();
    for &beta in &args.betas.0 {
        let gate = HolonomicGate::unit(beta)?;
        match args.mode {
            TrajectoryMode::Endpoint => {
                let p = params_from_beta(&gate);
                records.extend(bloch_pair(beta, p.period(), &analytic_gate(&gate))?);
            }
            TrajectoryMode::Time => {
                let p = params_from_beta(&gate);
                for (t, u) in
                    evolution::propagate_samples(&p, p.period(), args.steps, args.samples)?
                {
                    records.extend(bloch_pair(beta, t, &u)?);
                }
            }
        }
    }

    let sphere_defect = records
        .iter()
        .map(|rec| (rec.point.norm() - 1.0).abs())
        .fold(0.0, f64::max);
    let mut r = RunReport::new("trajectory");
    r.param(
        "betas",
        args.betas
            .0
            .iter()
            .map(|b| b.to_string())
            .collect::<Vec<_>>()
            .join(","),
    );
    r.param("samples", args.samples);
    r.param("mode", format!("{:?}", args.mode).to_ascii_lowercase());
    r.param("steps", args.steps);
    r.text("records", records.len());
    r.check(Check::at_most("sphere_defect", sphere_defect, tol::SPHERE));

    // U_0 = −I and U_{π/2} = I leave both poles in place.
    let trivial: Vec<f64> = args
        .betas
        .0
        .iter()
        .copied()
        .filter(|&b| b == 0.0 || b == FRAC_PI_2)
        .collect();
    if !trivial.is_empty() {
        let pole_defect = records
            .iter()
            .filter(|rec| trivial.contains(&rec.beta))
            .filter(|rec| {
                args.mode == TrajectoryMode::Endpoint || rec.t == records_period(rec.beta)
            })
            .map(|rec| {
                let z = match rec.branch {
                    Basis::Zero => 1.0,
                    Basis::One => -1.0,
                };
                rec.point
                    .x
                    .abs()
                    .max(rec.point.y.abs())
                    .max((rec.point.z - z).abs())
            })
            .fold(0.0, f64::max);
        r.check(Check::at_most(
            "trivial_gates_fix_poles",
            pole_defect,
            tol::SPHERE,
        ));
    }

    let csv = write_trajectory_csv(&records);
    if let Some(path) = &args.out {
        write_file(path, &csv)?;
        r.param("out", path.display());
    }
    r.wall_time_s = start.elapsed().as_secs_f64();
    Ok((r, csv))
}

fn records_period(beta: f64) -> f64 {
    HolonomicGate::unit(beta)
        .map(|g| params_from_beta(&g).period())
        .unwrap_or(f64::NAN)
}
