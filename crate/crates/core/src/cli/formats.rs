//! Text formats written and read by the CLI.
//!
//! * Synthesis records and machine-readable reports: one `key=value` per line.
//! * Trajectories: comma-separated with header `beta,t,branch,x,y,z`.
//! * Target matrix files: eight numbers, the real and imaginary parts of the
//!   four entries in row-major order, separated by whitespace or commas.
//!   `#` starts a comment.
//!
//! Floats are written with 17 significant digits so they parse back to the
//! same `f64`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::su2::{BlochPoint, Unitary2};
use crate::synthesis::SynthesisResult;

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormatError(pub String);

impl fmt::Display for FormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for FormatError {}

fn err<T>(msg: impl Into<String>) -> Result<T, FormatError> {
    Err(FormatError(msg.into()))
}

pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>, FormatError> {
    let mut map = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return err(format!("line {}: expected key=value", n + 1));
        };
        if map
            .insert(k.trim().to_owned(), v.trim().to_owned())
            .is_some()
        {
            return err(format!("line {}: duplicate key '{}'", n + 1, k.trim()));
        }
    }
    Ok(map)
}

fn field<T: FromStr>(map: &BTreeMap<String, String>, key: &str) -> Result<T, FormatError> {
    let Some(raw) = map.get(key) else {
        return err(format!("missing key '{key}'"));
    };
    raw.parse()
        .map_err(|_| FormatError(format!("key '{key}': cannot parse '{raw}'")))
}

/// The persisted outcome of one `synth` run.
#[derive(Clone, Debug, PartialEq)]
pub struct SynthesisRecord {
    pub target: String,
    pub length: usize,
    pub betas: Vec<f64>,
    pub infidelity_magnitude: f64,
    pub infidelity_phase_sensitive: f64,
    pub evaluations: usize,
    pub restarts_used: usize,
    pub seed: u64,
    pub converged: bool,
}

impl SynthesisRecord {
    pub fn from_result(target: impl Into<String>, seed: u64, r: &SynthesisResult) -> Self {
        Self {
            target: target.into(),
            length: r.sequence.len(),
            betas: r.sequence.betas().to_vec(),
            infidelity_magnitude: r.fidelity.infidelity(),
            infidelity_phase_sensitive: r.fidelity.phase_sensitive_infidelity(),
            evaluations: r.evaluations,
            restarts_used: r.restarts_used,
            seed,
            converged: r.converged,
        }
    }

    pub fn to_text(&self) -> String {
        let betas: Vec<String> = self.betas.iter().map(|&b| fmt_f64(b)).collect();
        format!(
            "target={}\nlength={}\nbetas={}\ninfidelity_magnitude={}\n\
             infidelity_phase_sensitive={}\nevaluations={}\nrestarts_used={}\nseed={}\nconverged={}\n",
            self.target,
            self.length,
            betas.join(";"),
            fmt_f64(self.infidelity_magnitude),
            fmt_f64(self.infidelity_phase_sensitive),
            self.evaluations,
            self.restarts_used,
            self.seed,
            self.converged,
        )
    }

    pub fn parse(text: &str) -> Result<Self, FormatError> {
        let map = parse_key_values(text)?;
        let betas_raw: String = field(&map, "betas")?;
        let betas = if betas_raw.is_empty() {
            Vec::new()
        } else {
            betas_raw
                .split(';')
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| FormatError(format!("betas: cannot parse '{s}'")))
                })
                .collect::<Result<Vec<_>, _>>()?
        };
        let rec = Self {
            target: field(&map, "target")?,
            length: field(&map, "length")?,
            betas,
            infidelity_magnitude: field(&map, "infidelity_magnitude")?,
            infidelity_phase_sensitive: field(&map, "infidelity_phase_sensitive")?,
            evaluations: field(&map, "evaluations")?,
            restarts_used: field(&map, "restarts_used")?,
            seed: field(&map, "seed")?,
            converged: field(&map, "converged")?,
        };
        if rec.betas.len() != rec.length {
            return err(format!(
                "length {} does not match {} betas",
                rec.length,
                rec.betas.len()
            ));
        }
        Ok(rec)
    }
}

/// Initial basis state of a trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Basis {
    Zero,
    One,
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Basis::Zero => "0",
            Basis::One => "1",
        })
    }
}

impl FromStr for Basis {
    type Err = FormatError;
    fn from_str(s: &str) -> Result<Self, FormatError> {
        match s {
            "0" => Ok(Basis::Zero),
            "1" => Ok(Basis::One),
            _ => err(format!("branch must be 0 or 1, got '{s}'")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrajectoryRecord {
    pub beta: f64,
    pub t: f64,
    pub branch: Basis,
    pub point: BlochPoint,
}

pub const TRAJECTORY_HEADER: &str = "beta,t,branch,x,y,z";

pub fn write_trajectory_csv(records: &[TrajectoryRecord]) -> String {
    let mut out = String::with_capacity(records.len() * 120);
    out.push_str(TRAJECTORY_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            fmt_f64(r.beta),
            fmt_f64(r.t),
            r.branch,
            fmt_f64(r.point.x),
            fmt_f64(r.point.y),
            fmt_f64(r.point.z)
        ));
    }
    out
}

pub fn parse_trajectory_csv(text: &str) -> Result<Vec<TrajectoryRecord>, FormatError> {
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some(TRAJECTORY_HEADER) {
        return err(format!("expected header '{TRAJECTORY_HEADER}'"));
    }
    lines
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(n, line)| {
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            if cols.len() != 6 {
                return err(format!("row {}: expected 6 columns", n + 1));
            }
            let num = |i: usize| {
                cols[i]
                    .parse::<f64>()
                    .map_err(|_| FormatError(format!("row {}: bad number '{}'", n + 1, cols[i])))
            };
            Ok(TrajectoryRecord {
                beta: num(0)?,
                t: num(1)?,
                branch: cols[2].parse()?,
                point: BlochPoint {
                    x: num(3)?,
                    y: num(4)?,
                    z: num(5)?,
                },
            })
        })
        .collect()
}

/// Reads a 2×2 complex matrix from the eight-number text form. Unitarity is
/// not checked here.
pub fn parse_matrix(text: &str) -> Result<Unitary2, FormatError> {
    let nums: Vec<f64> = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(|l| l.split(|c: char| c.is_whitespace() || c == ','))
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| FormatError(format!("matrix: bad number '{s}'")))
        })
        .collect::<Result<_, _>>()?;
    if nums.len() != 8 {
        return err(format!("matrix: expected 8 numbers, found {}", nums.len()));
    }
    let c = |k: usize| Complex64::new(nums[2 * k], nums[2 * k + 1]);
    Ok(Unitary2::from_entries(c(0), c(1), c(2), c(3)))
}
