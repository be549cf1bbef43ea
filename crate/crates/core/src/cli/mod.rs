//! The commands behind the `holonomic` binary.
//!
//! Each command returns a [`RunReport`]: the inputs it was given, every
//! number it computed, and a pass/fail verdict per check. The binary only
//! parses arguments, prints the report, and exits with
//! [`RunReport::exit_code`].

mod commands;
pub mod formats;

use std::fmt::Write as _;
use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub use commands::tol;
pub use commands::{
    cmd_catalog, cmd_gate, cmd_synth, cmd_trajectory, cmd_verify, parse_target, BetaSweep,
    SynthArgs, TargetSpec, TrajectoryArgs, TrajectoryMode, VerifyArgs,
};
pub use formats::fmt_f64;

/// Process exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    CheckFailed = 1,
    Usage = 2,
    Io = 3,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Validation(#[from] crate::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

impl CliError {
    pub fn exit_status(&self) -> ExitStatus {
        match self {
            CliError::Usage(_) | CliError::Validation(_) => ExitStatus::Usage,
            CliError::Io { .. } => ExitStatus::Io,
        }
    }
}

/// A named check: `value` compared against `threshold`.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub relation: Relation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    AtMost,
    AtLeast,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold,
            relation: Relation::AtMost,
        }
    }

    pub fn at_least(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold,
            relation: Relation::AtLeast,
        }
    }

    /// NaN never passes.
    pub fn passed(&self) -> bool {
        match self.relation {
            Relation::AtMost => self.value <= self.threshold,
            Relation::AtLeast => self.value >= self.threshold,
        }
    }

    fn relation_str(&self) -> &'static str {
        match self.relation {
            Relation::AtMost => "<=",
            Relation::AtLeast => ">=",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunReport {
    pub command: String,
    pub params: Vec<(String, String)>,
    pub values: Vec<(String, String)>,
    pub checks: Vec<Check>,
    /// Free-form lines shown in human-readable output only.
    pub notes: Vec<String>,
    pub wall_time_s: f64,
}

impl RunReport {
    pub fn new(command: impl Into<String>) -> Self {
        Self {
            command: command.into(),
            ..Default::default()
        }
    }

    pub fn param(&mut self, key: impl Into<String>, value: impl ToString) {
        self.params.push((key.into(), value.to_string()));
    }

    pub fn value(&mut self, key: impl Into<String>, value: f64) {
        self.values.push((key.into(), fmt_f64(value)));
    }

    pub fn text(&mut self, key: impl Into<String>, value: impl ToString) {
        self.values.push((key.into(), value.to_string()));
    }

    pub fn check(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn exit_code(&self) -> ExitStatus {
        if self.all_passed() {
            ExitStatus::Success
        } else {
            ExitStatus::CheckFailed
        }
    }

    /// Flat `key=value` lines; numbers carry 17 significant digits.
    pub fn render_machine(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "command={}", self.command);
        for (k, v) in &self.params {
            let _ = writeln!(out, "param.{k}={v}");
        }
        for (k, v) in &self.values {
            let _ = writeln!(out, "value.{k}={v}");
        }
        for c in &self.checks {
            let _ = writeln!(out, "check.{}.value={}", c.name, fmt_f64(c.value));
            let _ = writeln!(out, "check.{}.threshold={}", c.name, fmt_f64(c.threshold));
            let _ = writeln!(out, "check.{}.relation={}", c.name, c.relation_str());
            let _ = writeln!(out, "check.{}.passed={}", c.name, c.passed());
        }
        let _ = writeln!(out, "all_passed={}", self.all_passed());
        let _ = writeln!(out, "wall_time_s={}", fmt_f64(self.wall_time_s));
        out
    }

    pub fn render_human(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "== {} ==", self.command);
        for (k, v) in &self.params {
            let _ = writeln!(out, "  {k:<28} {v}");
        }
        if !self.notes.is_empty() {
            let _ = writeln!(out);
            for n in &self.notes {
                let _ = writeln!(out, "{n}");
            }
        }
        if !self.values.is_empty() {
            let _ = writeln!(out);
            for (k, v) in &self.values {
                let _ = writeln!(out, "  {k:<28} {v}");
            }
        }
        if !self.checks.is_empty() {
            let _ = writeln!(out);
            for c in &self.checks {
                let verdict = if c.passed() { "PASS" } else { "FAIL" };
                let _ = match c.relation {
                    Relation::AtMost => writeln!(
                        out,
                        "  [{verdict}] {:<36} {:>14.4e} <= {:.1e}",
                        c.name, c.value, c.threshold
                    ),
                    Relation::AtLeast => writeln!(
                        out,
                        "  [{verdict}] {:<36} {:>14.11} >= {:.11}",
                        c.name, c.value, c.threshold
                    ),
                };
            }
        }
        let _ = writeln!(
            out,
            "\n{} ({:.3} s)",
            if self.all_passed() {
                "all checks passed"
            } else {
                "SOME CHECKS FAILED"
            },
            self.wall_time_s
        );
        out
    }
}
