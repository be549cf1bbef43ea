//! Nonadiabatic holonomic one-qubit gates built from a Lewis-Riesenfeld
//! dynamical invariant.
//!
//! * [`su2`]: 2×2 complex algebra, SU(2) exponentials, fidelity, Bloch vectors.
//! * [`model`]: the rotating-field drive, its invariant, and the gate family `U_β`.
//! * [`evolution`]: brute-force propagation and numerical checks of the closed forms.
//! * [`synthesis`]: composing `U_β` pulses and searching for sequences that hit a target.
//! * [`cli`]: the commands behind the `holonomic` binary, and its file formats.

pub mod cli;
pub mod error;
pub mod evolution;
pub mod model;
pub mod nelder_mead;
pub mod su2;
pub mod synthesis;

pub use error::{Error, Result};
pub use evolution::{full_report, propagate, spectral_propagator, EvolutionReport};
pub use model::{analytic_gate, params_from_beta, DriveParams, HolonomicGate};
pub use su2::{bloch_of, fidelity, su2_exp, BlochPoint, FidelityReport, Ket, Unitary2};
pub use synthesis::{
    compose, synthesize, PulseSequence, SynthesisConfig, SynthesisResult, TargetGate,
};
