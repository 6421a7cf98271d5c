//! Simulation and analysis of no-signaling boxes in the distributed random
//! access coding task.
//!
//! Alice holds `N = 2^n` random bits, Bob holds an index `b`, and Alice may send
//! a single classical bit. Pre-shared correlations are modelled as
//! no-signaling boxes ([`boxes`]). The recursive box pyramid ([`protocol`])
//! lets Bob guess `a_b`; the guessing probabilities feed the entropic
//! quantity `I = Σ_K I(a_K : β | b = K)` and its bounds ([`infotheory`]).
//! Whenever `I > 1` the correlations are stronger than any quantum ones.
//!
//! The [`quantum`] module provides the finite-dimensional counterpart: von
//! Neumann entropies, the mutual-information calculus and classical-quantum
//! states used to certify `I(ā : x, B) ≤ m`. [`montecarlo`] estimates
//! everything empirically from seeded runs, and [`verify`] bundles the
//! property sweeps used by the command line tool.

#![forbid(unsafe_code)]

pub mod boxes;
pub mod infotheory;
pub mod montecarlo;
pub mod protocol;
pub mod quantum;
pub mod seed;
pub mod verify;

mod error;

pub use boxes::{BoxInstance, Correlators};
pub use error::{Error, Result};
pub use infotheory::{GuessProfile, Provenance, SweepRecord};
pub use montecarlo::{BoxSource, EstimateReport, TrialPlan, Verdict};
pub use protocol::{DataString, ProtocolTranscript, Pyramid, TargetIndex};
pub use quantum::{DensityMatrix, PovmFamily, QuantumChannel};

/// `1/√2`, the largest isotropic correlation strength reachable with quantum
/// resources.
pub const TSIRELSON_E: f64 = std::f64::consts::FRAC_1_SQRT_2;
