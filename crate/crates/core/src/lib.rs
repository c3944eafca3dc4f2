//! Exact simulator for a two-proof verifier on constraint graphs.
//!
//! The verifier receives two unentangled proofs, each a unit vector on
//! `n * K` amplitudes (vertex ⊗ color), and runs one of an equality, a
//! consistency and a uniformity test. This crate computes the rejection
//! probabilities in closed form and by explicit enumeration, searches for
//! cheating proofs, and reproduces the case analysis behind the soundness
//! bound.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod adversary;
pub mod csp;
pub mod diagnostics;
pub mod error;
pub mod oracle;
pub mod reductions;
pub mod state;
pub mod verifier;

pub use adversary::{
    acceptance_form, classical_attack_bruteforce, gap_sweep, seesaw_attack, AcceptanceForm,
    AttackConfig, AttackResult, Side, SweepRow,
};
pub use csp::{max_satisfied_fraction, Coloring, ConstraintGraph, Edge, SatStats};
pub use diagnostics::{classify, CaseReport, SoundnessCase};
pub use error::{Error, Result};
pub use oracle::rejection_by_enumeration;
pub use state::{ProofPair, ProofState, C64};
pub use verifier::{total_rejection, RejectionBreakdown};
