//! Enumeration oracle for the verifier.
//!
//! Everything here is computed the long way, on explicit state vectors and
//! outcome lists, without the closed forms in [`crate::verifier`]. The two
//! must agree to within round-off.

use alloc::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
#[allow(unused_imports)]
use num_traits::Float;

use crate::csp::{ConstraintGraph, Edge};
use crate::error::{Error, Result};
use crate::state::{ProofPair, ProofState, C64};
use crate::verifier::{fourier_matrix, zeros, RejectionBreakdown, L_SQ_CUTOFF};

/// Largest single-proof dimension `n * K` the oracle accepts.
pub const MAX_ORACLE_DIM: usize = 64;

/// Runs all three tests by explicit simulation.
pub fn rejection_by_enumeration(g: &ConstraintGraph, pair: &ProofPair) -> Result<RejectionBreakdown> {
    g.ensure_valid()?;
    pair.psi.check_same_dims(&pair.phi)?;
    if pair.n() != g.n || pair.k() != g.k {
        return Err(Error::DimensionMismatch("proof and graph dimensions differ".into()));
    }
    let dim = pair.psi.dim();
    if dim > MAX_ORACLE_DIM {
        return Err(Error::DimensionGuard { dim, limit: MAX_ORACLE_DIM });
    }
    let eq = swap_test_circuit(&pair.psi, &pair.phi);
    let (a, b) = consistency_by_outcomes(g, pair);
    let up = uniformity_by_measurement(&pair.psi);
    let uf = uniformity_by_measurement(&pair.phi);
    Ok(RejectionBreakdown::assemble(eq, a, b, up, uf))
}

/// Hadamard, controlled-SWAP, Hadamard on `|0> ⊗ |psi> ⊗ |phi>`; returns the
/// probability the ancilla reads 1.
fn swap_test_circuit(psi: &ProofState, phi: &ProofState) -> f64 {
    let n = psi.dim();
    let block = n * n;
    // |0>|psi>|phi>, index = ancilla * n^2 + x * n + y
    let mut state = zeros(2 * block);
    for (x, a) in psi.amps().iter().enumerate() {
        for (y, b) in phi.amps().iter().enumerate() {
            state[x * n + y] = a * b;
        }
    }
    let hadamard = fourier_matrix(2);
    let apply_ancilla = |s: &mut alloc::vec::Vec<C64>| {
        for r in 0..block {
            let (z, o) = (s[r], s[block + r]);
            s[r] = hadamard[(0, 0)] * z + hadamard[(0, 1)] * o;
            s[block + r] = hadamard[(1, 0)] * z + hadamard[(1, 1)] * o;
        }
    };
    apply_ancilla(&mut state);
    // controlled-SWAP: permute (x, y) -> (y, x) in the ancilla-1 half
    let mut swapped = state.clone();
    for x in 0..n {
        for y in 0..n {
            swapped[block + y * n + x] = state[block + x * n + y];
        }
    }
    let mut state = swapped;
    apply_ancilla(&mut state);
    state[block..].iter().map(|a| a.norm_sqr()).sum()
}

enum Verdict {
    Accept,
    RejectSameVertex,
    RejectEdge,
}

fn judge(edges: &BTreeMap<(usize, usize), &Edge>, i: usize, j: usize, ip: usize, jp: usize) -> Verdict {
    if i == ip {
        return if j == jp { Verdict::Accept } else { Verdict::RejectSameVertex };
    }
    match edges.get(&(i.min(ip), i.max(ip))) {
        Some(e) if !e.allows_at(i, j, jp) => Verdict::RejectEdge,
        _ => Verdict::Accept,
    }
}

/// Sums outcome probabilities over every joint measurement result.
fn consistency_by_outcomes(g: &ConstraintGraph, pair: &ProofPair) -> (f64, f64) {
    let edges: BTreeMap<_, _> = g.edges.iter().map(|e| ((e.u, e.v), e)).collect();
    let k = g.k;
    let (mut a, mut b) = (0.0, 0.0);
    for (x, px) in pair.psi.amps().iter().enumerate() {
        for (y, qy) in pair.phi.amps().iter().enumerate() {
            let prob = px.norm_sqr() * qy.norm_sqr();
            match judge(&edges, x / k, x % k, y / k, y % k) {
                Verdict::Accept => {}
                Verdict::RejectSameVertex => a += prob,
                Verdict::RejectEdge => b += prob,
            }
        }
    }
    (a, b)
}

/// Applies `I ⊗ F_K`, post-selects color 0, applies `F_n^†`, and returns the
/// probability of color 0 followed by a nonzero vertex outcome.
fn uniformity_by_measurement(s: &ProofState) -> f64 {
    let (n, k) = (s.n(), s.k());
    let fk = fourier_matrix(k);
    let mut conditional = DVector::<C64>::zeros(n);
    for i in 0..n {
        let block = DVector::from_column_slice(s.block(i));
        let transformed = &fk * block;
        conditional[i] = transformed[0];
    }
    let p_color0 = conditional.norm_squared();
    if p_color0 * k as f64 <= L_SQ_CUTOFF {
        return 0.0;
    }
    let x = conditional / C64::new(p_color0.sqrt(), 0.0);
    let fn_dag: DMatrix<C64> = fourier_matrix(n).adjoint();
    let y = fn_dag * x;
    let p_vertex0 = y[0].norm_sqr();
    p_color0 * (1.0 - p_vertex0).max(0.0)
}
