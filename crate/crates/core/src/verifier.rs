//! Closed-form rejection probabilities of the three-test verifier.
//!
//! The verifier picks one of three tests uniformly at random:
//!
//! * **equality**: swap test on the two proofs, rejecting on NO;
//! * **consistency**: measure both proofs in the computational basis,
//!   getting `(i, j)` and `(i', j')`. Same vertex with different colors
//!   rejects (part a); an edge `{i, i'}` with `i != i'` whose table forbids
//!   the colors rejects (part b); a non-edge accepts;
//! * **uniformity**: on each proof, Fourier-transform the color register and
//!   measure; on outcome 0, inverse-Fourier-transform the vertex register and
//!   reject unless it reads 0. The test rejects if either proof's run rejects.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
#[allow(unused_imports)]
use num_traits::Float;

use crate::csp::ConstraintGraph;
use crate::error::{Error, Result};
use crate::state::{decompose, ProofPair, ProofState, C64};

/// Below this `L^2` the color outcome 0 is treated as impossible.
pub const L_SQ_CUTOFF: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RejectionBreakdown {
    pub eq_reject: f64,
    pub cons_reject_a: f64,
    pub cons_reject_b: f64,
    pub unif_reject_psi: f64,
    pub unif_reject_phi: f64,
    pub unif_reject: f64,
    pub total_reject: f64,
    pub acceptance: f64,
}

impl RejectionBreakdown {
    pub(crate) fn assemble(
        eq_reject: f64,
        cons_reject_a: f64,
        cons_reject_b: f64,
        unif_reject_psi: f64,
        unif_reject_phi: f64,
    ) -> Self {
        let unif_reject = combine_uniformity(unif_reject_psi, unif_reject_phi);
        let total_reject = (eq_reject + cons_reject_a + cons_reject_b + unif_reject) / 3.0;
        Self {
            eq_reject,
            cons_reject_a,
            cons_reject_b,
            unif_reject_psi,
            unif_reject_phi,
            unif_reject,
            total_reject,
            acceptance: 1.0 - total_reject,
        }
    }

    pub fn fields(&self) -> [(&'static str, f64); 8] {
        [
            ("eq_reject", self.eq_reject),
            ("cons_reject_a", self.cons_reject_a),
            ("cons_reject_b", self.cons_reject_b),
            ("unif_reject_psi", self.unif_reject_psi),
            ("unif_reject_phi", self.unif_reject_phi),
            ("unif_reject", self.unif_reject),
            ("total_reject", self.total_reject),
            ("acceptance", self.acceptance),
        ]
    }

    /// Largest absolute field-wise difference.
    pub fn max_abs_diff(&self, other: &RejectionBreakdown) -> f64 {
        self.fields()
            .iter()
            .zip(other.fields().iter())
            .map(|((_, a), (_, b))| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Uniformity sub-test quantities for a single proof.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformityReport {
    /// Probability the color register reads 0 after `F_K`.
    pub p_c: f64,
    /// Probability the vertex register reads nonzero given color 0; 0 when undefined.
    pub p_v: f64,
    /// `sum_k |alpha_k|^2 |beta_k|^2`.
    pub l_sq: f64,
    /// Vertex-register state conditioned on color 0, when `l_sq > 0`.
    pub x_state: Option<Vec<C64>>,
    /// `p_c * p_v`.
    pub reject: f64,
}

/// `F |j> = (1/sqrt dim) sum_k exp(2 pi i jk / dim) |k>`, column `j` holding `F|j>`.
pub fn fourier_matrix(dim: usize) -> DMatrix<C64> {
    let scale = 1.0 / (dim as f64).sqrt();
    DMatrix::from_fn(dim, dim, |k, j| {
        let phase = 2.0 * core::f64::consts::PI * ((j * k) % dim) as f64 / dim as f64;
        C64::from_polar(scale, phase)
    })
}

fn check_pair(g: &ConstraintGraph, pair: &ProofPair) -> Result<()> {
    pair.psi.check_same_dims(&pair.phi)?;
    if pair.n() != g.n || pair.k() != g.k {
        return Err(Error::DimensionMismatch(format!(
            "proofs have (n, K) = ({}, {}) but the graph has ({}, {})",
            pair.n(),
            pair.k(),
            g.n,
            g.k
        )));
    }
    Ok(())
}

/// Swap-test rejection `(1 - |<psi|phi>|^2) / 2`.
pub fn equality_reject_prob(pair: &ProofPair) -> Result<f64> {
    let ov = pair.psi.inner(&pair.phi)?.norm_sqr();
    Ok(((1.0 - ov) / 2.0).clamp(0.0, 0.5))
}

/// Rejection mass of consistency parts a and b.
pub fn consistency_reject_prob(g: &ConstraintGraph, pair: &ProofPair) -> Result<(f64, f64)> {
    g.ensure_valid()?;
    check_pair(g, pair)?;
    Ok(consistency_unchecked(g, pair))
}

fn consistency_unchecked(g: &ConstraintGraph, pair: &ProofPair) -> (f64, f64) {
    let k = g.k;
    let p = pair.psi.basis_distribution();
    let q = pair.phi.basis_distribution();

    // part a: same vertex, different colors
    let mut part_a = 0.0;
    for i in 0..g.n {
        let pi = &p[i * k..(i + 1) * k];
        let qi = &q[i * k..(i + 1) * k];
        let same: f64 = pi.iter().zip(qi).map(|(a, b)| a * b).sum();
        let total = pi.iter().sum::<f64>() * qi.iter().sum::<f64>();
        part_a += total - same;
    }

    // part b: each non-loop edge is hit in both orientations
    let mut part_b = 0.0;
    for e in g.edges.iter().filter(|e| !e.is_self_loop()) {
        for a in 0..k {
            for b in 0..k {
                if !e.allows(a, b) {
                    part_b += p[e.u * k + a] * q[e.v * k + b] + p[e.v * k + b] * q[e.u * k + a];
                }
            }
        }
    }
    (part_a.clamp(0.0, 1.0), part_b.clamp(0.0, 1.0))
}

/// Closed-form uniformity quantities for one proof.
pub fn uniformity_report(s: &ProofState) -> Result<UniformityReport> {
    let d = decompose(s)?;
    let (n, k) = (s.n(), s.k());
    let weighted: Vec<C64> = d
        .alpha()
        .iter()
        .zip(d.beta_row_sum())
        .map(|(&a, &b)| b * a)
        .collect();
    let l_sq: f64 = weighted.iter().map(|w| w.norm_sqr()).sum();
    let p_c = l_sq / k as f64;
    if l_sq <= L_SQ_CUTOFF {
        return Ok(UniformityReport { p_c, p_v: 0.0, l_sq, x_state: None, reject: 0.0 });
    }
    let total: C64 = weighted.iter().sum();
    let p_v = (1.0 - total.norm_sqr() / (n as f64 * l_sq)).clamp(0.0, 1.0);
    let l = l_sq.sqrt();
    let x_state = weighted.iter().map(|w| w / l).collect();
    Ok(UniformityReport { p_c, p_v, l_sq, x_state: Some(x_state), reject: p_c * p_v })
}

/// Rejects if either proof's sub-test rejects.
pub fn combine_uniformity(p_psi: f64, p_phi: f64) -> f64 {
    1.0 - (1.0 - p_psi) * (1.0 - p_phi)
}

pub fn uniformity_reject_prob(pair: &ProofPair) -> Result<f64> {
    pair.psi.check_same_dims(&pair.phi)?;
    let a = uniformity_report(&pair.psi)?.reject;
    let b = uniformity_report(&pair.phi)?.reject;
    Ok(combine_uniformity(a, b))
}

/// All test rejection probabilities and their uniform mixture.
pub fn total_rejection(g: &ConstraintGraph, pair: &ProofPair) -> Result<RejectionBreakdown> {
    g.ensure_valid()?;
    check_pair(g, pair)?;
    total_rejection_unchecked(g, pair)
}

/// [`total_rejection`] for a graph and pair already known to be valid and compatible.
pub(crate) fn total_rejection_unchecked(
    g: &ConstraintGraph,
    pair: &ProofPair,
) -> Result<RejectionBreakdown> {
    let (cons_a, cons_b) = consistency_unchecked(g, pair);
    let eq = equality_reject_prob(pair)?;
    let up = uniformity_report(&pair.psi)?.reject;
    let uf = uniformity_report(&pair.phi)?.reject;
    Ok(RejectionBreakdown::assemble(eq, cons_a, cons_b, up, uf))
}

/// Evaluates many pairs; results are in input order.
pub fn total_rejection_batch(
    g: &ConstraintGraph,
    pairs: &[ProofPair],
) -> Result<Vec<RejectionBreakdown>> {
    pairs.iter().map(|p| total_rejection(g, p)).collect()
}

pub(crate) fn zeros(len: usize) -> Vec<C64> {
    vec![C64::new(0.0, 0.0); len]
}
