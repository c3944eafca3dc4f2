//! Soundness case analysis for a cheating proof pair.
//!
//! Vertices are sorted into the sets
//!
//! * `A  = { i : |alpha_i|^2  < 1/(50 K^3 n) }` (light in psi),
//! * `A' = { i : |alpha'_i|^2 < 1/(100 K^3 n) }` (light in phi),
//! * `B  = { i : |beta_i|^2   < 1/(12 K) }` with `beta_i = sum_j beta_{i,j}`,
//! * `C  = { i in !A & !A' : argmax_j |beta_{i,j}| != argmax_j |beta'_{i,j}| }`,
//! * `C' = (!A & !A') \ C`,
//!
//! and the pair is assigned to one of six cases, each carrying an explicit
//! lower bound on the verifier's rejection probability. Sets use strict
//! inequalities and case conditions use `>=`, so a value on a threshold
//! enters the earlier case.

use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::csp::ConstraintGraph;
use crate::error::{Error, Result};
use crate::state::{decompose, BlockDecomposition, ProofPair, C64};

/// Each case needs a vertex-weight mass of at least this much.
pub const CASE_MASS: f64 = 0.3;

/// Slack used when checking the lemmas' thresholds on floating-point rows.
pub const LEMMA_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SoundnessCase {
    /// Heavy in psi, light in phi; caught by the equality test.
    VertexWeightMismatch = 1,
    /// Many vertices carry two large colors; caught by consistency part a.
    AmbiguousColors = 2,
    /// psi's vertex weights are far from uniform; caught by the uniformity test.
    NonUniformPsi = 3,
    /// phi's vertex weights are far from uniform; caught by the equality test.
    NonUniformPhi = 4,
    /// The proofs disagree on many colors; caught by consistency part a.
    ColorDisagreement = 5,
    /// Both proofs are close to proper states; caught by consistency part b.
    NearProper = 6,
}

impl SoundnessCase {
    pub fn id(self) -> u8 {
        self as u8
    }

    pub fn from_id(id: u8) -> Option<Self> {
        use SoundnessCase::*;
        Some(match id {
            1 => VertexWeightMismatch,
            2 => AmbiguousColors,
            3 => NonUniformPsi,
            4 => NonUniformPhi,
            5 => ColorDisagreement,
            6 => NearProper,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseReport {
    pub n: usize,
    pub k: usize,
    pub set_a: Vec<usize>,
    pub set_a_prime: Vec<usize>,
    pub set_b: Vec<usize>,
    pub set_c: Vec<usize>,
    pub set_c_prime: Vec<usize>,
    /// `sum_{i in A} |alpha_i|^2`.
    pub mass_a: f64,
    /// `sum |alpha_i|^2` over `!A & A'`.
    pub mass_abar_aprime: f64,
    /// ... over `!A & !A' & B`.
    pub mass_abar_aprimebar_b: f64,
    /// ... over `!A & !A' & !B`.
    pub mass_abar_aprimebar_bbar: f64,
    pub case: SoundnessCase,
    pub eta: f64,
    /// `L^2 = sum_i |alpha_i|^2 |beta_i|^2` for psi.
    pub psi_l_sq: f64,
    /// Lower bound on total rejection; `None` when the case needs a declared
    /// regularity the graph lacks.
    pub predicted_bound: Option<f64>,
    pub argmax_colors_psi: Vec<usize>,
    pub argmax_colors_phi: Vec<usize>,
}

impl CaseReport {
    pub fn case_id(&self) -> u8 {
        self.case.id()
    }
}

pub fn threshold_a(k: usize, n: usize) -> f64 {
    1.0 / (50.0 * (k as f64).powi(3) * n as f64)
}

pub fn threshold_a_prime(k: usize, n: usize) -> f64 {
    1.0 / (100.0 * (k as f64).powi(3) * n as f64)
}

pub fn threshold_b(k: usize) -> f64 {
    1.0 / (12.0 * k as f64)
}

/// Index of the largest `|row_j|^2`, smallest index on ties.
pub fn argmax_color(row: &[C64]) -> usize {
    let mut best = 0;
    for (j, b) in row.iter().enumerate().skip(1) {
        if b.norm_sqr() > row[best].norm_sqr() {
            best = j;
        }
    }
    best
}

/// Smallest `j` with `|beta_j|^2 >= 1/K`. Every normalized row has one.
pub fn lemma41_witness(beta_row: &[C64]) -> usize {
    let k = beta_row.len() as f64;
    beta_row
        .iter()
        .position(|b| b.norm_sqr() >= 1.0 / k - LEMMA_TOL)
        .unwrap_or_else(|| panic!("normalized row without a 1/K witness: {beta_row:?}"))
}

/// When `|sum_j beta_j|^2 < 1/(12K)`, the two smallest indices with
/// `|beta_j|^2 >= 1/K^4`; `None` when the premise fails.
pub fn lemma42_witnesses(beta_row: &[C64]) -> Option<(usize, usize)> {
    let k = beta_row.len();
    let sum: C64 = beta_row.iter().sum();
    if sum.norm_sqr() >= threshold_b(k) {
        return None;
    }
    let floor = 1.0 / (k as f64).powi(4) - LEMMA_TOL;
    let mut hits = beta_row
        .iter()
        .enumerate()
        .filter(|(_, b)| b.norm_sqr() >= floor)
        .map(|(j, _)| j);
    match (hits.next(), hits.next()) {
        (Some(a), Some(b)) => Some((a, b)),
        _ => panic!("row meets the small-sum premise but lacks two 1/K^4 entries: {beta_row:?}"),
    }
}

fn weight_sq(d: &BlockDecomposition, i: usize) -> f64 {
    d.alpha()[i] * d.alpha()[i]
}

/// Sorts the pair into the sets and assigns the case.
pub fn classify(g: &ConstraintGraph, pair: &ProofPair, eta: f64) -> Result<CaseReport> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::InvalidEta(eta));
    }
    g.ensure_valid()?;
    if pair.n() != g.n || pair.k() != g.k {
        return Err(Error::DimensionMismatch(format!(
            "proofs have (n, K) = ({}, {}) but the graph has ({}, {})",
            pair.n(),
            pair.k(),
            g.n,
            g.k
        )));
    }
    let (n, k) = (g.n, g.k);
    let dp = decompose(&pair.psi)?;
    let dq = decompose(&pair.phi)?;

    let in_a: Vec<bool> = (0..n).map(|i| weight_sq(&dp, i) < threshold_a(k, n)).collect();
    let in_ap: Vec<bool> = (0..n).map(|i| weight_sq(&dq, i) < threshold_a_prime(k, n)).collect();
    let in_b: Vec<bool> = dp
        .beta_row_sum()
        .iter()
        .map(|b| b.norm_sqr() < threshold_b(k))
        .collect();
    let argmax_psi: Vec<usize> = (0..n).map(|i| argmax_color(dp.beta_row(i))).collect();
    let argmax_phi: Vec<usize> = (0..n).map(|i| argmax_color(dq.beta_row(i))).collect();

    let collect = |pred: &dyn Fn(usize) -> bool| (0..n).filter(|&i| pred(i)).collect::<Vec<_>>();
    let both_heavy = |i: usize| !in_a[i] && !in_ap[i];
    let set_a = collect(&|i| in_a[i]);
    let set_a_prime = collect(&|i| in_ap[i]);
    let set_b = collect(&|i| in_b[i]);
    let set_c = collect(&|i| both_heavy(i) && argmax_psi[i] != argmax_phi[i]);
    let set_c_prime = collect(&|i| both_heavy(i) && argmax_psi[i] == argmax_phi[i]);

    let mass = |pred: &dyn Fn(usize) -> bool| {
        (0..n).filter(|&i| pred(i)).fold(0.0, |acc, i| acc + weight_sq(&dp, i))
    };
    let mass_a = mass(&|i| in_a[i]);
    let m1 = mass(&|i| !in_a[i] && in_ap[i]);
    let m2 = mass(&|i| both_heavy(i) && in_b[i]);
    let m3 = mass(&|i| both_heavy(i) && !in_b[i]);

    let heavy_floor = 1.0 - 1.0 / (50.0 * (k as f64).powi(3));
    if 1.0 - mass_a < heavy_floor.min(0.9) - 1e-12 {
        return Err(Error::Anomaly(format!(
            "mass outside A is {} (< 0.9) with |A| = {}",
            1.0 - mass_a,
            set_a.len()
        )));
    }

    let eta_n = eta * n as f64;
    let case = if m1 >= CASE_MASS {
        SoundnessCase::VertexWeightMismatch
    } else if m2 >= CASE_MASS {
        SoundnessCase::AmbiguousColors
    } else if m3 >= CASE_MASS {
        if set_a.len() as f64 >= 0.05 * eta_n {
            SoundnessCase::NonUniformPsi
        } else if set_a_prime.len() as f64 >= 0.15 * eta_n {
            SoundnessCase::NonUniformPhi
        } else if set_c.len() as f64 >= 0.01 * eta_n {
            SoundnessCase::ColorDisagreement
        } else {
            SoundnessCase::NearProper
        }
    } else {
        return Err(Error::Anomaly(format!(
            "no vertex-weight mass reaches 0.3: masses ({m1}, {m2}, {m3}), mass in A {mass_a}"
        )));
    };

    let psi_l_sq: f64 = (0..n)
        .map(|i| weight_sq(&dp, i) * dp.beta_row_sum()[i].norm_sqr())
        .sum();
    if case == SoundnessCase::NonUniformPsi {
        let floor = 1.0 / (40.0 * k as f64);
        if psi_l_sq < floor - 1e-12 {
            return Err(Error::Anomaly(format!(
                "uniformity case with L^2 = {psi_l_sq} below 1/(40K) = {floor}"
            )));
        }
    }

    let mut report = CaseReport {
        n,
        k,
        set_a,
        set_a_prime,
        set_b,
        set_c,
        set_c_prime,
        mass_a,
        mass_abar_aprime: m1,
        mass_abar_aprimebar_b: m2,
        mass_abar_aprimebar_bbar: m3,
        case,
        eta,
        psi_l_sq,
        predicted_bound: None,
        argmax_colors_psi: argmax_psi,
        argmax_colors_phi: argmax_phi,
    };
    report.predicted_bound = match predicted_rejection_lower_bound(&report, g) {
        Ok(b) => Some(b),
        Err(Error::MissingRegularity) => None,
        Err(e) => return Err(e),
    };
    Ok(report)
}

/// Lower bound on the rejection probability of the single test that
/// handles `case`.
pub fn per_test_bound(case: SoundnessCase, k: usize, n: usize, eta: f64, d: Option<usize>) -> Result<f64> {
    let kf = k as f64;
    let nf = n as f64;
    Ok(match case {
        SoundnessCase::VertexWeightMismatch => {
            // swap test rejects with D^2/2 >= D(P,Q)^2/2
            let dpq = 0.5 * (CASE_MASS - 1.0 / (100.0 * kf.powi(3)));
            dpq * dpq / 2.0
        }
        SoundnessCase::AmbiguousColors => CASE_MASS / (100.0 * kf.powi(8) * nf),
        SoundnessCase::NonUniformPsi => {
            let p_c = CASE_MASS / (12.0 * kf * kf);
            let p_v = (eta / 200.0).powi(2);
            p_c * p_v
        }
        SoundnessCase::NonUniformPhi => {
            let dpq = 0.5 * (0.1 * eta) / (100.0 * kf.powi(3));
            dpq * dpq / 2.0
        }
        SoundnessCase::ColorDisagreement => 0.01 * eta / (5000.0 * kf.powi(8) * nf),
        SoundnessCase::NearProper => {
            let d = d.ok_or(Error::MissingRegularity)? as f64;
            0.08 * eta * d / (5000.0 * kf.powi(8) * nf)
        }
    })
}

/// Lower bound on the verifier's total rejection: the handling test's bound
/// times the 1/3 chance of running it.
pub fn predicted_rejection_lower_bound(report: &CaseReport, g: &ConstraintGraph) -> Result<f64> {
    if report.n != g.n || report.k != g.k {
        return Err(Error::DimensionMismatch("report and graph dimensions differ".into()));
    }
    Ok(per_test_bound(report.case, g.k, g.n, report.eta, g.d)? / 3.0)
}
