//! Cheating-proof search.
//!
//! With one proof held fixed, the verifier's acceptance probability is a
//! Hermitian quadratic form in the other. See-saw ascent alternates top
//! eigenvectors of the two forms; a brute-force baseline scans proper twin
//! pairs and basis-product pairs.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, SymmetricEigen};
#[allow(unused_imports)]
use num_traits::Float;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::csp::{check_budget, for_each_coloring, max_satisfied_fraction, Coloring, ConstraintGraph};
use crate::diagnostics::classify;
use crate::error::{Error, Result};
use crate::state::{proper_state, random_state, ProofPair, ProofState, C64};
use crate::verifier::{total_rejection, total_rejection_unchecked, uniformity_report};

/// Largest single-proof dimension `n * K` the see-saw accepts.
pub const MAX_ATTACK_DIM: usize = 512;

/// Which proof a form is quadratic in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Psi,
    Phi,
}

/// `acceptance(x, fixed) = <x|M|x>` for unit `x` on `side`.
#[derive(Debug, Clone, PartialEq)]
pub struct AcceptanceForm {
    pub matrix: DMatrix<C64>,
    pub side: Side,
}

impl AcceptanceForm {
    /// `Re <x|M|x>`.
    pub fn value(&self, x: &ProofState) -> Result<f64> {
        let dim = self.matrix.nrows();
        if x.dim() != dim {
            return Err(Error::DimensionMismatch(alloc::format!(
                "state of dimension {} against a {dim}x{dim} form",
                x.dim()
            )));
        }
        let a = x.amps();
        let mut acc = C64::new(0.0, 0.0);
        for r in 0..dim {
            let mut row = C64::new(0.0, 0.0);
            for c in 0..dim {
                row += self.matrix[(r, c)] * a[c];
            }
            acc += a[r].conj() * row;
        }
        Ok(acc.re)
    }

    /// `max |M - M^dagger|` entrywise.
    pub fn hermiticity_defect(&self) -> f64 {
        let m = &self.matrix;
        let mut worst: f64 = 0.0;
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                worst = worst.max((m[(r, c)] - m[(c, r)].conj()).norm());
            }
        }
        worst
    }

    /// Eigenvalues in solver order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        SymmetricEigen::new(self.matrix.clone()).eigenvalues.iter().copied().collect()
    }

    /// Unit eigenvector of the largest eigenvalue with that eigenvalue.
    ///
    /// Exact ties go to the solver's first vector. The phase is fixed so the
    /// largest-magnitude component (first on ties) is real and positive.
    pub fn top_eigenvector(&self) -> (f64, Vec<C64>) {
        let eig = SymmetricEigen::new(self.matrix.clone());
        let mut best = 0;
        for (idx, &lam) in eig.eigenvalues.iter().enumerate() {
            if lam > eig.eigenvalues[best] {
                best = idx;
            }
        }
        let mut v: Vec<C64> = eig.eigenvectors.column(best).iter().copied().collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let mut pivot = 0;
        for (idx, z) in v.iter().enumerate() {
            if z.norm() > v[pivot].norm() {
                pivot = idx;
            }
        }
        let phase = v[pivot].conj() / v[pivot].norm();
        for z in v.iter_mut() {
            *z = *z * phase / norm;
        }
        (eig.eigenvalues[best], v)
    }
}

/// Builds the acceptance form in the proof on `side`, the other proof being
/// `fixed`. The verifier is symmetric under swapping the proofs, so only the
/// label depends on `side`.
pub fn acceptance_form(g: &ConstraintGraph, fixed: &ProofState, side: Side) -> Result<AcceptanceForm> {
    g.ensure_valid()?;
    if fixed.n() != g.n || fixed.k() != g.k {
        return Err(Error::DimensionMismatch(alloc::format!(
            "fixed proof has (n, K) = ({}, {}) but the graph has ({}, {})",
            fixed.n(),
            fixed.k(),
            g.n,
            g.k
        )));
    }
    let (n, k) = (g.n, g.k);
    let dim = n * k;
    let (nf, kf) = (n as f64, k as f64);
    let f = fixed.amps();
    let q = fixed.basis_distribution();
    let cons = consistency_accept(g, &q);
    let keep = 1.0 - uniformity_report(fixed)?.reject;

    let matrix = DMatrix::from_fn(dim, dim, |r, c| {
        // equality: (I + |f><f|) / 2
        let mut m = f[r] * f[c].conj() * 0.5;
        // uniformity: (1 - p_fixed)(I - U), U = blockdiag(J_K)/K - J/(nK)
        let mut u = -1.0 / (nf * kf);
        if r / k == c / k {
            u += 1.0 / kf;
        }
        m -= C64::new(keep * u, 0.0);
        if r == c {
            m += C64::new(0.5 + cons[r] + keep, 0.0);
        }
        m / 3.0
    });
    Ok(AcceptanceForm { matrix, side })
}

/// Probability the consistency test accepts given this side reads `(i, j)`,
/// averaged over the fixed side's outcome distribution `q`.
fn consistency_accept(g: &ConstraintGraph, q: &[f64]) -> Vec<f64> {
    let k = g.k;
    let mut reject = vec![0.0; g.n * k];
    for i in 0..g.n {
        let qi = &q[i * k..(i + 1) * k];
        let total: f64 = qi.iter().sum();
        for j in 0..k {
            reject[i * k + j] += total - qi[j];
        }
    }
    for e in g.edges.iter().filter(|e| !e.is_self_loop()) {
        for a in 0..k {
            for b in 0..k {
                if !e.allows(a, b) {
                    reject[e.u * k + a] += q[e.v * k + b];
                    reject[e.v * k + b] += q[e.u * k + a];
                }
            }
        }
    }
    reject.into_iter().map(|r| (1.0 - r).clamp(0.0, 1.0)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttackConfig {
    pub restarts: usize,
    pub max_iters: usize,
    pub tol: f64,
    pub seed: u64,
    /// Cap on `K^n` for exhaustive work (warm start, exact eta).
    pub budget: u64,
}

impl Default for AttackConfig {
    fn default() -> Self {
        Self { restarts: 16, max_iters: 200, tol: 1e-10, seed: 0, budget: 1 << 20 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttackResult {
    pub best_pair: ProofPair,
    pub acceptance: f64,
    /// Full see-saw iterations in the best restart; candidates scanned for
    /// the brute-force baseline.
    pub iterations: usize,
    /// Acceptance after initialization and after every half-step of the best
    /// restart.
    pub trace: Vec<f64>,
    pub restart_traces: Vec<Vec<f64>>,
    /// Final pair of every restart.
    pub restart_pairs: Vec<ProofPair>,
    pub best_restart: usize,
    pub restarts_used: usize,
    pub seed: u64,
}

/// Seed of restart `index`: the first output of ChaCha8 seeded with `seed`
/// on stream `index`.
pub fn restart_seed(seed: u64, index: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng.next_u64()
}

fn acceptance_of(g: &ConstraintGraph, pair: &ProofPair) -> Result<f64> {
    Ok(total_rejection_unchecked(g, pair)?.acceptance)
}

struct RestartOutcome {
    pair: ProofPair,
    value: f64,
    iterations: usize,
    trace: Vec<f64>,
}

fn ascend(g: &ConstraintGraph, start: ProofPair, config: &AttackConfig) -> Result<RestartOutcome> {
    let (n, k) = (g.n, g.k);
    let mut pair = start;
    let mut value = acceptance_of(g, &pair)?;
    let mut trace = vec![value];
    let mut iterations = 0;
    while iterations < config.max_iters {
        let before = value;
        let (_, psi) = acceptance_form(g, &pair.phi, Side::Psi)?.top_eigenvector();
        pair.psi = ProofState::normalized(n, k, psi)?;
        trace.push(acceptance_of(g, &pair)?);
        let (_, phi) = acceptance_form(g, &pair.psi, Side::Phi)?.top_eigenvector();
        pair.phi = ProofState::normalized(n, k, phi)?;
        value = acceptance_of(g, &pair)?;
        trace.push(value);
        iterations += 1;
        if value - before < config.tol {
            break;
        }
    }
    Ok(RestartOutcome { pair, value, iterations, trace })
}

/// Alternating top-eigenvector ascent over `config.restarts` restarts.
///
/// Restart 0 starts from the brute-force baseline's best pair when `K^n`
/// fits `config.budget`; every other restart starts from the twin pair of
/// `random_state(n, K, restart_seed(seed, i))`. The best restart wins, lower
/// index on ties.
pub fn seesaw_attack(g: &ConstraintGraph, config: &AttackConfig) -> Result<AttackResult> {
    g.ensure_valid()?;
    let dim = g.n * g.k;
    if dim > MAX_ATTACK_DIM {
        return Err(Error::DimensionGuard { dim, limit: MAX_ATTACK_DIM });
    }
    if config.restarts == 0 {
        return Err(Error::InvalidArgument("at least one restart is required".into()));
    }
    let warm = if check_budget(g, config.budget).is_ok() {
        Some(classical_attack_bruteforce(g, config.budget)?.best_pair)
    } else {
        None
    };

    let mut best: Option<(usize, RestartOutcome)> = None;
    let mut traces = Vec::with_capacity(config.restarts);
    let mut finals = Vec::with_capacity(config.restarts);
    for i in 0..config.restarts {
        let start = match (&warm, i) {
            (Some(p), 0) => p.clone(),
            _ => ProofPair::twin(random_state(g.n, g.k, restart_seed(config.seed, i))),
        };
        let out = ascend(g, start, config)?;
        traces.push(out.trace.clone());
        finals.push(out.pair.clone());
        if best.as_ref().map_or(true, |(_, b)| out.value > b.value) {
            best = Some((i, out));
        }
    }
    let (best_restart, out) = best.expect("restarts > 0");
    let acceptance = total_rejection(g, &out.pair)?.acceptance;
    Ok(AttackResult {
        best_pair: out.pair,
        acceptance,
        iterations: out.iterations,
        trace: out.trace,
        restart_traces: traces,
        restart_pairs: finals,
        best_restart,
        restarts_used: config.restarts,
        seed: config.seed,
    })
}

/// Best of all proper twin pairs and all basis-product pairs. Proper pairs
/// are scanned first in lexicographic coloring order; a later candidate
/// must be strictly better to win.
pub fn classical_attack_bruteforce(g: &ConstraintGraph, budget: u64) -> Result<AttackResult> {
    g.ensure_valid()?;
    check_budget(g, budget)?;
    let (n, k) = (g.n, g.k);
    let mut best: Option<(f64, ProofPair)> = None;
    let mut scanned = 0usize;
    let mut failure = None;
    let offer = |pair: ProofPair, best: &mut Option<(f64, ProofPair)>| -> Result<()> {
        let v = acceptance_of(g, &pair)?;
        if best.as_ref().map_or(true, |(b, _)| v > *b) {
            *best = Some((v, pair));
        }
        Ok(())
    };
    for_each_coloring(n, k, |colors| {
        if failure.is_some() {
            return;
        }
        scanned += 1;
        let state = match proper_state(n, k, &Coloring::new(colors.to_vec())) {
            Ok(s) => s,
            Err(e) => {
                failure = Some(e);
                return;
            }
        };
        if let Err(e) = offer(ProofPair::twin(state), &mut best) {
            failure = Some(e);
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    for x in 0..n * k {
        let psi = ProofState::basis(n, k, x / k, x % k)?;
        for y in 0..n * k {
            let phi = ProofState::basis(n, k, y / k, y % k)?;
            scanned += 1;
            offer(ProofPair::new(psi.clone(), phi)?, &mut best)?;
        }
    }
    let (acceptance, best_pair) = best.expect("at least one coloring is enumerated");
    Ok(AttackResult {
        best_pair,
        acceptance,
        iterations: scanned,
        trace: vec![acceptance],
        restart_traces: Vec::new(),
        restart_pairs: Vec::new(),
        best_restart: 0,
        restarts_used: 0,
        seed: 0,
    })
}

/// One row of a gap sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub n: usize,
    pub best_acceptance: f64,
    /// `1 - best_acceptance`, an upper bound on the true gap.
    pub measured_gap: f64,
    /// Predicted rejection lower bound at the best pair; 0 on satisfiable
    /// instances.
    pub theoretical_bound: f64,
    /// `None` on satisfiable instances.
    pub case_id: Option<u8>,
    pub restarts: usize,
    pub seed: u64,
    pub eta: f64,
}

/// Runs the see-saw on `build(n)` for every size, rows sorted by `n`.
///
/// Every size uses `config.seed` unchanged. Exact eta comes from the
/// exhaustive solver under `config.budget`.
pub fn gap_sweep(
    build: impl Fn(usize) -> Result<ConstraintGraph>,
    sizes: &[usize],
    config: &AttackConfig,
) -> Result<Vec<SweepRow>> {
    let mut sizes = sizes.to_vec();
    sizes.sort_unstable();
    sizes.dedup();
    let mut rows = Vec::with_capacity(sizes.len());
    for n in sizes {
        let g = build(n)?;
        let eta = max_satisfied_fraction(&g, config.budget)?.eta;
        let attack = seesaw_attack(&g, config)?;
        let (theoretical_bound, case_id) = if eta > 0.0 {
            let report = classify(&g, &attack.best_pair, eta)?;
            let bound = report.predicted_bound.ok_or(Error::MissingRegularity)?;
            (bound, Some(report.case_id()))
        } else {
            (0.0, None)
        };
        rows.push(SweepRow {
            n: g.n,
            best_acceptance: attack.acceptance,
            measured_gap: 1.0 - attack.acceptance,
            theoretical_bound,
            case_id,
            restarts: attack.restarts_used,
            seed: config.seed,
            eta,
        });
    }
    Ok(rows)
}

/// Least-squares `c` in `measured_gap ~ c / n`; `None` for no rows.
pub fn fit_inverse_n(rows: &[SweepRow]) -> Option<f64> {
    if rows.is_empty() {
        return None;
    }
    let num: f64 = rows.iter().map(|r| r.measured_gap / r.n as f64).sum();
    let den: f64 = rows.iter().map(|r| 1.0 / (r.n as f64 * r.n as f64)).sum();
    Some(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csp::Edge;
    use crate::reductions::{kcoloring_to_constraint_graph, random_constraint_graph, Family, SimpleGraph};

    fn triangle(k: usize) -> ConstraintGraph {
        kcoloring_to_constraint_graph(&SimpleGraph::triangle(), k).unwrap()
    }

    fn quick(seed: u64) -> AttackConfig {
        AttackConfig { restarts: 4, max_iters: 100, seed, ..AttackConfig::default() }
    }

    #[test]
    fn form_matches_verifier() {
        let mut worst: f64 = 0.0;
        for t in 0..500u64 {
            let n = 2 + (t % 6) as usize;
            let k = 1 + (t % 3) as usize;
            let g = random_constraint_graph(n, k, 0.5, 0.6, t).unwrap();
            let x = random_state(n, k, 3 * t);
            let fixed = random_state(n, k, 3 * t + 1);
            let side = if t % 2 == 0 { Side::Psi } else { Side::Phi };
            let form = acceptance_form(&g, &fixed, side).unwrap();
            let pair = match side {
                Side::Psi => ProofPair::new(x.clone(), fixed).unwrap(),
                Side::Phi => ProofPair::new(fixed, x.clone()).unwrap(),
            };
            let expected = total_rejection(&g, &pair).unwrap().acceptance;
            worst = worst.max((form.value(&x).unwrap() - expected).abs());
        }
        assert!(worst < 1e-9, "max delta {worst}");
    }

    #[test]
    fn form_is_hermitian_with_probability_spectrum() {
        for t in 0..20u64 {
            let g = random_constraint_graph(4, 3, 0.7, 0.5, t).unwrap();
            let form = acceptance_form(&g, &random_state(4, 3, t), Side::Psi).unwrap();
            assert!(form.hermiticity_defect() < 1e-12);
            for lam in form.eigenvalues() {
                assert!((-1e-9..=1.0 + 1e-9).contains(&lam), "eigenvalue {lam}");
            }
        }
    }

    #[test]
    fn honest_state_on_trivial_tables_is_accepted() {
        let edges = vec![Edge::from_fn(0, 1, 2, |_, _| true), Edge::from_fn(1, 2, 2, |_, _| true)];
        let g = ConstraintGraph::new(3, 2, None, edges).unwrap();
        let s = proper_state(3, 2, &Coloring::new(vec![1, 0, 1])).unwrap();
        let form = acceptance_form(&g, &s, Side::Psi).unwrap();
        assert!((form.value(&s).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn top_eigenvector_attains_top_eigenvalue() {
        let g = triangle(2);
        let form = acceptance_form(&g, &random_state(3, 2, 5), Side::Phi).unwrap();
        let (lam, v) = form.top_eigenvector();
        let s = ProofState::new(3, 2, v).unwrap();
        assert!((form.value(&s).unwrap() - lam).abs() < 1e-12);
        let max = form.eigenvalues().into_iter().fold(f64::MIN, f64::max);
        assert_eq!(lam, max);
    }

    #[test]
    fn traces_are_monotone() {
        for seed in 0..5 {
            let g = random_constraint_graph(4, 2, 0.8, 0.5, seed).unwrap();
            let r = seesaw_attack(&g, &quick(seed)).unwrap();
            assert_eq!(r.restart_traces.len(), 4);
            for tr in &r.restart_traces {
                for w in tr.windows(2) {
                    assert!(w[1] >= w[0] - 1e-12, "{} then {}", w[0], w[1]);
                }
            }
            assert_eq!(&r.trace, &r.restart_traces[r.best_restart]);
            assert_eq!(&r.best_pair, &r.restart_pairs[r.best_restart]);
        }
    }

    #[test]
    fn satisfiable_instance_reaches_one() {
        let r = seesaw_attack(&triangle(3), &quick(1)).unwrap();
        assert!(r.acceptance >= 1.0 - 1e-9);
        let c = classical_attack_bruteforce(&triangle(3), 1 << 10).unwrap();
        assert!(c.acceptance >= 1.0 - 1e-12);
    }

    #[test]
    fn triangle_two_colors() {
        let g = triangle(2);
        let c = classical_attack_bruteforce(&g, 1 << 10).unwrap();
        assert!((c.acceptance - 25.0 / 27.0).abs() < 1e-12);
        assert_eq!(c.iterations, 8 + 36);
        let s = seesaw_attack(&g, &quick(9)).unwrap();
        assert!(s.acceptance < 1.0);
        assert!(s.acceptance >= c.acceptance - 1e-9);
    }

    #[test]
    fn one_color_false_self_loop() {
        let g = ConstraintGraph::new(1, 1, None, vec![Edge::new(0, 0, vec![vec![false]])]).unwrap();
        let c = classical_attack_bruteforce(&g, 16).unwrap();
        assert!((c.acceptance - 1.0).abs() < 1e-12);
    }

    #[test]
    fn budget_guard() {
        let g = random_constraint_graph(12, 3, 0.3, 0.5, 0).unwrap();
        assert!(matches!(
            classical_attack_bruteforce(&g, 1000),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn dimension_guard() {
        let g = random_constraint_graph(257, 2, 0.0, 0.5, 0).unwrap();
        assert_eq!(
            seesaw_attack(&g, &quick(0)).map(|r| r.acceptance),
            Err(Error::DimensionGuard { dim: 514, limit: 512 })
        );
    }

    #[test]
    fn deterministic_per_seed() {
        let g = random_constraint_graph(5, 2, 0.6, 0.5, 3).unwrap();
        let cfg = AttackConfig { budget: 0, ..quick(11) };
        assert_eq!(seesaw_attack(&g, &cfg).unwrap(), seesaw_attack(&g, &cfg).unwrap());
    }

    #[test]
    fn restart_seeds_differ() {
        let seeds: Vec<u64> = (0..8).map(|i| restart_seed(42, i)).collect();
        for i in 0..8 {
            for j in 0..i {
                assert_ne!(seeds[i], seeds[j]);
            }
        }
        assert_eq!(restart_seed(42, 3), restart_seed(42, 3));
    }

    #[test]
    fn sweep_sandwich_on_cycles() {
        let fam = Family::Cycle { k: 2, degree: 3 };
        let rows = gap_sweep(|n| fam.build(n), &[7, 5], &quick(2)).unwrap();
        assert_eq!(rows.iter().map(|r| r.n).collect::<Vec<_>>(), vec![5, 7]);
        for r in &rows {
            assert!(r.case_id.is_some());
            assert!(r.theoretical_bound <= r.measured_gap + 1e-9);
            assert!((r.eta - 1.0 / (2.0 * r.n as f64)).abs() < 1e-12);
        }
        assert!(fit_inverse_n(&rows).unwrap() > 0.0);
    }

    #[test]
    fn sweep_on_satisfiable_family() {
        let fam = Family::Path { k: 2, degree: 2 };
        let rows = gap_sweep(|n| fam.build(n), &[3, 4], &quick(0)).unwrap();
        for r in rows {
            assert!(r.measured_gap <= 1e-9);
            assert_eq!(r.case_id, None);
        }
    }

    #[test]
    fn inverse_fit() {
        let row = |n: usize, gap: f64| SweepRow {
            n,
            best_acceptance: 1.0 - gap,
            measured_gap: gap,
            theoretical_bound: 0.0,
            case_id: None,
            restarts: 1,
            seed: 0,
            eta: 0.0,
        };
        let c = fit_inverse_n(&[row(2, 0.5), row(4, 0.25)]).unwrap();
        assert!((c - 1.0).abs() < 1e-12);
        assert_eq!(fit_inverse_n(&[]), None);
    }
}
