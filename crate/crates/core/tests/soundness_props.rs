use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twoproof_core::adversary::{seesaw_attack, AttackConfig};
use twoproof_core::csp::{max_satisfied_fraction, Coloring, ConstraintGraph, DEFAULT_BUDGET};
use twoproof_core::diagnostics::classify;
use twoproof_core::reductions::{kcoloring_to_constraint_graph, regularize, Family, SimpleGraph};
use twoproof_core::state::{proper_state, random_state, ProofPair, ProofState, C64};
use twoproof_core::verifier::total_rejection;

fn unsat_instances() -> Vec<(&'static str, ConstraintGraph)> {
    let tri = kcoloring_to_constraint_graph(&SimpleGraph::triangle(), 2).unwrap();
    let k4 = kcoloring_to_constraint_graph(&SimpleGraph::complete(4).unwrap(), 3).unwrap();
    vec![
        ("triangle K=2, d=3", regularize(&tri, 3).unwrap()),
        ("K4 K=3, d=3", regularize(&k4, 3).unwrap()),
        ("5-cycle K=2, d=3", Family::Cycle { k: 2, degree: 3 }.build(5).unwrap()),
        ("7-cycle K=2, d=3", Family::Cycle { k: 2, degree: 3 }.build(7).unwrap()),
    ]
}

/// A proper state with Gaussian noise of relative size `noise`, optionally
/// missing some vertices.
fn noisy_proper(n: usize, k: usize, rng: &mut ChaCha8Rng) -> ProofState {
    let c = Coloring::new((0..n).map(|_| rng.random_range(0..k)).collect());
    let base = proper_state(n, k, &c).unwrap();
    let noise = random_state(n, k, rng.random());
    let eps: f64 = rng.random_range(0.0..1.0);
    let drop = rng.random_range(0..=n / 2);
    let amps = base
        .amps()
        .iter()
        .zip(noise.amps())
        .enumerate()
        .map(|(x, (a, b))| if x / k < drop { *b * eps } else { a + b * eps })
        .collect::<Vec<C64>>();
    ProofState::normalized(n, k, amps).unwrap()
}

fn any_state(n: usize, k: usize, rng: &mut ChaCha8Rng) -> ProofState {
    match rng.random_range(0..3) {
        0 => random_state(n, k, rng.random()),
        1 => noisy_proper(n, k, rng),
        _ => ProofState::basis(n, k, rng.random_range(0..n), rng.random_range(0..k)).unwrap(),
    }
}

#[test]
fn rejection_dominates_case_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut seen = [0usize; 7];
    for (name, g) in unsat_instances() {
        let eta = max_satisfied_fraction(&g, DEFAULT_BUDGET).unwrap().eta;
        assert!(eta > 0.0, "{name} is satisfiable");
        for _ in 0..400 {
            let pair = ProofPair::new(any_state(g.n, g.k, &mut rng), any_state(g.n, g.k, &mut rng))
                .unwrap();
            let report = classify(&g, &pair, eta).unwrap();
            let bound = report.predicted_bound.unwrap();
            let actual = total_rejection(&g, &pair).unwrap().total_reject;
            assert!(actual >= bound - 1e-12, "{name}: case {} actual {actual} < bound {bound}", report.case_id());
            seen[report.case_id() as usize] += 1;
        }
    }
    eprintln!("case histogram {seen:?}");
    assert!(seen[1..].iter().all(|&c| c > 0));
}

#[test]
fn seesaw_optimum_respects_case_bound() {
    for (name, g) in unsat_instances() {
        let eta = max_satisfied_fraction(&g, DEFAULT_BUDGET).unwrap().eta;
        let cfg = AttackConfig { restarts: 3, max_iters: 60, seed: 5, ..AttackConfig::default() };
        let r = seesaw_attack(&g, &cfg).unwrap();
        let report = classify(&g, &r.best_pair, eta).unwrap();
        let gap = 1.0 - r.acceptance;
        assert!(r.acceptance < 1.0, "{name}");
        assert!(gap >= report.predicted_bound.unwrap() - 1e-12, "{name}");
    }
}

#[test]
fn honest_pairs_on_unsat_instances_are_near_proper() {
    for (name, g) in unsat_instances() {
        let stats = max_satisfied_fraction(&g, DEFAULT_BUDGET).unwrap();
        let pair = ProofPair::twin(proper_state(g.n, g.k, &stats.best_coloring).unwrap());
        let report = classify(&g, &pair, stats.eta).unwrap();
        assert_eq!(report.case_id(), 6, "{name}");
        let actual = total_rejection(&g, &pair).unwrap().total_reject;
        assert!(actual >= report.predicted_bound.unwrap(), "{name}");
    }
}
