use proptest::prelude::*;
use twoproof_core::csp::{Coloring, ConstraintGraph, Edge};
use twoproof_core::oracle::rejection_by_enumeration;
use twoproof_core::reductions::random_constraint_graph;
use twoproof_core::state::{proper_state, random_state, ProofPair};
use twoproof_core::verifier::total_rejection;

/// Relabels vertex `i` as `perm[i]`, transposing tables whose endpoints swap order.
fn permute_graph(g: &ConstraintGraph, perm: &[usize]) -> ConstraintGraph {
    let edges = g
        .edges
        .iter()
        .map(|e| {
            let (pu, pv) = (perm[e.u], perm[e.v]);
            if pu <= pv {
                Edge::new(pu, pv, e.allowed.clone())
            } else {
                Edge::from_fn(pv, pu, g.k, |a, b| e.allowed[b][a])
            }
        })
        .collect();
    ConstraintGraph::new(g.n, g.k, g.d, edges).unwrap()
}

fn perm_from_keys(keys: &[u64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..keys.len()).collect();
    order.sort_by_key(|&i| (keys[i], i));
    let mut perm = vec![0; keys.len()];
    for (rank, &i) in order.iter().enumerate() {
        perm[i] = rank;
    }
    perm
}

fn graph_and_pair(n: usize, k: usize, seed: u64) -> (ConstraintGraph, ProofPair) {
    let g = random_constraint_graph(n, k, 0.6, 0.5, seed).unwrap();
    let pair = ProofPair::new(random_state(n, k, seed ^ 0xa5), random_state(n, k, seed ^ 0x5a)).unwrap();
    (g, pair)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn vertex_relabeling_is_invisible(
        n in 2usize..7,
        k in 1usize..4,
        seed in any::<u64>(),
        keys in prop::collection::vec(any::<u64>(), 7),
    ) {
        let (g, pair) = graph_and_pair(n, k, seed);
        let perm = perm_from_keys(&keys[..n]);
        let gp = permute_graph(&g, &perm);
        let pp = ProofPair::new(
            pair.psi.permute_vertices(&perm).unwrap(),
            pair.phi.permute_vertices(&perm).unwrap(),
        ).unwrap();
        let a = total_rejection(&g, &pair).unwrap();
        let b = total_rejection(&gp, &pp).unwrap();
        prop_assert!(a.max_abs_diff(&b) < 1e-12, "{:?} vs {:?}", a, b);
    }

    #[test]
    fn global_phases_are_invisible(
        n in 2usize..7,
        k in 1usize..4,
        seed in any::<u64>(),
        t1 in -10.0f64..10.0,
        t2 in -10.0f64..10.0,
    ) {
        let (g, pair) = graph_and_pair(n, k, seed);
        let rotated = ProofPair::new(pair.psi.with_global_phase(t1), pair.phi.with_global_phase(t2)).unwrap();
        let a = total_rejection(&g, &pair).unwrap();
        let b = total_rejection(&g, &rotated).unwrap();
        prop_assert!(a.max_abs_diff(&b) < 1e-12);
    }

    #[test]
    fn probabilities_stay_in_range(n in 1usize..7, k in 1usize..4, seed in any::<u64>()) {
        let (g, pair) = graph_and_pair(n, k, seed);
        let r = total_rejection(&g, &pair).unwrap();
        for (name, v) in r.fields() {
            prop_assert!((0.0..=1.0).contains(&v), "{} = {}", name, v);
        }
        prop_assert!(r.eq_reject <= 0.5);
        prop_assert!(r.cons_reject_a + r.cons_reject_b <= 1.0 + 1e-12);
        prop_assert!((r.acceptance + r.total_reject - 1.0).abs() < 1e-15);
    }

    #[test]
    fn closed_form_matches_enumeration(n in 1usize..7, k in 1usize..4, seed in any::<u64>()) {
        let (g, pair) = graph_and_pair(n, k, seed);
        let a = total_rejection(&g, &pair).unwrap();
        let b = rejection_by_enumeration(&g, &pair).unwrap();
        prop_assert!(a.max_abs_diff(&b) < 1e-9);
    }

    #[test]
    fn honest_twins_reject_only_on_violated_edges(
        n in 2usize..8,
        k in 1usize..4,
        seed in any::<u64>(),
        colors in prop::collection::vec(0usize..3, 8),
    ) {
        let g = random_constraint_graph(n, k, 0.7, 0.6, seed).unwrap();
        let c = Coloring::new(colors[..n].iter().map(|&x| x % k).collect());
        let pair = ProofPair::twin(proper_state(n, k, &c).unwrap());
        // every violated non-loop edge is hit with mass 1/n^2 in each orientation
        let violated = g
            .edges
            .iter()
            .filter(|e| !e.is_self_loop() && !e.allows(c.colors()[e.u], c.colors()[e.v]))
            .count();
        let expected = 2.0 * violated as f64 / (n * n) as f64 / 3.0;
        let r = total_rejection(&g, &pair).unwrap();
        prop_assert!((r.total_reject - expected).abs() < 1e-12, "{} vs {}", r.total_reject, expected);
        prop_assert!(r.eq_reject.abs() < 1e-12);
        prop_assert!(r.cons_reject_a.abs() < 1e-12);
        prop_assert!(r.unif_reject.abs() < 1e-12);
    }
}
