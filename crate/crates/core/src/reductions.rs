//! Instance generators: graph coloring and 3-SAT to constraint graphs,
//! regularization by self-loops, and a few seeded families.
//!
//! None of these reductions carries a constant-gap guarantee; the gap of
//! each produced instance is measured with the exhaustive oracle instead.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::csp::{ConstraintGraph, Edge};
use crate::error::{Error, Result};

/// Undirected simple graph (no self-loops, no parallel edges).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl SimpleGraph {
    /// Edges may be given in either orientation; they are stored as `(min, max)`.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidArgument(format!(
                    "edge ({a}, {b}) outside 0..{n}"
                )));
            }
            if a == b {
                return Err(Error::InvalidArgument(format!("self-loop at {a}")));
            }
            let e = (a.min(b), a.max(b));
            if !seen.insert(e) {
                return Err(Error::InvalidArgument(format!("duplicate edge ({a}, {b})")));
            }
            out.push(e);
        }
        Ok(Self { n, edges: out })
    }

    pub fn triangle() -> Self {
        Self::cycle(3).expect("triangle is a valid cycle")
    }

    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidArgument(format!("cycle needs n >= 3, got {n}")));
        }
        Self::new(n, (0..n).map(|i| (i, (i + 1) % n)))
    }

    pub fn path(n: usize) -> Result<Self> {
        Self::new(n, (1..n).map(|i| (i - 1, i)))
    }

    pub fn complete(n: usize) -> Result<Self> {
        Self::new(n, (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))))
    }

    /// Erdős–Rényi G(n, p), deterministic per seed.
    pub fn random(n: usize, edge_prob: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&edge_prob) {
            return Err(Error::InvalidArgument(format!("edge probability {edge_prob}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut edges = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if rng.random::<f64>() < edge_prob {
                    edges.push((a, b));
                }
            }
        }
        Self::new(n, edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }
}

/// K-coloring as a constraint graph: inequality on every edge.
pub fn kcoloring_to_constraint_graph(graph: &SimpleGraph, k: usize) -> Result<ConstraintGraph> {
    if graph.edges.is_empty() {
        return Err(Error::InvalidArgument("input graph has no edges".into()));
    }
    let edges = graph
        .edges
        .iter()
        .map(|&(u, v)| Edge::from_fn(u, v, k, |a, b| a != b))
        .collect();
    ConstraintGraph::new(graph.n, k, None, edges)
}

pub fn three_coloring_to_constraint_graph(graph: &SimpleGraph) -> Result<ConstraintGraph> {
    kcoloring_to_constraint_graph(graph, 3)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Literal {
    pub var: usize,
    pub negated: bool,
}

impl Literal {
    pub fn pos(var: usize) -> Self {
        Self { var, negated: false }
    }

    pub fn neg(var: usize) -> Self {
        Self { var, negated: true }
    }

    /// DIMACS-style signed, 1-based literal.
    pub fn from_dimacs(lit: i64) -> Result<Self> {
        if lit == 0 {
            return Err(Error::InvalidFormula("literal 0".into()));
        }
        let var = usize::try_from(lit.unsigned_abs() - 1)
            .map_err(|_| Error::InvalidFormula(format!("literal {lit} out of range")))?;
        Ok(Self { var, negated: lit < 0 })
    }

    pub fn eval(&self, assignment: &[bool]) -> bool {
        assignment[self.var] != self.negated
    }
}

pub type Clause = [Literal; 3];

/// 3-CNF formula with exactly three distinct variables per clause.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfFormula {
    num_vars: usize,
    clauses: Vec<Clause>,
}

impl CnfFormula {
    pub fn new(num_vars: usize, clauses: Vec<Clause>) -> Result<Self> {
        for (ci, c) in clauses.iter().enumerate() {
            for l in c {
                if l.var >= num_vars {
                    return Err(Error::InvalidFormula(format!(
                        "clause {ci} uses variable {} but num_vars = {num_vars}",
                        l.var
                    )));
                }
            }
            if c[0].var == c[1].var || c[0].var == c[2].var || c[1].var == c[2].var {
                return Err(Error::InvalidFormula(format!(
                    "clause {ci} repeats a variable"
                )));
            }
        }
        Ok(Self { num_vars, clauses })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    /// Clause count.
    pub fn m(&self) -> usize {
        self.clauses.len()
    }

    pub fn eval(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| c.iter().any(|l| l.eval(assignment)))
    }

    /// Brute-force search over all `2^num_vars` assignments.
    pub fn satisfying_assignment(&self) -> Option<Vec<bool>> {
        let mut a = vec![false; self.num_vars];
        for mask in 0u64..(1u64 << self.num_vars) {
            for (v, slot) in a.iter_mut().enumerate() {
                *slot = mask >> v & 1 == 1;
            }
            if self.eval(&a) {
                return Some(a);
            }
        }
        None
    }
}

/// Number of colors used by the naive 3-SAT reduction.
pub const CLAUSE_COLORS: usize = 7;

/// Literal truth values `(l1, l2, l3)` encoded by clause color `color`.
///
/// The seven satisfying truth patterns are ordered as 3-bit integers
/// `l1 l2 l3` (l1 most significant), so color `j` is the pattern `j + 1`.
pub fn clause_color_truths(color: usize) -> [bool; 3] {
    assert!(color < CLAUSE_COLORS);
    let bits = color + 1;
    [bits & 4 != 0, bits & 2 != 0, bits & 1 != 0]
}

/// Variable values implied by giving `clause` the color `color`.
pub fn clause_color_assignment(clause: &Clause, color: usize) -> [(usize, bool); 3] {
    let t = clause_color_truths(color);
    core::array::from_fn(|p| (clause[p].var, t[p] != clause[p].negated))
}

/// One vertex per clause, colored by which satisfying assignment of its three
/// variables it picks; clauses sharing a variable must agree on it.
///
/// Satisfiable formulas map to satisfiable graphs. There is no quantitative
/// soundness guarantee.
pub fn threesat_to_constraint_graph_naive(f: &CnfFormula) -> Result<ConstraintGraph> {
    if f.m() < 2 {
        return Err(Error::InvalidFormula(format!(
            "need at least 2 clauses, got {}",
            f.m()
        )));
    }
    let mut edges = Vec::new();
    for p in 0..f.m() {
        for q in p + 1..f.m() {
            let (cp, cq) = (&f.clauses[p], &f.clauses[q]);
            let shares = cp.iter().any(|a| cq.iter().any(|b| a.var == b.var));
            if !shares {
                continue;
            }
            edges.push(Edge::from_fn(p, q, CLAUSE_COLORS, |a, b| {
                let ap = clause_color_assignment(cp, a);
                let bq = clause_color_assignment(cq, b);
                ap.iter()
                    .all(|&(v, x)| bq.iter().all(|&(w, y)| v != w || x == y))
            }));
        }
    }
    ConstraintGraph::new(f.m(), CLAUSE_COLORS, None, edges)
}

/// Pads every vertex to degree `d_target` with all-true self-loops and
/// declares `d = d_target`.
///
/// Since the new tables accept everything, satisfiability is unchanged and
/// `eta_new = eta_old * |E_old| / |E_new|`. Only one self-loop per vertex can
/// be represented, so a vertex needing more (or already carrying a loop and
/// needing another) is an error.
pub fn regularize(g: &ConstraintGraph, d_target: usize) -> Result<ConstraintGraph> {
    g.ensure_valid()?;
    let degrees = g.degrees();
    let max_degree = degrees.iter().copied().max().unwrap_or(0);
    if d_target < max_degree {
        return Err(Error::DegreeTooSmall { target: d_target, max_degree });
    }
    let mut has_loop = vec![false; g.n];
    for e in g.edges.iter().filter(|e| e.is_self_loop()) {
        has_loop[e.u] = true;
    }
    let mut edges = g.edges.clone();
    for (i, &deg) in degrees.iter().enumerate() {
        let missing = d_target - deg;
        if missing == 0 {
            continue;
        }
        if missing > 1 || has_loop[i] {
            return Err(Error::InvalidArgument(format!(
                "vertex {i} needs {missing} more self-loop(s); at most one per vertex is representable"
            )));
        }
        edges.push(Edge::from_fn(i, i, g.k, |_, _| true));
    }
    edges.sort_by_key(|e| (e.u, e.v));
    ConstraintGraph::new(g.n, g.k, Some(d_target), edges)
}

/// Random constraint graph: G(n, edge_prob) with each table entry allowed
/// independently with probability `allow_prob`. Deterministic per seed.
pub fn random_constraint_graph(
    n: usize,
    k: usize,
    edge_prob: f64,
    allow_prob: f64,
    seed: u64,
) -> Result<ConstraintGraph> {
    if !(0.0..=1.0).contains(&allow_prob) {
        return Err(Error::InvalidArgument(format!("allow probability {allow_prob}")));
    }
    let graph = SimpleGraph::random(n, edge_prob, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let edges = graph
        .edges()
        .iter()
        .map(|&(u, v)| {
            let allowed = (0..k)
                .map(|_| (0..k).map(|_| rng.random::<f64>() < allow_prob).collect())
                .collect();
            Edge::new(u, v, allowed)
        })
        .collect();
    ConstraintGraph::new(n, k, None, edges)
}

/// Parametrized instance families indexed by vertex count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// n-cycle with inequality constraints over `k` colors, padded with
    /// self-loops to `degree`. Unsatisfiable for odd n and k = 2.
    Cycle { k: usize, degree: usize },
    /// Path with inequality constraints, padded to `degree`; always satisfiable for k >= 2.
    Path { k: usize, degree: usize },
    /// Complete graph with inequality constraints; (n-1)-regular.
    Complete { k: usize },
}

impl Family {
    pub fn build(&self, n: usize) -> Result<ConstraintGraph> {
        match *self {
            Family::Cycle { k, degree } => {
                regularize(&kcoloring_to_constraint_graph(&SimpleGraph::cycle(n)?, k)?, degree)
            }
            Family::Path { k, degree } => {
                regularize(&kcoloring_to_constraint_graph(&SimpleGraph::path(n)?, k)?, degree)
            }
            Family::Complete { k } => {
                let g = kcoloring_to_constraint_graph(&SimpleGraph::complete(n)?, k)?;
                regularize(&g, n - 1)
            }
        }
    }
}
