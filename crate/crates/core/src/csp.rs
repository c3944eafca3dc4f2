//! Constraint graphs, colorings, and the exhaustive (un)satisfiability oracle.
//!
//! Edges are stored in canonical orientation `u <= v`. A table entry
//! `allowed[a][b]` always reads `a` as the color of `u` and `b` as the color
//! of `v`, so asymmetric relations bind to the smaller-index endpoint.
//!
//! A self-loop contributes 1 to its vertex's degree.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Default cap on the number of colorings the exhaustive oracle will visit.
pub const DEFAULT_BUDGET: u64 = 1 << 24;

/// Degree-counting rule recorded in instance files.
pub const SELF_LOOP_CONVENTION: &str = "self-loop contributes 1 to its vertex's degree";

/// A binary constraint on an (undirected) edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    /// `allowed[a][b]`: color `a` at `u`, color `b` at `v`.
    pub allowed: Vec<Vec<bool>>,
}

impl Edge {
    pub fn new(u: usize, v: usize, allowed: Vec<Vec<bool>>) -> Self {
        Self { u, v, allowed }
    }

    /// Edge whose table is `pred(color_u, color_v)` over `k` colors.
    pub fn from_fn(u: usize, v: usize, k: usize, pred: impl Fn(usize, usize) -> bool) -> Self {
        let allowed = (0..k).map(|a| (0..k).map(|b| pred(a, b)).collect()).collect();
        Self { u, v, allowed }
    }

    pub fn is_self_loop(&self) -> bool {
        self.u == self.v
    }

    /// Evaluates the relation with `color_u` on `u` and `color_v` on `v`.
    #[inline]
    pub fn allows(&self, color_u: usize, color_v: usize) -> bool {
        self.allowed[color_u][color_v]
    }

    /// Evaluates the relation for colors given at arbitrary endpoints `a`, `b`
    /// (`{a, b} = {u, v}`), applying the canonical orientation.
    #[inline]
    pub fn allows_at(&self, a: usize, color_a: usize, color_b: usize) -> bool {
        if a == self.u {
            self.allowed[color_a][color_b]
        } else {
            self.allowed[color_b][color_a]
        }
    }
}

/// Undirected constraint graph over `n` vertices and colors `0..k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintGraph {
    pub n: usize,
    pub k: usize,
    /// Declared regularity, if any.
    pub d: Option<usize>,
    pub edges: Vec<Edge>,
}

impl ConstraintGraph {
    /// Builds a graph and rejects it if [`validate_graph`] reports any error.
    pub fn new(n: usize, k: usize, d: Option<usize>, edges: Vec<Edge>) -> Result<Self> {
        let g = Self { n, k, d, edges };
        g.ensure_valid()?;
        Ok(g)
    }

    /// Fails with the first error-severity violation, ignoring warnings.
    pub fn ensure_valid(&self) -> Result<()> {
        match validate_graph(self)
            .into_iter()
            .find(|v| v.severity == Severity::Error)
        {
            Some(v) => Err(Error::InvalidGraph(v.message)),
            None => Ok(()),
        }
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Vertex degrees, self-loops counting once.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.n];
        for e in &self.edges {
            if e.u < self.n {
                deg[e.u] += 1;
            }
            if e.v != e.u && e.v < self.n {
                deg[e.v] += 1;
            }
        }
        deg
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    pub fn is_regular(&self, d: usize) -> bool {
        self.degrees().iter().all(|&x| x == d)
    }

    /// Number of edges whose constraint the coloring satisfies.
    pub fn satisfied_count(&self, c: &Coloring) -> usize {
        let colors = c.colors();
        self.edges
            .iter()
            .filter(|e| e.allows(colors[e.u], colors[e.v]))
            .count()
    }

    pub fn check_coloring(&self, c: &Coloring) -> Result<()> {
        if c.len() != self.n {
            return Err(Error::InvalidColoring(format!(
                "length {} does not match n = {}",
                c.len(),
                self.n
            )));
        }
        if let Some((i, &col)) = c.colors().iter().enumerate().find(|(_, &x)| x >= self.k) {
            return Err(Error::InvalidColoring(format!(
                "vertex {i} has color {col} outside 0..{}",
                self.k
            )));
        }
        Ok(())
    }
}

/// An assignment of a color to each vertex.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coloring(Vec<usize>);

impl Coloring {
    pub fn new(colors: Vec<usize>) -> Self {
        Self(colors)
    }

    pub fn uniform(n: usize, color: usize) -> Self {
        Self(vec![color; n])
    }

    pub fn colors(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<usize> {
        self.0
    }
}

impl From<Vec<usize>> for Coloring {
    fn from(v: Vec<usize>) -> Self {
        Self(v)
    }
}

/// Result of the exhaustive max-satisfaction search.
#[derive(Debug, Clone, PartialEq)]
pub struct SatStats {
    pub satisfied_fraction: f64,
    pub best_coloring: Coloring,
    /// `1 - satisfied_fraction`; zero iff the graph is satisfiable.
    pub eta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub severity: Severity,
    pub message: String,
}

impl Violation {
    fn error(message: String) -> Self {
        Self { severity: Severity::Error, message }
    }

    fn warning(message: String) -> Self {
        Self { severity: Severity::Warning, message }
    }
}

/// Lists every invariant violation of `g`; an empty list means the graph is valid.
///
/// Self-loops whose table rejects a diagonal pair produce a warning: the
/// verifier's consistency test never evaluates self-loop tables, so such a
/// constraint counts against satisfiability but cannot be enforced.
pub fn validate_graph(g: &ConstraintGraph) -> Vec<Violation> {
    let mut out = Vec::new();
    if g.n == 0 {
        out.push(Violation::error("graph has no vertices".into()));
    }
    match g.k {
        0 => out.push(Violation::error("alphabet is empty".into())),
        1 => out.push(Violation::warning(
            "alphabet size K = 1 is below the protocol's K >= 2".into(),
        )),
        _ => {}
    }
    let mut seen = BTreeSet::new();
    for (idx, e) in g.edges.iter().enumerate() {
        if e.u >= g.n || e.v >= g.n {
            out.push(Violation::error(format!(
                "edge {idx} ({}, {}) has an endpoint outside 0..{}",
                e.u, e.v, g.n
            )));
        }
        if e.u > e.v {
            out.push(Violation::error(format!(
                "edge {idx} ({}, {}) is not in canonical orientation u <= v",
                e.u, e.v
            )));
        }
        if !seen.insert((e.u.min(e.v), e.u.max(e.v))) {
            out.push(Violation::error(format!(
                "edge {idx} ({}, {}) duplicates an earlier edge",
                e.u, e.v
            )));
        }
        let shape_ok = e.allowed.len() == g.k && e.allowed.iter().all(|row| row.len() == g.k);
        if !shape_ok {
            out.push(Violation::error(format!(
                "edge {idx} ({}, {}) table is not {}x{}",
                e.u, e.v, g.k, g.k
            )));
        } else if e.is_self_loop() && (0..g.k).any(|j| !e.allowed[j][j]) {
            out.push(Violation::warning(format!(
                "self-loop at vertex {} rejects a diagonal pair; the verifier cannot enforce it",
                e.u
            )));
        }
    }
    if let Some(d) = g.d {
        for (i, deg) in g.degrees().into_iter().enumerate() {
            if deg != d {
                out.push(Violation::error(format!(
                    "vertex {i} has degree {deg} but d = {d} is declared"
                )));
            }
        }
    }
    out
}

/// Fraction of edges satisfied by `c`.
pub fn satisfied_fraction(g: &ConstraintGraph, c: &Coloring) -> Result<f64> {
    g.ensure_valid()?;
    g.check_coloring(c)?;
    if g.edges.is_empty() {
        return Err(Error::UndefinedFraction);
    }
    Ok(g.satisfied_count(c) as f64 / g.num_edges() as f64)
}

pub(crate) fn check_budget(g: &ConstraintGraph, budget: u64) -> Result<()> {
    let exceeded = || Error::BudgetExceeded { k: g.k, n: g.n, budget };
    let n = u32::try_from(g.n).map_err(|_| exceeded())?;
    match (g.k as u64).checked_pow(n) {
        Some(total) if total <= budget => Ok(()),
        _ => Err(exceeded()),
    }
}

/// Visits every coloring of `n` vertices over `k` colors in lexicographic
/// order (vertex 0 most significant).
pub(crate) fn for_each_coloring(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    let mut colors = vec![0usize; n];
    loop {
        f(&colors);
        let mut pos = n;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            colors[pos] += 1;
            if colors[pos] < k {
                break;
            }
            colors[pos] = 0;
        }
    }
}

/// Exhaustive search for the best coloring. Ties go to the lexicographically
/// smallest maximizer. An edgeless graph is fully satisfied by the all-zero
/// coloring.
pub fn max_satisfied_fraction(g: &ConstraintGraph, budget: u64) -> Result<SatStats> {
    g.ensure_valid()?;
    check_budget(g, budget)?;
    if g.edges.is_empty() {
        return Ok(SatStats {
            satisfied_fraction: 1.0,
            best_coloring: Coloring::uniform(g.n, 0),
            eta: 0.0,
        });
    }
    let m = g.num_edges();
    let mut best_count = 0usize;
    let mut best: Option<Vec<usize>> = None;
    for_each_coloring(g.n, g.k, |colors| {
        if best_count == m && best.is_some() {
            return;
        }
        let count = g
            .edges
            .iter()
            .filter(|e| e.allows(colors[e.u], colors[e.v]))
            .count();
        if best.is_none() || count > best_count {
            best_count = count;
            best = Some(colors.to_vec());
        }
    });
    let satisfied = best_count as f64 / m as f64;
    Ok(SatStats {
        satisfied_fraction: satisfied,
        best_coloring: Coloring::new(best.expect("at least one coloring is enumerated")),
        eta: (m - best_count) as f64 / m as f64,
    })
}

/// A satisfying coloring if one exists.
pub fn is_satisfiable(g: &ConstraintGraph, budget: u64) -> Result<Option<Coloring>> {
    let stats = max_satisfied_fraction(g, budget)?;
    Ok((stats.eta == 0.0).then_some(stats.best_coloring))
}
