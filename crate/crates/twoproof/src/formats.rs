//! On-disk formats: constraint-graph JSON, proof JSON, DIMACS CNF, the
//! diagnostic report and the sweep CSV.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use twoproof_core::csp::{ConstraintGraph, Edge, SELF_LOOP_CONVENTION};
use twoproof_core::diagnostics::CaseReport;
use twoproof_core::reductions::{CnfFormula, Literal};
use twoproof_core::state::{ProofState, C64, NORM_TOL};
use twoproof_core::verifier::RejectionBreakdown;
use twoproof_core::SweepRow;

use crate::error::{CliError, Result};

/// Loaded proofs are renormalized when their squared norm is within this of 1
/// but outside [`NORM_TOL`]; closer ones are kept as written.
pub const LOAD_NORM_TOL: f64 = 1e-6;

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_owned(), source })
}

/// Writes `text` to `path`, or to stdout when `path` is `None`.
pub fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|source| CliError::Io { path: p.to_owned(), source }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn to_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data always serializes");
    s.push('\n');
    s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeJson {
    pub u: usize,
    pub v: usize,
    pub allowed: Vec<Vec<bool>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphJson {
    pub n: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub d: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conventions: Option<String>,
    pub edges: Vec<EdgeJson>,
}

impl From<&ConstraintGraph> for GraphJson {
    fn from(g: &ConstraintGraph) -> Self {
        GraphJson {
            n: g.n,
            k: g.k,
            d: g.d,
            conventions: Some(SELF_LOOP_CONVENTION.to_owned()),
            edges: g
                .edges
                .iter()
                .map(|e| EdgeJson { u: e.u, v: e.v, allowed: e.allowed.clone() })
                .collect(),
        }
    }
}

impl TryFrom<GraphJson> for ConstraintGraph {
    type Error = CliError;

    fn try_from(j: GraphJson) -> Result<Self> {
        if let Some(c) = &j.conventions {
            if c != SELF_LOOP_CONVENTION {
                return Err(CliError::parse(
                    "conventions",
                    format!("unsupported convention {c:?}; expected {SELF_LOOP_CONVENTION:?}"),
                ));
            }
        }
        let edges = j.edges.into_iter().map(|e| Edge::new(e.u, e.v, e.allowed)).collect();
        Ok(ConstraintGraph::new(j.n, j.k, j.d, edges)?)
    }
}

pub fn graph_to_json(g: &ConstraintGraph) -> String {
    to_pretty(&GraphJson::from(g))
}

pub fn graph_from_json(text: &str) -> Result<ConstraintGraph> {
    let j: GraphJson = serde_json::from_str(text).map_err(|e| CliError::parse("graph JSON", e))?;
    ConstraintGraph::try_from(j)
}

pub fn load_graph(path: &Path) -> Result<ConstraintGraph> {
    graph_from_json(&read_text(path)?).map_err(|e| match e {
        CliError::Parse { context, message } => {
            CliError::Parse { context: format!("{}: {context}", path.display()), message }
        }
        other => other,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProofJson {
    pub n: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub amps: Vec<[f64; 2]>,
}

impl From<&ProofState> for ProofJson {
    fn from(s: &ProofState) -> Self {
        ProofJson { n: s.n(), k: s.k(), amps: s.amps().iter().map(|a| [a.re, a.im]).collect() }
    }
}

impl TryFrom<ProofJson> for ProofState {
    type Error = CliError;

    fn try_from(j: ProofJson) -> Result<Self> {
        let amps: Vec<C64> = j.amps.iter().map(|&[re, im]| C64::new(re, im)).collect();
        let ns: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if !((ns - 1.0).abs() <= LOAD_NORM_TOL) {
            return Err(twoproof_core::Error::NotNormalized(ns).into());
        }
        if (ns - 1.0).abs() <= NORM_TOL {
            return Ok(ProofState::new(j.n, j.k, amps)?);
        }
        Ok(ProofState::normalized(j.n, j.k, amps)?)
    }
}

pub fn proof_to_json(s: &ProofState) -> String {
    to_pretty(&ProofJson::from(s))
}

pub fn proof_from_json(text: &str) -> Result<ProofState> {
    let j: ProofJson = serde_json::from_str(text).map_err(|e| CliError::parse("proof JSON", e))?;
    ProofState::try_from(j)
}

pub fn load_proof(path: &Path) -> Result<ProofState> {
    proof_from_json(&read_text(path)?).map_err(|e| match e {
        CliError::Parse { context, message } => {
            CliError::Parse { context: format!("{}: {context}", path.display()), message }
        }
        other => other,
    })
}

/// Parses DIMACS CNF: `c` comment lines, one `p cnf <vars> <clauses>` header,
/// then 0-terminated clauses of exactly three literals. A line starting with
/// `%` ends the input.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula> {
    let err = |line: usize, msg: String| CliError::parse(format!("DIMACS line {line}"), msg);
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current: Vec<Literal> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        if line.starts_with('p') {
            let parts: Vec<&str> = line.split_whitespace().collect();
            if header.is_some() {
                return Err(err(line_no, "duplicate problem line".into()));
            }
            match parts.as_slice() {
                ["p", "cnf", v, c] => {
                    let v = v.parse().map_err(|e| err(line_no, format!("variable count: {e}")))?;
                    let c = c.parse().map_err(|e| err(line_no, format!("clause count: {e}")))?;
                    header = Some((v, c));
                }
                _ => return Err(err(line_no, format!("malformed problem line {line:?}"))),
            }
            continue;
        }
        let Some((num_vars, _)) = header else {
            return Err(err(line_no, "clause before the problem line".into()));
        };
        for tok in line.split_whitespace() {
            let lit: i64 = tok.parse().map_err(|e| err(line_no, format!("literal {tok:?}: {e}")))?;
            if lit == 0 {
                let clause: [Literal; 3] = current.as_slice().try_into().map_err(|_| {
                    err(line_no, format!("clause has {} literals; exactly 3 are required", current.len()))
                })?;
                clauses.push(clause);
                current.clear();
                continue;
            }
            let l = Literal::from_dimacs(lit)?;
            if l.var >= num_vars {
                return Err(err(line_no, format!("literal {lit} exceeds {num_vars} variables")));
            }
            current.push(l);
        }
    }
    let Some((num_vars, declared)) = header else {
        return Err(CliError::parse("DIMACS", "missing `p cnf` problem line"));
    };
    if !current.is_empty() {
        return Err(CliError::parse("DIMACS", "last clause is not terminated by 0"));
    }
    if clauses.len() != declared {
        return Err(CliError::parse(
            "DIMACS",
            format!("header declares {declared} clauses but {} were read", clauses.len()),
        ));
    }
    Ok(CnfFormula::new(num_vars, clauses)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BreakdownJson {
    pub eq_reject: f64,
    pub cons_reject_a: f64,
    pub cons_reject_b: f64,
    pub unif_reject_psi: f64,
    pub unif_reject_phi: f64,
    pub unif_reject: f64,
    pub total_reject: f64,
    pub acceptance: f64,
}

impl From<&RejectionBreakdown> for BreakdownJson {
    fn from(r: &RejectionBreakdown) -> Self {
        BreakdownJson {
            eq_reject: r.eq_reject,
            cons_reject_a: r.cons_reject_a,
            cons_reject_b: r.cons_reject_b,
            unif_reject_psi: r.unif_reject_psi,
            unif_reject_phi: r.unif_reject_phi,
            unif_reject: r.unif_reject,
            total_reject: r.total_reject,
            acceptance: r.acceptance,
        }
    }
}

pub fn breakdown_to_json(r: &RejectionBreakdown) -> String {
    to_pretty(&BreakdownJson::from(r))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleCheckJson {
    pub analytic: BreakdownJson,
    pub oracle: BreakdownJson,
    pub max_delta: f64,
}

pub fn oracle_check_to_json(analytic: &RejectionBreakdown, oracle: &RejectionBreakdown) -> String {
    to_pretty(&OracleCheckJson {
        analytic: analytic.into(),
        oracle: oracle.into(),
        max_delta: analytic.max_abs_diff(oracle),
    })
}

/// Diagnostic report for one proof pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticJson {
    pub n: usize,
    #[serde(rename = "K")]
    pub k: usize,
    /// Regularity used by the near-proper case bound.
    pub d: Option<usize>,
    pub eta: f64,
    #[serde(rename = "set_A")]
    pub set_a: Vec<usize>,
    #[serde(rename = "set_Aprime")]
    pub set_a_prime: Vec<usize>,
    #[serde(rename = "set_B")]
    pub set_b: Vec<usize>,
    #[serde(rename = "set_C")]
    pub set_c: Vec<usize>,
    #[serde(rename = "set_Cprime")]
    pub set_c_prime: Vec<usize>,
    #[serde(rename = "mass_A")]
    pub mass_a: f64,
    #[serde(rename = "mass_AbarAprime")]
    pub mass_abar_aprime: f64,
    #[serde(rename = "mass_AbarAprimebarB")]
    pub mass_abar_aprimebar_b: f64,
    #[serde(rename = "mass_AbarAprimebarBbar")]
    pub mass_abar_aprimebar_bbar: f64,
    pub case_id: u8,
    pub predicted_bound: Option<f64>,
    pub actual_rejection: f64,
    pub argmax_colors_psi: Vec<usize>,
    pub argmax_colors_phi: Vec<usize>,
}

impl DiagnosticJson {
    pub fn new(report: &CaseReport, d: Option<usize>, actual_rejection: f64) -> Self {
        DiagnosticJson {
            n: report.n,
            k: report.k,
            d,
            eta: report.eta,
            set_a: report.set_a.clone(),
            set_a_prime: report.set_a_prime.clone(),
            set_b: report.set_b.clone(),
            set_c: report.set_c.clone(),
            set_c_prime: report.set_c_prime.clone(),
            mass_a: report.mass_a,
            mass_abar_aprime: report.mass_abar_aprime,
            mass_abar_aprimebar_b: report.mass_abar_aprimebar_b,
            mass_abar_aprimebar_bbar: report.mass_abar_aprimebar_bbar,
            case_id: report.case_id(),
            predicted_bound: report.predicted_bound,
            actual_rejection,
            argmax_colors_psi: report.argmax_colors_psi.clone(),
            argmax_colors_phi: report.argmax_colors_phi.clone(),
        }
    }
}

pub fn diagnostic_to_json(report: &CaseReport, d: Option<usize>, actual_rejection: f64) -> String {
    to_pretty(&DiagnosticJson::new(report, d, actual_rejection))
}

/// CSV columns of a sweep row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCsvRow {
    pub n: usize,
    pub best_acceptance: f64,
    pub measured_gap: f64,
    pub theoretical_bound: f64,
    pub case_id: Option<u8>,
    pub restarts: usize,
    pub seed: u64,
}

impl From<&SweepRow> for SweepCsvRow {
    fn from(r: &SweepRow) -> Self {
        SweepCsvRow {
            n: r.n,
            best_acceptance: r.best_acceptance,
            measured_gap: r.measured_gap,
            theoretical_bound: r.theoretical_bound,
            case_id: r.case_id,
            restarts: r.restarts,
            seed: r.seed,
        }
    }
}

pub const SWEEP_HEADER: &str = "n,best_acceptance,measured_gap,theoretical_bound,case_id,restarts,seed";

pub fn sweep_to_csv(rows: &[SweepRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(SweepCsvRow::from(r)).expect("in-memory CSV write");
    }
    if rows.is_empty() {
        return format!("{SWEEP_HEADER}\n");
    }
    String::from_utf8(w.into_inner().expect("in-memory CSV flush")).expect("CSV output is UTF-8")
}

pub fn sweep_from_csv(text: &str) -> Result<Vec<SweepCsvRow>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    r.deserialize().map(|row| row.map_err(|e| CliError::parse("sweep CSV", e))).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepJsonRow {
    #[serde(flatten)]
    pub row: SweepCsvRow,
    pub eta: f64,
}

pub fn sweep_to_json(rows: &[SweepRow]) -> String {
    let rows: Vec<SweepJsonRow> =
        rows.iter().map(|r| SweepJsonRow { row: r.into(), eta: r.eta }).collect();
    to_pretty(&rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use twoproof_core::reductions::{kcoloring_to_constraint_graph, regularize, SimpleGraph};
    use twoproof_core::state::random_state;

    #[test]
    fn graph_round_trip() {
        let tri = kcoloring_to_constraint_graph(&SimpleGraph::triangle(), 2).unwrap();
        let g = regularize(&tri, 3).unwrap();
        let text = graph_to_json(&g);
        assert!(text.contains("\"K\": 2"));
        assert!(text.contains("\"conventions\""));
        assert_eq!(graph_from_json(&text).unwrap(), g);
    }

    #[test]
    fn graph_json_without_conventions_loads() {
        let text = r#"{"n": 2, "K": 2, "d": null, "edges": [{"u": 0, "v": 1, "allowed": [[false, true], [true, false]]}]}"#;
        let g = graph_from_json(text).unwrap();
        assert_eq!(g.num_edges(), 1);
        assert!(!g.edges[0].allows(1, 1));
    }

    #[test]
    fn graph_json_rejects_bad_input() {
        let bad_table = r#"{"n": 2, "K": 2, "d": null, "edges": [{"u": 0, "v": 1, "allowed": [[true]]}]}"#;
        assert!(matches!(graph_from_json(bad_table), Err(CliError::Core(_))));
        let reversed = r#"{"n": 2, "K": 1, "d": null, "edges": [{"u": 1, "v": 0, "allowed": [[true]]}]}"#;
        assert!(graph_from_json(reversed).is_err());
        let convention = r#"{"n": 1, "K": 1, "d": null, "conventions": "loops count 2", "edges": []}"#;
        assert!(matches!(graph_from_json(convention), Err(CliError::Parse { .. })));
        assert!(matches!(graph_from_json("{"), Err(CliError::Parse { .. })));
    }

    #[test]
    fn proof_round_trip_is_exact() {
        let s = random_state(4, 3, 17);
        assert_eq!(proof_from_json(&proof_to_json(&s)).unwrap().amps(), s.amps());
    }

    #[test]
    fn proof_load_renormalizes_small_drift_only() {
        let near = r#"{"n": 1, "K": 2, "amps": [[0.7071068, 0.0], [0.7071068, 0.0]]}"#;
        let s = proof_from_json(near).unwrap();
        let ns: f64 = s.amps().iter().map(|a| a.norm_sqr()).sum();
        assert!((ns - 1.0).abs() < 1e-15);
        let far = r#"{"n": 1, "K": 2, "amps": [[1.0, 0.0], [1.0, 0.0]]}"#;
        assert!(matches!(
            proof_from_json(far),
            Err(CliError::Core(twoproof_core::Error::NotNormalized(_)))
        ));
        let short = r#"{"n": 2, "K": 2, "amps": [[1.0, 0.0]]}"#;
        assert!(proof_from_json(short).is_err());
    }

    #[test]
    fn dimacs_parsing() {
        let text = "c example\np cnf 4 2\n1 -2 3 0\n-1 2\n4 0\n%\n0\n";
        let f = parse_dimacs(text).unwrap();
        assert_eq!(f.num_vars(), 4);
        assert_eq!(f.m(), 2);
        assert_eq!(f.clauses()[0][1], Literal::neg(1));
        assert_eq!(f.clauses()[1][2], Literal::pos(3));
    }

    #[test]
    fn dimacs_errors() {
        assert!(parse_dimacs("1 2 3 0\n").is_err());
        assert!(parse_dimacs("p cnf 3 1\n1 2 0\n").is_err());
        assert!(parse_dimacs("p cnf 3 2\n1 2 3 0\n").is_err());
        assert!(parse_dimacs("p cnf 3 1\n1 2 3\n").is_err());
        assert!(parse_dimacs("p cnf 3 1\n1 2 4 0\n").is_err());
        assert!(parse_dimacs("p cnf 3 1\n1 1 2 0\n").is_err());
        assert!(parse_dimacs("p cnf x 1\n").is_err());
    }

    #[test]
    fn sweep_csv_layout() {
        let rows = vec![
            SweepRow {
                n: 5,
                best_acceptance: 0.75,
                measured_gap: 0.25,
                theoretical_bound: 1e-9,
                case_id: Some(6),
                restarts: 16,
                seed: 7,
                eta: 0.1,
            },
            SweepRow {
                n: 6,
                best_acceptance: 1.0,
                measured_gap: 0.0,
                theoretical_bound: 0.0,
                case_id: None,
                restarts: 16,
                seed: 7,
                eta: 0.0,
            },
        ];
        let text = sweep_to_csv(&rows);
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(SWEEP_HEADER));
        assert_eq!(lines.next(), Some("5,0.75,0.25,1e-9,6,16,7"));
        assert_eq!(lines.next(), Some("6,1.0,0.0,0.0,,16,7"));
        let back = sweep_from_csv(&text).unwrap();
        assert_eq!(back[0], SweepCsvRow::from(&rows[0]));
        assert_eq!(back[1].case_id, None);
        assert_eq!(sweep_to_csv(&[]), format!("{SWEEP_HEADER}\n"));
    }
}
