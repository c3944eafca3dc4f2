//! Command-line front-end.
//!
//! Every command is deterministic given its inputs and `--seed`. Restart `i`
//! of an attack draws its starting state from [`restart_seed`]`(seed, i)`;
//! sweeps reuse the same seed for every size.
//!
//! [`restart_seed`]: twoproof_core::adversary::restart_seed

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use twoproof_core::adversary::{classical_attack_bruteforce, fit_inverse_n, gap_sweep, seesaw_attack};
use twoproof_core::csp::{max_satisfied_fraction, ConstraintGraph, DEFAULT_BUDGET};
use twoproof_core::diagnostics::classify;
use twoproof_core::oracle::rejection_by_enumeration;
use twoproof_core::reductions::{
    kcoloring_to_constraint_graph, random_constraint_graph, regularize,
    threesat_to_constraint_graph_naive, Family, SimpleGraph,
};
use twoproof_core::state::ProofPair;
use twoproof_core::verifier::total_rejection;
use twoproof_core::{AttackConfig, AttackResult};

use crate::error::{CliError, Result};
use crate::formats::{
    breakdown_to_json, diagnostic_to_json, emit, graph_to_json, load_graph, load_proof,
    oracle_check_to_json, parse_dimacs, proof_to_json, read_text, sweep_to_csv, sweep_to_json,
    ProofJson,
};

/// Largest tolerated disagreement between closed form and enumeration.
pub const ORACLE_TOL: f64 = 1e-9;
/// Slack on `rejection >= predicted bound`.
pub const BOUND_TOL: f64 = 1e-12;

#[derive(Debug, Parser)]
#[command(name = "twoproof", version, about = "Two-proof verifier simulator and cheating-proof test bench")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a constraint-graph instance.
    Gen(GenArgs),
    /// Rejection breakdown of a proof pair.
    Verify(VerifyArgs),
    /// Search for a strong cheating proof pair.
    Attack(AttackArgs),
    /// Soundness case analysis of a proof pair.
    Diagnose(DiagnoseArgs),
    /// Attack every size of an instance family.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    /// Triangle with inequality constraints over `--k` colors.
    Triangle,
    /// K-coloring of a `--graph` shape on `--n` vertices.
    Kcolor,
    /// Clause-vertex reduction of the DIMACS file `--cnf`.
    CnfNaive,
    /// `--instance` (or a `kcolor` graph) padded with self-loops to degree `--d`.
    Regularized,
    /// Random tables on G(`--n`, `--edge-prob`).
    RandomCsp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Shape {
    Random,
    Cycle,
    Path,
    Complete,
    Triangle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyKind {
    /// Inequality cycle, unsatisfiable for odd n with K = 2.
    Cycle,
    /// Inequality path, satisfiable for K >= 2.
    Path,
    /// Inequality clique.
    Complete,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    pub kind: GenKind,
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    #[arg(long, default_value_t = 5)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = Shape::Random)]
    pub graph: Shape,
    #[arg(long, default_value_t = 0.5)]
    pub edge_prob: f64,
    #[arg(long, default_value_t = 0.5)]
    pub allow_prob: f64,
    /// DIMACS CNF input for `cnf-naive`.
    #[arg(long)]
    pub cnf: Option<PathBuf>,
    /// Instance to regularize.
    #[arg(long)]
    pub instance: Option<PathBuf>,
    /// Target degree for `regularized`; defaults to the maximum degree.
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Cap on K^n for the exact eta computation.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
    /// Do not compute eta.
    #[arg(long)]
    pub skip_eta: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub psi: PathBuf,
    /// Defaults to `--psi`.
    #[arg(long)]
    pub phi: Option<PathBuf>,
    /// Also run the enumeration oracle and report the largest difference.
    #[arg(long)]
    pub oracle: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct AttackOpts {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 16)]
    pub restarts: usize,
    #[arg(long, default_value_t = 200)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Cap on K^n for the warm start and exact eta.
    #[arg(long, default_value_t = 1 << 20)]
    pub budget: u64,
}

impl From<AttackOpts> for AttackConfig {
    fn from(o: AttackOpts) -> Self {
        AttackConfig {
            restarts: o.restarts,
            max_iters: o.max_iters,
            tol: o.tol,
            seed: o.seed,
            budget: o.budget,
        }
    }
}

#[derive(Debug, Args)]
pub struct AttackArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[command(flatten)]
    pub opts: AttackOpts,
    /// Scan proper twin pairs and basis pairs instead of the see-saw.
    #[arg(long)]
    pub classical: bool,
    /// Write the best psi here.
    #[arg(long)]
    pub psi: Option<PathBuf>,
    /// Write the best phi here.
    #[arg(long)]
    pub phi: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct DiagnoseArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub psi: PathBuf,
    /// Defaults to `--psi`.
    #[arg(long)]
    pub phi: Option<PathBuf>,
    /// Unsatisfiable fraction, as a decimal or `p/q`; computed exactly when absent.
    #[arg(long, value_parser = parse_eta)]
    pub eta: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum, default_value_t = FamilyKind::Cycle)]
    pub family: FamilyKind,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    /// Self-loop padding target (ignored for `complete`).
    #[arg(long, default_value_t = 3)]
    pub degree: usize,
    #[arg(long, value_delimiter = ',', required = true)]
    pub sizes: Vec<usize>,
    #[command(flatten)]
    pub opts: AttackOpts,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
}

/// Parses `0.25` or `1/4`.
pub fn parse_eta(s: &str) -> std::result::Result<f64, String> {
    let value = match s.split_once('/') {
        Some((p, q)) => {
            let p: f64 = p.trim().parse().map_err(|e| format!("numerator: {e}"))?;
            let q: f64 = q.trim().parse().map_err(|e| format!("denominator: {e}"))?;
            p / q
        }
        None => s.trim().parse().map_err(|e| format!("{e}"))?,
    };
    if value > 0.0 && value <= 1.0 {
        Ok(value)
    } else {
        Err(format!("eta must lie in (0, 1], got {value}"))
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Attack(a) => cmd_attack(a),
        Command::Diagnose(a) => cmd_diagnose(a),
        Command::Sweep(a) => cmd_sweep(a),
    }
}

fn json_only(format: OutputFormat, command: &str) -> Result<()> {
    match format {
        OutputFormat::Json => Ok(()),
        OutputFormat::Csv => Err(CliError::Usage(format!("`{command}` writes JSON only; CSV is for `sweep`"))),
    }
}

fn simple_graph(shape: Shape, n: usize, edge_prob: f64, seed: u64) -> Result<SimpleGraph> {
    Ok(match shape {
        Shape::Random => SimpleGraph::random(n, edge_prob, seed)?,
        Shape::Cycle => SimpleGraph::cycle(n)?,
        Shape::Path => SimpleGraph::path(n)?,
        Shape::Complete => SimpleGraph::complete(n)?,
        Shape::Triangle => SimpleGraph::triangle(),
    })
}

fn build_instance(a: &GenArgs) -> Result<ConstraintGraph> {
    Ok(match a.kind {
        GenKind::Triangle => kcoloring_to_constraint_graph(&SimpleGraph::triangle(), a.k)?,
        GenKind::Kcolor => {
            kcoloring_to_constraint_graph(&simple_graph(a.graph, a.n, a.edge_prob, a.seed)?, a.k)?
        }
        GenKind::CnfNaive => {
            let path = a.cnf.as_deref().ok_or_else(|| CliError::Usage("`cnf-naive` needs --cnf".into()))?;
            threesat_to_constraint_graph_naive(&parse_dimacs(&read_text(path)?)?)?
        }
        GenKind::Regularized => {
            let base = match &a.instance {
                Some(p) => load_graph(p)?,
                None => kcoloring_to_constraint_graph(&simple_graph(a.graph, a.n, a.edge_prob, a.seed)?, a.k)?,
            };
            let d = a.d.unwrap_or_else(|| base.max_degree());
            regularize(&base, d)?
        }
        GenKind::RandomCsp => random_constraint_graph(a.n, a.k, a.edge_prob, a.allow_prob, a.seed)?,
    })
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 { a } else { gcd(b, a % b) }
}

fn cmd_gen(a: &GenArgs) -> Result<()> {
    let g = build_instance(a)?;
    let mut summary = format!(
        "n = {}\nK = {}\nd = {}\nedges = {}\n",
        g.n,
        g.k,
        g.d.map_or_else(|| "none".to_owned(), |d| d.to_string()),
        g.num_edges()
    );
    if !a.skip_eta && g.num_edges() > 0 {
        let stats = max_satisfied_fraction(&g, a.budget).map_err(|e| match e {
            twoproof_core::Error::BudgetExceeded { .. } => {
                CliError::Usage(format!("{e}; pass --skip-eta or raise --budget"))
            }
            other => other.into(),
        })?;
        let m = g.num_edges();
        let unsat = m - g.satisfied_count(&stats.best_coloring);
        if unsat == 0 {
            summary.push_str("eta = 0 (satisfiable)\n");
        } else {
            let div = gcd(unsat, m);
            summary.push_str(&format!("eta = {}/{} ({})\n", unsat / div, m / div, stats.eta));
        }
    }
    let json = graph_to_json(&g);
    match &a.out {
        Some(path) => {
            emit(Some(path), &json)?;
            emit(None, &summary)
        }
        None => {
            eprint!("{summary}");
            emit(None, &json)
        }
    }
}

/// Loads an instance for the case analysis. A graph that is regular but
/// declares no `d` gets its common degree declared, since the near-proper
/// case bound needs it.
fn load_for_bounds(path: &Path) -> Result<ConstraintGraph> {
    let mut g = load_graph(path)?;
    if g.d.is_none() && g.n > 0 {
        let d = g.degrees()[0];
        if g.is_regular(d) {
            g = ConstraintGraph::new(g.n, g.k, Some(d), g.edges)?;
        }
    }
    Ok(g)
}

fn load_pair(psi: &Path, phi: Option<&Path>) -> Result<ProofPair> {
    let s = load_proof(psi)?;
    let t = match phi {
        Some(p) => load_proof(p)?,
        None => s.clone(),
    };
    Ok(ProofPair::new(s, t)?)
}

fn cmd_verify(a: &VerifyArgs) -> Result<()> {
    json_only(a.format, "verify")?;
    let g = load_graph(&a.instance)?;
    let pair = load_pair(&a.psi, a.phi.as_deref())?;
    let analytic = total_rejection(&g, &pair)?;
    if !a.oracle {
        return emit(a.out.as_deref(), &breakdown_to_json(&analytic));
    }
    let oracle = rejection_by_enumeration(&g, &pair)?;
    emit(a.out.as_deref(), &oracle_check_to_json(&analytic, &oracle))?;
    let delta = analytic.max_abs_diff(&oracle);
    if delta > ORACLE_TOL {
        return Err(CliError::Violation(format!(
            "closed form and enumeration differ by {delta} (> {ORACLE_TOL})"
        )));
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct AttackJson {
    acceptance: f64,
    measured_gap: f64,
    eta: Option<f64>,
    case_id: Option<u8>,
    predicted_bound: Option<f64>,
    iterations: usize,
    restarts_used: usize,
    best_restart: usize,
    seed: u64,
    trace: Vec<f64>,
    psi: ProofJson,
    phi: ProofJson,
}

fn cmd_attack(a: &AttackArgs) -> Result<()> {
    json_only(a.format, "attack")?;
    let g = load_for_bounds(&a.instance)?;
    let config = AttackConfig::from(a.opts);
    let result: AttackResult = if a.classical {
        classical_attack_bruteforce(&g, config.budget)?
    } else {
        seesaw_attack(&g, &config)?
    };
    let gap = 1.0 - result.acceptance;
    let eta = if g.num_edges() > 0 {
        match max_satisfied_fraction(&g, config.budget) {
            Ok(s) => Some(s.eta),
            Err(twoproof_core::Error::BudgetExceeded { .. }) => None,
            Err(e) => return Err(e.into()),
        }
    } else {
        Some(0.0)
    };
    let report = match eta {
        Some(e) if e > 0.0 => Some(classify(&g, &result.best_pair, e)?),
        _ => None,
    };
    let predicted = report.as_ref().and_then(|r| r.predicted_bound);
    let out = AttackJson {
        acceptance: result.acceptance,
        measured_gap: gap,
        eta,
        case_id: report.as_ref().map(|r| r.case_id()),
        predicted_bound: predicted,
        iterations: result.iterations,
        restarts_used: result.restarts_used,
        best_restart: result.best_restart,
        seed: result.seed,
        trace: result.trace.clone(),
        psi: (&result.best_pair.psi).into(),
        phi: (&result.best_pair.phi).into(),
    };
    let mut text = serde_json::to_string_pretty(&out).expect("plain data always serializes");
    text.push('\n');
    emit(a.out.as_deref(), &text)?;
    if let Some(p) = &a.psi {
        emit(Some(p), &proof_to_json(&result.best_pair.psi))?;
    }
    if let Some(p) = &a.phi {
        emit(Some(p), &proof_to_json(&result.best_pair.phi))?;
    }
    if let Some(bound) = predicted {
        if gap < bound - BOUND_TOL {
            return Err(CliError::Violation(format!(
                "attack found rejection {gap} below the predicted bound {bound}"
            )));
        }
    }
    Ok(())
}

fn cmd_diagnose(a: &DiagnoseArgs) -> Result<()> {
    json_only(a.format, "diagnose")?;
    let g = load_for_bounds(&a.instance)?;
    let pair = load_pair(&a.psi, a.phi.as_deref())?;
    let eta = match a.eta {
        Some(e) => e,
        None => max_satisfied_fraction(&g, a.budget)?.eta,
    };
    let report = classify(&g, &pair, eta)?;
    let actual = total_rejection(&g, &pair)?.total_reject;
    emit(a.out.as_deref(), &diagnostic_to_json(&report, g.d, actual))?;
    if let Some(bound) = report.predicted_bound {
        if actual < bound - BOUND_TOL {
            return Err(CliError::Violation(format!(
                "rejection {actual} is below the predicted bound {bound} (case {})",
                report.case_id()
            )));
        }
    }
    Ok(())
}

fn cmd_sweep(a: &SweepArgs) -> Result<()> {
    let family = match a.family {
        FamilyKind::Cycle => Family::Cycle { k: a.k, degree: a.degree },
        FamilyKind::Path => Family::Path { k: a.k, degree: a.degree },
        FamilyKind::Complete => Family::Complete { k: a.k },
    };
    let rows = gap_sweep(|n| family.build(n), &a.sizes, &AttackConfig::from(a.opts))?;
    let text = match a.format {
        OutputFormat::Csv => sweep_to_csv(&rows),
        OutputFormat::Json => sweep_to_json(&rows),
    };
    emit(a.out.as_deref(), &text)?;
    if let Some(c) = fit_inverse_n(&rows) {
        eprintln!("fitted c = {c} (measured_gap ~ c/n)");
    }
    for r in &rows {
        if r.theoretical_bound > r.measured_gap + ORACLE_TOL {
            return Err(CliError::Violation(format!(
                "n = {}: predicted bound {} exceeds measured gap {}",
                r.n, r.theoretical_bound, r.measured_gap
            )));
        }
    }
    Ok(())
}
