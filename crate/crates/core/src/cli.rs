//! Command-line front end. Exit status: 0 pass, 1 verification failure,
//! 2 configuration or construction error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::config::{load_rule, FlowDoc};
use crate::error::{Error, Result};
use crate::flows::{exp_mu_terms, FlowFamily, TimeGrid, DEFAULT_EXP_TOL};
use crate::mulrules::{analyze, AlgebraReport, AnalyzeOptions, RuleKind};
use crate::tensor::CubicMatrix;
use crate::verify::{
    check_kce, check_pde, ode_oracle, standard_grid, standard_pde_samples, Triple, DEFAULT_H,
    DEFAULT_KCE_TOL, DEFAULT_PDE_TOL,
};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

/// Largest entrywise gap accepted by `exp --oracle`.
pub const ORACLE_TOL: f64 = 1e-8;

#[derive(Debug, Parser)]
#[command(name = "cubicflow", version, about = "Algebras of cubic matrices and their flows")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Analyze a multiplication rule.
    Algebra {
        #[command(subcommand)]
        action: AlgebraCmd,
    },
    /// Verify or evolve a flow.
    Flow {
        #[command(subcommand)]
        action: FlowCmd,
    },
    /// Evaluate exp_mu(tQ) for an `a3` flow document.
    Exp(ExpArgs),
    /// Finite-difference check of the forward and backward equations.
    Pde {
        #[command(subcommand)]
        action: PdeCmd,
    },
}

#[derive(Debug, Subcommand)]
enum AlgebraCmd {
    Check(AlgebraArgs),
}

#[derive(Debug, Subcommand)]
enum FlowCmd {
    Verify(VerifyArgs),
    Evolve(EvolveArgs),
}

#[derive(Debug, Subcommand)]
enum PdeCmd {
    Check(PdeArgs),
}

#[derive(Debug, Args)]
struct AlgebraArgs {
    #[arg(long)]
    config: PathBuf,
    /// Tolerance of the exhaustive structure-constant checks.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// JSON report path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value_t = DEFAULT_KCE_TOL)]
    tol: f64,
    /// `standard` or `s,tau,t;s,tau,t;...`
    #[arg(long, default_value = "standard")]
    grid: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EvolveArgs {
    #[arg(long)]
    config: PathBuf,
    /// Left time `s` of every emitted `M[s,t]`.
    #[arg(long, default_value_t = 0.0)]
    s: f64,
    /// `start:end:step`; defaults to the document's `time_grid`.
    #[arg(long)]
    grid: Option<String>,
    /// CSV path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ExpArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    /// Series truncation tolerance.
    #[arg(long, default_value_t = DEFAULT_EXP_TOL)]
    tol: f64,
    /// Cross-check against a Runge-Kutta solve of dY/dt = Q * Y.
    #[arg(long)]
    oracle: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PdeArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value_t = DEFAULT_H)]
    h: f64,
    #[arg(long, default_value_t = DEFAULT_PDE_TOL)]
    tol: f64,
    /// `standard` or `s,tau,t;...`
    #[arg(long, default_value = "standard")]
    grid: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parse `args` (program name first) and run; returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_PASS };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    let result = match cli.command {
        Command::Algebra { action: AlgebraCmd::Check(a) } => algebra_check(&a, out),
        Command::Flow { action: FlowCmd::Verify(a) } => flow_verify(&a, out),
        Command::Flow { action: FlowCmd::Evolve(a) } => flow_evolve(&a, out),
        Command::Exp(a) => exp(&a, out),
        Command::Pde { action: PdeCmd::Check(a) } => pde_check(&a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_CONFIG
        }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::Config(format!("{}: {e}", path.display()))
}

fn write_json<T: Serialize>(path: &Option<PathBuf>, value: &T) -> Result<()> {
    if let Some(p) = path {
        let text = serde_json::to_string_pretty(value).map_err(|e| Error::Config(e.to_string()))?;
        fs::write(p, text + "\n").map_err(|e| io_err(p, e))?;
    }
    Ok(())
}

fn load_flow(path: &Path) -> Result<(FlowDoc, FlowFamily)> {
    let doc = FlowDoc::load(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    let flow = doc.build(base)?;
    Ok((doc, flow))
}

fn check_tol(tol: f64) -> Result<()> {
    if tol.is_nan() || tol < 0.0 {
        return Err(Error::Config(format!("tolerance must be nonnegative, got {tol}")));
    }
    Ok(())
}

/// `standard` (per the flow's time type) or `s,tau,t;s,tau,t;...`.
pub fn parse_triples(spec: &str, standard: Vec<Triple>) -> Result<Vec<Triple>> {
    if spec.trim() == "standard" {
        return Ok(standard);
    }
    spec.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|part| {
            let v = part
                .split(',')
                .map(|x| x.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| Error::Grid(format!("bad triple `{part}`")))?;
            match v[..] {
                [s, tau, t] => Ok((s, tau, t)),
                _ => Err(Error::Grid(format!("triple `{part}` needs three values"))),
            }
        })
        .collect()
}

/// `start:end:step`.
pub fn parse_range(spec: &str) -> Result<TimeGrid> {
    let v = spec
        .split(':')
        .map(|x| x.trim().parse::<f64>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|_| Error::Grid(format!("bad range `{spec}`")))?;
    match v[..] {
        [start, end, step] => TimeGrid::new(start, end, step),
        _ => Err(Error::Grid(format!("range `{spec}` must be start:end:step"))),
    }
}

#[derive(Serialize)]
struct AlgebraOutput {
    #[serde(flatten)]
    report: AlgebraReport,
    /// Only for Maksimov-type rules.
    uniformly_distributed: Option<bool>,
}

fn algebra_check(a: &AlgebraArgs, out: &mut dyn Write) -> Result<i32> {
    check_tol(a.tol)?;
    let rule = load_rule(&a.config)?;
    let opts = AnalyzeOptions { tol: a.tol, ..AnalyzeOptions::default() };
    let report = analyze(&rule, &opts)?;
    let uniform = match rule.kind() {
        RuleKind::Maksimov(op) => Some(op.is_uniformly_distributed()),
        RuleKind::A0 => Some(true),
        _ => None,
    };
    let mark = |b: bool| if b { "yes" } else { "no" };
    let w = |e: std::io::Error| Error::Config(e.to_string());
    writeln!(out, "rule: {} (m = {})", report.kind, report.dim).map_err(w)?;
    match report.associativity_witness {
        None => writeln!(out, "associative: yes"),
        Some([p, q, r]) => writeln!(out, "associative: no (E_{p}, E_{q}, E_{r})"),
    }
    .map_err(w)?;
    match report.commutativity_witness {
        None => writeln!(out, "commutative: yes"),
        Some([p, q]) => writeln!(out, "commutative: no (E_{p}, E_{q})"),
    }
    .map_err(w)?;
    writeln!(out, "unital: {}", mark(report.unital)).map_err(w)?;
    writeln!(out, "power-associative (sampled): {}", mark(report.power_assoc_sampled.passed())).map_err(w)?;
    writeln!(out, "idempotents found: {}", report.idempotents.len()).map_err(w)?;
    writeln!(out, "norm constant: {}", report.norm_constant).map_err(w)?;
    if let Some(u) = uniform {
        writeln!(out, "uniformly distributed: {}", mark(u)).map_err(w)?;
    }
    write_json(&a.out, &AlgebraOutput { report, uniformly_distributed: uniform })?;
    Ok(EXIT_PASS)
}

fn flow_verify(a: &VerifyArgs, out: &mut dyn Write) -> Result<i32> {
    check_tol(a.tol)?;
    let (_, flow) = load_flow(&a.config)?;
    let grid = parse_triples(&a.grid, standard_grid(flow.is_discrete()))?;
    let report = check_kce(&flow, &grid, a.tol)?;
    let w = |e: std::io::Error| Error::Config(e.to_string());
    writeln!(out, "flow: {} (rule {}, m = {})", report.label, flow.rule().kind_name(), flow.dim()).map_err(w)?;
    for ((s, tau, t), r) in report.grid.iter().zip(&report.residuals) {
        writeln!(out, "  ({s}, {tau}, {t}): {r:.3e}").map_err(w)?;
    }
    let verdict = if report.pass { "PASS" } else { "FAIL" };
    writeln!(out, "max residual {:.3e} (tol {:e}): {verdict}", report.max_residual, a.tol).map_err(w)?;
    write_json(&a.out, &report)?;
    Ok(if report.pass { EXIT_PASS } else { EXIT_FAIL })
}

/// CSV rows `t,i,j,k,value` of `M[s,t]` for each grid `t > s`, values with
/// 17 significant digits.
pub fn evolve_csv(flow: &FlowFamily, s: f64, grid: &TimeGrid) -> Result<String> {
    let mut csv = String::from("t,i,j,k,value\n");
    for t in grid.points().into_iter().filter(|&t| t > s) {
        let m = flow.eval(s, t)?;
        for (idx, v) in m.iter_indexed() {
            let (i, j, k) = idx.decompose();
            csv.push_str(&format!("{t:.16e},{i},{j},{k},{v:.16e}\n"));
        }
    }
    Ok(csv)
}

fn flow_evolve(a: &EvolveArgs, out: &mut dyn Write) -> Result<i32> {
    let (doc, flow) = load_flow(&a.config)?;
    let grid = match &a.grid {
        Some(spec) => parse_range(spec)?,
        None => doc.time_grid.unwrap_or_default(),
    };
    grid.validate()?;
    let csv = evolve_csv(&flow, a.s, &grid)?;
    match &a.out {
        Some(p) => fs::write(p, csv).map_err(|e| io_err(p, e))?,
        None => out.write_all(csv.as_bytes()).map_err(|e| Error::Config(e.to_string()))?,
    }
    Ok(EXIT_PASS)
}

#[derive(Serialize)]
struct ExpOutput {
    t: f64,
    tol: f64,
    terms: usize,
    matrix: CubicMatrix,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<OracleReport>,
}

#[derive(Serialize)]
struct OracleReport {
    steps: usize,
    max_entry_gap: f64,
    tolerance: f64,
    pass: bool,
}

fn exp(a: &ExpArgs, out: &mut dyn Write) -> Result<i32> {
    let (doc, flow) = load_flow(&a.config)?;
    if doc.family != "a3" {
        return Err(Error::Config(format!("exp needs an a3 flow document, got `{}`", doc.family)));
    }
    let q = doc.q.as_ref().expect("a3 documents carry Q").build(flow.dim())?;
    let (matrix, terms) = exp_mu_terms(flow.rule(), &q, a.t, a.tol)?;
    let w = |e: std::io::Error| Error::Config(e.to_string());
    writeln!(out, "exp_mu({} Q) with {terms} series terms", a.t).map_err(w)?;
    writeln!(out, "{matrix}").map_err(w)?;
    let oracle = if a.oracle {
        let steps = 1000usize.max((1000.0 * a.t.abs()).ceil() as usize);
        let y = ode_oracle(flow.rule(), &q, a.t, steps)?;
        let gap = y.sub(&matrix)?.max_abs();
        let pass = gap <= ORACLE_TOL;
        writeln!(
            out,
            "RK4 oracle ({steps} steps): max entry gap {gap:.3e} (tol {ORACLE_TOL:e}): {}",
            if pass { "PASS" } else { "FAIL" }
        )
        .map_err(w)?;
        Some(OracleReport { steps, max_entry_gap: gap, tolerance: ORACLE_TOL, pass })
    } else {
        None
    };
    let code = match &oracle {
        Some(o) if !o.pass => EXIT_FAIL,
        _ => EXIT_PASS,
    };
    write_json(&a.out, &ExpOutput { t: a.t, tol: a.tol, terms, matrix, oracle })?;
    Ok(code)
}

fn pde_check(a: &PdeArgs, out: &mut dyn Write) -> Result<i32> {
    check_tol(a.tol)?;
    let (_, flow) = load_flow(&a.config)?;
    let samples = parse_triples(&a.grid, standard_pde_samples())?;
    let report = check_pde(&flow, &samples, a.h, a.tol)?;
    let w = |e: std::io::Error| Error::Config(e.to_string());
    writeln!(out, "flow: {} (h = {:e})", report.label, a.h).map_err(w)?;
    for (i, (s, tau, t)) in report.samples.iter().enumerate() {
        writeln!(out, "  ({s}, {tau}, {t}): forward {:.3e}, backward {:.3e}", report.forward[i], report.backward[i])
            .map_err(w)?;
    }
    let verdict = if report.pass { "PASS" } else { "FAIL" };
    writeln!(
        out,
        "max forward {:.3e}, max backward {:.3e} (tol {:e}): {verdict}",
        report.max_forward, report.max_backward, a.tol
    )
    .map_err(w)?;
    write_json(&a.out, &report)?;
    Ok(if report.pass { EXIT_PASS } else { EXIT_FAIL })
}
