//! Command-line front end.
//!
//! Every flag can also be set through an environment variable named
//! `HESSIAN_<FLAG>` (for example `HESSIAN_P=1/2`); explicit flags win.
//!
//! Exit codes: 0 success, 2 expected failure (criteria fail and no
//! solution), 3 dichotomy violation, 4 degenerate class, 64 invalid input.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::criteria::{classify, Verdict};
use crate::format::sig17;
use crate::poly::{build_f, compute_mu, parse_rational, rat, to_f64, CalabiParams};
use crate::selftest::run_selftest;
use crate::solver::{default_epsilon, solve_instance, SolveOptions, SolveReport, DEFAULT_TOL};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 2;
pub const EXIT_VIOLATION: i32 = 3;
pub const EXIT_DEGENERATE: i32 = 4;
pub const EXIT_USAGE: i32 = 64;

fn rational_arg(s: &str) -> Result<BigRational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

#[derive(Debug, Parser)]
#[command(
    name = "calabi-hessian",
    version,
    about = "Complex Hessian quotient equations on Calabi-symmetric projective bundles"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print G^k, G^l, F and mu as exact term lists.
    Poly(ClassArgs),
    /// Evaluate the positivity criteria.
    Criteria(CriteriaArgs),
    /// Seed, track, cross-check and audit one instance.
    Solve(SolveArgs),
    /// Run the solve pipeline over a (p, q) grid and emit one row per cell.
    Scan(ScanArgs),
    /// Run the built-in invariant suites.
    Selftest(OutputArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ShapeArgs {
    /// Fibre dimension m.
    #[arg(long, env = "HESSIAN_M")]
    pub m: usize,
    /// Base dimension n.
    #[arg(long, env = "HESSIAN_N")]
    pub n: usize,
    #[arg(long, env = "HESSIAN_K")]
    pub k: usize,
    #[arg(long, env = "HESSIAN_L")]
    pub l: usize,
    /// Kähler class coefficient b, as an integer, fraction or decimal.
    #[arg(long, env = "HESSIAN_B", value_parser = rational_arg)]
    pub b: BigRational,
}

#[derive(Debug, Clone, Args)]
pub struct ClassArgs {
    #[command(flatten)]
    pub shape: ShapeArgs,
    #[arg(long, env = "HESSIAN_P", value_parser = rational_arg, allow_hyphen_values = true)]
    pub p: BigRational,
    #[arg(long, env = "HESSIAN_Q", value_parser = rational_arg, allow_hyphen_values = true)]
    pub q: BigRational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, env = "HESSIAN_FORMAT", value_enum, default_value = "json")]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, env = "HESSIAN_OUT")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct CriteriaArgs {
    #[command(flatten)]
    pub class: ClassArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    /// Corrector tolerance.
    #[arg(long, env = "HESSIAN_TOL", default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    /// Continuation step; defaults to (b - epsilon) / 100.
    #[arg(long, env = "HESSIAN_STEP")]
    pub step: Option<f64>,
    /// Start abscissa; defaults to b / 1000.
    #[arg(long, env = "HESSIAN_EPSILON", value_parser = rational_arg)]
    pub epsilon: Option<BigRational>,
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub class: ClassArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    pub shape: ShapeArgs,
    #[arg(long, env = "HESSIAN_P_MIN", value_parser = rational_arg, allow_hyphen_values = true)]
    pub p_min: BigRational,
    #[arg(long, env = "HESSIAN_P_MAX", value_parser = rational_arg, allow_hyphen_values = true)]
    pub p_max: BigRational,
    #[arg(long, env = "HESSIAN_Q_MIN", value_parser = rational_arg, allow_hyphen_values = true)]
    pub q_min: BigRational,
    #[arg(long, env = "HESSIAN_Q_MAX", value_parser = rational_arg, allow_hyphen_values = true)]
    pub q_max: BigRational,
    #[arg(long, env = "HESSIAN_CELLS_P", default_value_t = 20)]
    pub cells_p: usize,
    #[arg(long, env = "HESSIAN_CELLS_Q", default_value_t = 20)]
    pub cells_q: usize,
    /// Worker threads; 0 uses every core.
    #[arg(long, env = "HESSIAN_JOBS", default_value_t = 0)]
    pub jobs: usize,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Usage error carrying a diagnostic.
#[derive(Debug)]
struct Usage(String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Self {
        Usage(e.to_string())
    }
}

fn params(class: &ClassArgs) -> Result<CalabiParams, Usage> {
    let s = &class.shape;
    Ok(CalabiParams::new(
        s.m,
        s.n,
        s.k,
        s.l,
        class.p.clone(),
        class.q.clone(),
        s.b.clone(),
    )?)
}

fn solve_options(args: &SolverArgs, params: &CalabiParams) -> Result<SolveOptions, Usage> {
    if !(args.tol > 0.0 && args.tol.is_finite()) {
        return Err(Usage(format!("tol = {} must be positive", args.tol)));
    }
    let epsilon = args
        .epsilon
        .clone()
        .unwrap_or_else(|| default_epsilon(params));
    if !epsilon.is_positive() || epsilon >= params.b {
        return Err(Usage(format!("epsilon = {epsilon} must lie in (0, b)")));
    }
    if let Some(step) = args.step {
        let span = params.b_f64() - to_f64(&epsilon);
        if !(step > 0.0 && step <= span / 10.0) {
            return Err(Usage(format!(
                "step = {step} must lie in (0, (b - epsilon) / 10 = {}]",
                span / 10.0
            )));
        }
    }
    Ok(SolveOptions {
        step: args.step,
        tol: args.tol,
        epsilon: Some(epsilon),
        ..SolveOptions::default()
    })
}

fn emit(output: &OutputArgs, text: &str, stdout: &mut dyn Write) -> Result<(), Usage> {
    match &output.out {
        Some(path) => fs::write(path, text).map_err(|e| Usage(format!("{}: {e}", path.display()))),
        None => stdout.write_all(text.as_bytes()).map_err(Usage::from),
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable report");
    s.push('\n');
    s
}

fn cmd_poly(class: &ClassArgs, stdout: &mut dyn Write) -> Result<i32, Usage> {
    let params = params(class)?;
    let g_k = params.g(params.k as i64)?;
    let g_l = params.g(params.l as i64)?;
    let (mu, f) = match compute_mu(&params) {
        Ok(mu) => {
            let f = build_f(&params, &mu.mu)?;
            (Some(mu.mu), Some(f))
        }
        Err(_) => (None, None),
    };
    let report = json!({
        "g_k": g_k,
        "g_l": g_l,
        "f": f,
        "mu": mu.as_ref().map(|m| m.to_string()),
        "mu_f64": mu.as_ref().map(|m| sig17(to_f64(m))),
    });
    stdout.write_all(to_json(&report).as_bytes())?;
    Ok(if mu.is_some() {
        EXIT_OK
    } else {
        EXIT_DEGENERATE
    })
}

fn criteria_csv(verdict: Verdict, mu: Option<f64>) -> String {
    format!(
        "mu,criteria_verdict\n{},{}\n",
        mu.map(sig17).unwrap_or_default(),
        verdict.as_str()
    )
}

fn cmd_criteria(args: &CriteriaArgs, stdout: &mut dyn Write) -> Result<i32, Usage> {
    let params = params(&args.class)?;
    let report = classify(&params);
    let text = match args.output.format {
        Format::Json => to_json(&report),
        Format::Csv => criteria_csv(report.verdict, report.mu),
    };
    emit(&args.output, &text, stdout)?;
    Ok(match report.verdict {
        Verdict::Pass => EXIT_OK,
        Verdict::Degenerate => EXIT_DEGENERATE,
        _ => EXIT_FAIL,
    })
}

fn cmd_solve(
    args: &SolveArgs,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32, Usage> {
    let params = params(&args.class)?;
    let opts = solve_options(&args.solver, &params)?;
    let report = solve_instance(&params, &opts);
    let text = match args.output.format {
        Format::Json => to_json(&report),
        Format::Csv => report
            .curve
            .as_ref()
            .map(|c| c.to_csv())
            .unwrap_or_default(),
    };
    emit(&args.output, &text, stdout)?;
    let code = report.exit_code();
    if code == EXIT_VIOLATION {
        writeln!(
            stderr,
            "DICHOTOMY VIOLATION: criteria verdict {} but solver status {}",
            report.criteria.verdict.as_str(),
            report.status.map_or("absent", |s| s.as_str())
        )?;
    }
    Ok(code)
}

/// One row of a scan.
#[derive(Debug, Clone, Serialize)]
pub struct ScanRow {
    pub p: String,
    pub q: String,
    pub mu: Option<String>,
    pub criteria_verdict: &'static str,
    pub solver_status: Option<&'static str>,
    pub terminal_residual: Option<String>,
    pub exit_code: i32,
}

impl ScanRow {
    fn from_report(p: &BigRational, q: &BigRational, r: &SolveReport) -> Self {
        Self {
            p: sig17(to_f64(p)),
            q: sig17(to_f64(q)),
            mu: r.criteria.mu.map(sig17),
            criteria_verdict: r.criteria.verdict.as_str(),
            solver_status: r.status.map(|s| s.as_str()),
            terminal_residual: r.terminal_residual().map(sig17),
            exit_code: r.exit_code(),
        }
    }
}

/// `cells` evenly spaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: &BigRational, hi: &BigRational, cells: usize) -> Vec<BigRational> {
    if cells == 1 {
        return vec![lo.clone()];
    }
    let span = (hi - lo) / rat(cells as i64 - 1);
    (0..cells).map(|i| lo + &span * rat(i as i64)).collect()
}

/// Solves every cell of the grid, `p` outer and `q` inner.
pub fn scan_rows(
    shape: &ShapeArgs,
    ps: &[BigRational],
    qs: &[BigRational],
    solver: &SolverArgs,
) -> Result<Vec<ScanRow>, String> {
    let cells: Vec<(BigRational, BigRational)> = ps
        .iter()
        .flat_map(|p| qs.iter().map(move |q| (p.clone(), q.clone())))
        .collect();
    // validate the shape and solver options once
    let probe = CalabiParams::new(
        shape.m,
        shape.n,
        shape.k,
        shape.l,
        BigRational::zero(),
        BigRational::zero(),
        shape.b.clone(),
    )
    .map_err(|e| e.to_string())?;
    let opts = solve_options(solver, &probe).map_err(|u| u.0)?;
    Ok(cells
        .par_iter()
        .map(|(p, q)| {
            let params = CalabiParams::new(
                shape.m,
                shape.n,
                shape.k,
                shape.l,
                p.clone(),
                q.clone(),
                shape.b.clone(),
            )
            .expect("shape validated above");
            ScanRow::from_report(p, q, &solve_instance(&params, &opts))
        })
        .collect())
}

/// CSV with header `p,q,mu,criteria_verdict,solver_status,terminal_residual`.
pub fn scan_csv(rows: &[ScanRow]) -> String {
    let mut out = String::from("p,q,mu,criteria_verdict,solver_status,terminal_residual\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.p,
            r.q,
            r.mu.as_deref().unwrap_or(""),
            r.criteria_verdict,
            r.solver_status.unwrap_or(""),
            r.terminal_residual.as_deref().unwrap_or("")
        ));
    }
    out
}

fn cmd_scan(args: &ScanArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, Usage> {
    if args.cells_p == 0 || args.cells_q == 0 {
        return Err(Usage("cells_p and cells_q must be positive".into()));
    }
    if args.p_min > args.p_max || args.q_min > args.q_max {
        return Err(Usage("grid bounds must satisfy min <= max".into()));
    }
    let ps = linspace(&args.p_min, &args.p_max, args.cells_p);
    let qs = linspace(&args.q_min, &args.q_max, args.cells_q);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs)
        .build()?;
    let rows = pool
        .install(|| scan_rows(&args.shape, &ps, &qs, &args.solver))
        .map_err(Usage)?;
    let text = match args.output.format {
        Format::Csv => scan_csv(&rows),
        Format::Json => to_json(&rows),
    };
    emit(&args.output, &text, stdout)?;
    let violations = rows
        .iter()
        .filter(|r| r.exit_code == EXIT_VIOLATION)
        .count();
    if violations > 0 {
        writeln!(stderr, "DICHOTOMY VIOLATION in {violations} cell(s)")?;
        return Ok(EXIT_VIOLATION);
    }
    Ok(EXIT_OK)
}

fn cmd_selftest(args: &OutputArgs, stdout: &mut dyn Write) -> Result<i32, Usage> {
    let results = run_selftest();
    let text = match args.format {
        Format::Json => to_json(&results),
        Format::Csv => {
            let mut s = String::from("suite,pass,detail\n");
            for r in &results {
                s.push_str(&format!("{},{},\"{}\"\n", r.name, r.pass, r.detail));
            }
            s
        }
    };
    emit(args, &text, stdout)?;
    let all = results.iter().all(|r| r.pass);
    Ok(if all { EXIT_OK } else { EXIT_FAIL })
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = write!(stderr, "{}", err.render());
            return if err.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_OK
            };
        }
    };
    let result = match &cli.command {
        Command::Poly(a) => cmd_poly(a, stdout),
        Command::Criteria(a) => cmd_criteria(a, stdout),
        Command::Solve(a) => cmd_solve(a, stdout, stderr),
        Command::Scan(a) => cmd_scan(a, stdout, stderr),
        Command::Selftest(a) => cmd_selftest(a, stdout),
    };
    match result {
        Ok(code) => code,
        Err(Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
    }
}
