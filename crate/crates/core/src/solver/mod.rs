//! Solution curves of `F(x, y(x)) = 0`, `y(0) = 0`, `y(b) = q`.
//!
//! The curve starts at the singular point `x = 0`, where the slope is fixed
//! by the zero-section eigenvalues, and is followed to `x = b` by
//! predictor-corrector continuation. An explicit RK4 integration of the
//! first-order ODE serves as an independent check, and [`verify_solution`]
//! audits any curve from scratch.

mod audit;
mod oracle;
mod seed;
mod track;

use std::io::Write;

use num_rational::BigRational;
use serde::{Serialize, Serializer};

use crate::criteria::{classify, CriteriaReport, Verdict};
use crate::error::{Error, Result};
use crate::format::sig17;
use crate::poly::{build_f, parse_rational, to_f64, CalabiParams, FloatPoly};
use crate::symmetric::{elementary_symmetric, sigma_at, sigmas_in_cone};

pub use audit::{sup_distance, verify_solution, AuditReport};
pub use oracle::rk4_oracle;
pub use seed::{seed, seed_chain, seed_slope, slope_polynomial};
pub use track::continue_curve;

/// Terminal tolerance: `|y(b) - q| <= max(1, |q|) * TERMINAL_TOL`.
pub const TERMINAL_TOL: f64 = 1e-6;
/// Default corrector tolerance.
pub const DEFAULT_TOL: f64 = 1e-12;
/// Default start abscissa as a fraction of `b`.
pub const DEFAULT_EPSILON_FRACTION: &str = "1/1000";
/// Default number of RK4 steps.
pub const DEFAULT_RK4_STEPS: usize = 4000;

fn ser17<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&sig17(*v))
}

fn ser17_opt<S: Serializer>(v: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.serialize_str(&sig17(*v)),
        None => s.serialize_none(),
    }
}

fn ser17_vec<S: Serializer>(v: &[f64], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        seq.serialize_element(&sig17(*x))?;
    }
    seq.end()
}

/// Starting data at the zero section.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeedResult {
    /// Real roots of `P(t) = (sigma_k - mu sigma_l)(t ×(m+1), p ×n)`.
    #[serde(serialize_with = "ser17_vec")]
    pub slope_candidates: Vec<f64>,
    #[serde(serialize_with = "ser17")]
    pub chosen_slope: f64,
    /// `y_i'(0)` for `i = m0, m0-1, ..., 0`.
    #[serde(serialize_with = "ser17_vec")]
    pub chain_slopes: Vec<f64>,
    #[serde(serialize_with = "ser17")]
    pub epsilon: f64,
    /// `y(epsilon)` on the selected branch.
    #[serde(serialize_with = "ser17")]
    pub start_value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverStatus {
    Solved,
    FoldDetected,
    AdmissibilityLost,
    NewtonDiverged,
    BoundaryMismatch,
    SeedNotFound,
    SeedMismatch,
}

impl SolverStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolverStatus::Solved => "solved",
            SolverStatus::FoldDetected => "fold_detected",
            SolverStatus::AdmissibilityLost => "admissibility_lost",
            SolverStatus::NewtonDiverged => "newton_diverged",
            SolverStatus::BoundaryMismatch => "boundary_mismatch",
            SolverStatus::SeedNotFound => "seed_not_found",
            SolverStatus::SeedMismatch => "seed_mismatch",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveSample {
    pub x: f64,
    pub y: f64,
    pub yprime: f64,
    pub residual: f64,
    pub admissible: bool,
}

/// A sampled branch of `F(x, y) = 0` on `[epsilon, b]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolutionCurve {
    pub samples: Vec<CurveSample>,
    pub terminal_residual: f64,
    pub status: SolverStatus,
}

impl SolutionCurve {
    pub fn last(&self) -> Option<&CurveSample> {
        self.samples.last()
    }

    /// CSV with header `x,y,yprime,residual,admissible`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "x,y,yprime,residual,admissible")?;
        for s in &self.samples {
            writeln!(
                out,
                "{},{},{},{},{}",
                sig17(s.x),
                sig17(s.y),
                sig17(s.yprime),
                sig17(s.residual),
                s.admissible
            )?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }
}

/// Everything derived once per instance and shared by the solver stages.
#[derive(Debug, Clone)]
pub(crate) struct Instance {
    pub params: CalabiParams,
    pub mu_f: f64,
    pub p: f64,
    pub q: f64,
    pub b: f64,
    pub f_float: FloatPoly,
}

impl Instance {
    pub fn new(params: &CalabiParams, mu: &BigRational) -> Result<Self> {
        let f = build_f(params, mu)?;
        Ok(Self {
            params: params.clone(),
            mu_f: to_f64(mu),
            p: params.p_f64(),
            q: params.q_f64(),
            b: params.b_f64(),
            f_float: f.to_float(),
        })
    }

    /// `check-lambda_{m,n}(x, y)` for `x > 0`.
    pub fn checked_lambda(&self, x: f64, y: f64) -> Vec<f64> {
        let (m, n) = (self.params.m, self.params.n);
        let a = y / x;
        let c = (self.p + y) / (1.0 + x);
        std::iter::repeat_n(a, m)
            .chain(std::iter::repeat_n(c, n))
            .collect()
    }

    /// Whether `lambda_{m,n}(x, y, y')` lies in `Gamma_k`.
    pub fn admissible(&self, x: f64, y: f64, yprime: f64) -> bool {
        let mut lam = self.checked_lambda(x, y);
        lam.push(yprime);
        sigmas_in_cone(&elementary_symmetric(&lam), self.params.k)
    }

    /// Slope of the explicit ODE, `-(sigma_k - mu sigma_l)/(sigma_{k-1} - mu sigma_{l-1})`
    /// on `check-lambda`, with the denominator.
    pub fn explicit_slope(&self, x: f64, y: f64) -> (f64, f64) {
        let sig = elementary_symmetric(&self.checked_lambda(x, y));
        let (k, l) = (self.params.k as i64, self.params.l as i64);
        let num = sigma_at(&sig, k) - self.mu_f * sigma_at(&sig, l);
        let den = sigma_at(&sig, k - 1) - self.mu_f * sigma_at(&sig, l - 1);
        (-num / den, den)
    }

    pub fn terminal_ok(&self, y_end: f64) -> bool {
        (y_end - self.q).abs() <= self.q.abs().max(1.0) * TERMINAL_TOL
    }
}

/// Knobs for [`solve_instance`].
#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Continuation step; `None` means `(b - epsilon) / 100`.
    pub step: Option<f64>,
    pub tol: f64,
    /// Start abscissa; `None` means `b / 1000`.
    pub epsilon: Option<BigRational>,
    pub rk4_steps: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            step: None,
            tol: DEFAULT_TOL,
            epsilon: None,
            rk4_steps: DEFAULT_RK4_STEPS,
        }
    }
}

/// Outcome of the full pipeline for one instance.
#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub criteria: CriteriaReport,
    pub seed: Option<SeedResult>,
    pub seed_error: Option<String>,
    #[serde(skip)]
    pub curve: Option<SolutionCurve>,
    #[serde(skip)]
    pub oracle: Option<SolutionCurve>,
    pub oracle_error: Option<String>,
    pub audit: Option<AuditReport>,
    /// `None` only when the class is degenerate.
    pub status: Option<SolverStatus>,
    /// Sup-norm distance between the tracked and RK4 curves.
    #[serde(serialize_with = "ser17_opt")]
    pub oracle_distance: Option<f64>,
}

impl SolveReport {
    pub fn solved(&self) -> bool {
        self.status == Some(SolverStatus::Solved)
    }

    pub fn terminal_residual(&self) -> Option<f64> {
        self.audit.as_ref().map(|a| a.terminal_residual)
    }

    /// Exit code of the `solve` command: 0 when criteria and solver agree on
    /// success, 2 when they agree on failure, 3 on disagreement, 4 when the
    /// class is degenerate.
    pub fn exit_code(&self) -> i32 {
        if self.criteria.verdict == Verdict::Degenerate {
            return 4;
        }
        match (self.criteria.verdict.is_pass(), self.solved()) {
            (true, true) => 0,
            (false, false) => 2,
            _ => 3,
        }
    }
}

/// Default `epsilon = b / 1000`.
pub fn default_epsilon(params: &CalabiParams) -> BigRational {
    &params.b * parse_rational(DEFAULT_EPSILON_FRACTION).expect("constant")
}

/// Criteria, seeding, continuation, RK4 cross-check and audit.
pub fn solve_instance(params: &CalabiParams, opts: &SolveOptions) -> SolveReport {
    let criteria = classify(params);
    let mut report = SolveReport {
        criteria,
        seed: None,
        seed_error: None,
        curve: None,
        oracle: None,
        oracle_error: None,
        audit: None,
        status: None,
        oracle_distance: None,
    };
    let Some(mu) = report
        .criteria
        .mu_exact
        .as_deref()
        .map(|s| parse_rational(s).expect("exact mu round-trips"))
    else {
        return report;
    };
    let epsilon = opts
        .epsilon
        .clone()
        .unwrap_or_else(|| default_epsilon(params));
    let seed = match seed(params, &mu, &epsilon) {
        Ok(seed) => seed,
        Err(err) => {
            report.status = Some(match err {
                Error::SeedMismatch { .. } => SolverStatus::SeedMismatch,
                _ => SolverStatus::SeedNotFound,
            });
            report.seed_error = Some(err.to_string());
            return report;
        }
    };
    let b = params.b_f64();
    let step = opts.step.unwrap_or((b - seed.epsilon) / 100.0);
    let curve = match continue_curve(params, &mu, &seed, step, opts.tol) {
        Ok(curve) => curve,
        Err(err) => {
            report.seed = Some(seed);
            report.seed_error = Some(err.to_string());
            report.status = Some(SolverStatus::NewtonDiverged);
            return report;
        }
    };
    let audit = verify_solution(&curve, params, &mu);
    report.status = Some(if audit.certificate {
        SolverStatus::Solved
    } else {
        audit.status
    });
    match rk4_oracle(params, &mu, &seed, opts.rk4_steps) {
        Ok(oracle) => {
            let reached = |c: &SolutionCurve| c.last().is_some_and(|s| s.x == b);
            if reached(&curve) && reached(&oracle) {
                report.oracle_distance = Some(sup_distance(&curve, &oracle));
            }
            report.oracle = Some(oracle);
        }
        Err(err) => report.oracle_error = Some(err.to_string()),
    }
    report.audit = Some(audit);
    report.curve = Some(curve);
    report.seed = Some(seed);
    report
}
