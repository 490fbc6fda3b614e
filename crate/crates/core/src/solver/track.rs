//! Predictor-corrector continuation of `F(x, y) = 0` from the seed to `b`.

use num_rational::BigRational;

use super::{CurveSample, Instance, SeedResult, SolutionCurve, SolverStatus};
use crate::error::{Error, Result};
use crate::poly::CalabiParams;

const MAX_NEWTON: usize = 60;
const MAX_HALVINGS: i32 = 20;
/// Newton stops once `|dy| <= STEP_TOL * max(|y|, h)`.
const STEP_TOL: f64 = 1e-15;

enum Correction {
    Converged(f64),
    Fold,
    Failed,
}

/// Damped Newton on `y -> F(x, y)` with `F_y > 0` enforced at every iterate.
fn correct(inst: &Instance, x: f64, y0: f64, h: f64, tol: f64) -> Correction {
    let f = &inst.f_float;
    let mut y = y0;
    let (mut v, _, mut fy) = f.eval_grad(x, y);
    for _ in 0..MAX_NEWTON {
        if fy <= 0.0 || !fy.is_finite() {
            return Correction::Fold;
        }
        let dy = -v / fy;
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let yt = y + lambda * dy;
            let (vt, _, fyt) = f.eval_grad(x, yt);
            if vt.abs() < v.abs() || vt == 0.0 || (lambda * dy).abs() <= STEP_TOL * y.abs().max(h) {
                y = yt;
                v = vt;
                fy = fyt;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
        if (lambda * dy).abs() <= STEP_TOL * y.abs().max(h) || v == 0.0 {
            // one polish step
            if fy > 0.0 {
                let yt = y - v / fy;
                let (vt, _, fyt) = f.eval_grad(x, yt);
                if vt.abs() <= v.abs() {
                    y = yt;
                    v = vt;
                    fy = fyt;
                }
            }
            break;
        }
    }
    if fy <= 0.0 {
        return Correction::Fold;
    }
    if v.abs() <= tol * (1.0 + f.abs_scale(x, y)) {
        Correction::Converged(y)
    } else {
        Correction::Failed
    }
}

fn sample(inst: &Instance, x: f64, y: f64) -> (CurveSample, f64) {
    let (v, fx, fy) = inst.f_float.eval_grad(x, y);
    let yprime = -fx / fy;
    (
        CurveSample {
            x,
            y,
            yprime,
            residual: v.abs(),
            admissible: inst.admissible(x, y, yprime),
        },
        fy,
    )
}

/// Tracks the branch through `(seed.epsilon, seed.start_value)` up to `b`.
///
/// Stops at the first fold, corrector failure or inadmissible sample; the
/// status records which.
pub fn continue_curve(
    params: &CalabiParams,
    mu: &BigRational,
    seed: &SeedResult,
    step: f64,
    tol: f64,
) -> Result<SolutionCurve> {
    let inst = Instance::new(params, mu)?;
    let b = inst.b;
    let eps = seed.epsilon;
    if !(eps > 0.0 && eps < b) {
        return Err(Error::InvalidArgument(format!(
            "epsilon = {eps} must lie in (0, b)"
        )));
    }
    if !(step > 0.0 && step <= (b - eps) / 10.0) {
        return Err(Error::InvalidArgument(format!(
            "step = {step} must lie in (0, (b - epsilon) / 10]"
        )));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "tol = {tol} must be positive"
        )));
    }

    let mut samples = Vec::new();
    let finish = |samples: Vec<CurveSample>, status: SolverStatus| {
        let last = samples.last().map_or(0.0, |s: &CurveSample| s.y);
        SolutionCurve {
            terminal_residual: (last - inst.q).abs(),
            samples,
            status,
        }
    };

    let mut x = eps;
    let mut y = match correct(&inst, x, seed.start_value, step, tol) {
        Correction::Converged(y) => y,
        Correction::Fold => return Ok(finish(samples, SolverStatus::FoldDetected)),
        Correction::Failed => return Ok(finish(samples, SolverStatus::NewtonDiverged)),
    };
    let (first, fy) = sample(&inst, x, y);
    samples.push(first);
    if fy <= 0.0 {
        return Ok(finish(samples, SolverStatus::FoldDetected));
    }
    if !first.admissible {
        return Ok(finish(samples, SolverStatus::AdmissibilityLost));
    }

    let min_step = step * 2f64.powi(-MAX_HALVINGS);
    let mut h = step;
    let mut yprime = first.yprime;
    let mut fold_seen = false;
    while x < b {
        let mut xn = x + h;
        if xn >= b || b - xn <= 1e-12 * b {
            xn = b;
        }
        let dx = xn - x;
        let yp = y + yprime * dx;
        let outcome = correct(&inst, xn, yp, dx, tol);
        let accepted = match outcome {
            Correction::Converged(yc) if (yc - yp).abs() <= 0.5 * dx * (1.0 + yprime.abs()) => {
                Some(yc)
            }
            Correction::Fold => {
                fold_seen = true;
                None
            }
            _ => None,
        };
        let Some(yc) = accepted else {
            h *= 0.5;
            if h < min_step {
                let status = if fold_seen {
                    SolverStatus::FoldDetected
                } else {
                    SolverStatus::NewtonDiverged
                };
                return Ok(finish(samples, status));
            }
            continue;
        };
        x = xn;
        y = yc;
        let (s, fy) = sample(&inst, x, y);
        samples.push(s);
        if fy <= 0.0 {
            return Ok(finish(samples, SolverStatus::FoldDetected));
        }
        if !s.admissible {
            return Ok(finish(samples, SolverStatus::AdmissibilityLost));
        }
        yprime = s.yprime;
        h = (2.0 * h).min(step);
    }
    let status = if inst.terminal_ok(y) {
        SolverStatus::Solved
    } else {
        SolverStatus::BoundaryMismatch
    };
    Ok(finish(samples, status))
}
