//! Explicit first-order ODE integrated by classical RK4.
//!
//! `y' = -(sigma_k - mu sigma_l)(check-lambda) / (sigma_{k-1} - mu sigma_{l-1})(check-lambda)`
//! follows from linearity of `sigma_j` in the last eigenvalue. It shares no
//! code path with the implicit tracker beyond the seed value.

use num_rational::BigRational;

use super::{CurveSample, Instance, SeedResult, SolutionCurve, SolverStatus};
use crate::error::{Error, Result};
use crate::poly::CalabiParams;

fn rhs(inst: &Instance, x: f64, y: f64) -> Result<f64> {
    let (slope, den) = inst.explicit_slope(x, y);
    if den > 0.0 && slope.is_finite() {
        Ok(slope)
    } else {
        Err(Error::OracleBreakdown { x })
    }
}

/// RK4 on the geometric grid `x_j = epsilon (b / epsilon)^(j / nsteps)`,
/// which keeps the relative step uniform near the singular end.
pub fn rk4_oracle(
    params: &CalabiParams,
    mu: &BigRational,
    seed: &SeedResult,
    nsteps: usize,
) -> Result<SolutionCurve> {
    if nsteps < 100 {
        return Err(Error::InvalidArgument(format!(
            "nsteps = {nsteps} must be at least 100"
        )));
    }
    let inst = Instance::new(params, mu)?;
    let (eps, b) = (seed.epsilon, inst.b);
    if !(eps > 0.0 && eps < b) {
        return Err(Error::InvalidArgument(format!(
            "epsilon = {eps} must lie in (0, b)"
        )));
    }
    let ratio = (b / eps).ln();
    let grid: Vec<f64> = (0..=nsteps)
        .map(|j| {
            if j == nsteps {
                b
            } else {
                eps * (ratio * j as f64 / nsteps as f64).exp()
            }
        })
        .collect();

    let record = |x: f64, y: f64, yprime: f64| CurveSample {
        x,
        y,
        yprime,
        residual: inst.f_float.eval(x, y).abs(),
        admissible: inst.admissible(x, y, yprime),
    };
    let mut y = seed.start_value;
    let mut yprime = rhs(&inst, eps, y)?;
    let mut samples = Vec::with_capacity(nsteps + 1);
    samples.push(record(eps, y, yprime));
    for w in grid.windows(2) {
        let (x, h) = (w[0], w[1] - w[0]);
        let k1 = yprime;
        let k2 = rhs(&inst, x + 0.5 * h, y + 0.5 * h * k1)?;
        let k3 = rhs(&inst, x + 0.5 * h, y + 0.5 * h * k2)?;
        let k4 = rhs(&inst, x + h, y + h * k3)?;
        y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        yprime = rhs(&inst, w[1], y)?;
        samples.push(record(w[1], y, yprime));
    }
    let status = if samples.iter().any(|s| !s.admissible) {
        SolverStatus::AdmissibilityLost
    } else if inst.terminal_ok(y) {
        SolverStatus::Solved
    } else {
        SolverStatus::BoundaryMismatch
    };
    Ok(SolutionCurve {
        terminal_residual: (y - inst.q).abs(),
        samples,
        status,
    })
}
