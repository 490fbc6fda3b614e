//! Independent audit of a sampled curve.

use num_rational::BigRational;
use serde::Serialize;

use super::{ser17, Instance, SolutionCurve, SolverStatus};
use crate::poly::CalabiParams;

/// Largest admissible Newton distance `|F| / F_y` at an audited sample.
pub const AUDIT_DISTANCE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    #[serde(serialize_with = "ser17")]
    pub max_residual: f64,
    /// `max |F| / |F_y|`, the first-order distance to the zero set.
    #[serde(serialize_with = "ser17")]
    pub max_distance: f64,
    pub first_inadmissible: Option<usize>,
    pub first_fold: Option<usize>,
    #[serde(serialize_with = "ser17")]
    pub terminal_residual: f64,
    pub reached_end: bool,
    pub certificate: bool,
    pub status: SolverStatus,
}

/// Recomputes residuals, `F_y` and cone membership at every sample from
/// scratch. The certificate holds iff the curve reaches `b`, every sample is
/// admissible and stable, every sample lies on the zero set and `y(b)`
/// matches `q`.
pub fn verify_solution(
    curve: &SolutionCurve,
    params: &CalabiParams,
    mu: &BigRational,
) -> AuditReport {
    let inst = Instance::new(params, mu).expect("validated parameters");
    let mut max_residual = 0.0f64;
    let mut max_distance = 0.0f64;
    let mut first_inadmissible = None;
    let mut first_fold = None;
    for (i, s) in curve.samples.iter().enumerate() {
        let (v, fx, fy) = inst.f_float.eval_grad(s.x, s.y);
        max_residual = max_residual.max(v.abs());
        if fy <= 0.0 || !fy.is_finite() {
            first_fold.get_or_insert(i);
            max_distance = f64::INFINITY;
            continue;
        }
        max_distance = max_distance.max(v.abs() / fy);
        let fresh = inst.admissible(s.x, s.y, -fx / fy);
        if !(s.admissible && fresh) {
            first_inadmissible.get_or_insert(i);
        }
    }
    let last = curve.samples.last();
    let reached_end = last.is_some_and(|s| s.x == inst.b);
    let terminal_residual = last.map_or(f64::INFINITY, |s| (s.y - inst.q).abs());
    let status = if curve.samples.is_empty() {
        curve.status
    } else if first_inadmissible.is_some() {
        SolverStatus::AdmissibilityLost
    } else if first_fold.is_some() {
        SolverStatus::FoldDetected
    } else if !matches!(
        curve.status,
        SolverStatus::Solved | SolverStatus::BoundaryMismatch
    ) {
        curve.status
    } else if !reached_end {
        SolverStatus::NewtonDiverged
    } else if !inst.terminal_ok(last.map_or(f64::NAN, |s| s.y)) {
        SolverStatus::BoundaryMismatch
    } else if max_distance > AUDIT_DISTANCE_TOL {
        SolverStatus::NewtonDiverged
    } else {
        SolverStatus::Solved
    };
    AuditReport {
        max_residual,
        max_distance,
        first_inadmissible,
        first_fold,
        terminal_residual,
        reached_end,
        certificate: status == SolverStatus::Solved,
        status,
    }
}

fn hermite(x0: f64, x1: f64, y0: f64, y1: f64, d0: f64, d1: f64, x: f64) -> f64 {
    let h = x1 - x0;
    let t = (x - x0) / h;
    let (t2, t3) = (t * t, t * t * t);
    (2.0 * t3 - 3.0 * t2 + 1.0) * y0
        + (t3 - 2.0 * t2 + t) * h * d0
        + (-2.0 * t3 + 3.0 * t2) * y1
        + (t3 - t2) * h * d1
}

/// Sup-norm distance between two curves, measured at the samples of
/// `coarse` with `fine` interpolated by cubic Hermite on `(y, y')`.
/// Samples of `coarse` outside the range of `fine` are skipped.
pub fn sup_distance(coarse: &SolutionCurve, fine: &SolutionCurve) -> f64 {
    let f = &fine.samples;
    let mut worst = 0.0f64;
    if f.is_empty() {
        return f64::INFINITY;
    }
    for s in &coarse.samples {
        let j = f.partition_point(|t| t.x < s.x);
        let value = if j < f.len() && f[j].x == s.x {
            f[j].y
        } else if j == 0 || j == f.len() {
            continue;
        } else {
            let (a, b) = (&f[j - 1], &f[j]);
            hermite(a.x, b.x, a.y, b.y, a.yprime, b.yprime, s.x)
        };
        worst = worst.max((s.y - value).abs());
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{compute_mu, parse_rational};
    use crate::solver::{continue_curve, seed, CurveSample};

    fn trivial() -> (SolutionCurve, CalabiParams, BigRational) {
        let pr = CalabiParams::from_f64(1, 1, 2, 1, 1.0, 1.0, 1.0).unwrap();
        let mu = compute_mu(&pr).unwrap().mu;
        let s = seed(&pr, &mu, &parse_rational("1/1000").unwrap()).unwrap();
        let c = continue_curve(&pr, &mu, &s, 0.00999, 1e-12).unwrap();
        (c, pr, mu)
    }

    #[test]
    fn trivial_curve_is_certified() {
        let (c, pr, mu) = trivial();
        let a = verify_solution(&c, &pr, &mu);
        assert!(a.certificate, "{a:?}");
        assert_eq!(a.first_inadmissible, None);
    }

    #[test]
    fn flagged_sample_is_reported() {
        let (mut c, pr, mu) = trivial();
        c.samples[7].admissible = false;
        let a = verify_solution(&c, &pr, &mu);
        assert!(!a.certificate);
        assert_eq!(a.first_inadmissible, Some(7));
        assert_eq!(a.status, SolverStatus::AdmissibilityLost);
    }

    #[test]
    fn tampered_endpoint_is_a_mismatch() {
        let (mut c, pr, mu) = trivial();
        let last = c.samples.last_mut().unwrap();
        last.y += 1e-3;
        let a = verify_solution(&c, &pr, &mu);
        assert!(!a.certificate);
        assert_eq!(a.status, SolverStatus::BoundaryMismatch);
        assert!((a.terminal_residual - 1e-3).abs() < 1e-9);
    }

    #[test]
    fn hermite_is_exact_on_cubics() {
        let f = |x: f64| x * x * x - 2.0 * x;
        let df = |x: f64| 3.0 * x * x - 2.0;
        let v = hermite(0.5, 1.5, f(0.5), f(1.5), df(0.5), df(1.5), 0.9);
        assert!((v - f(0.9)).abs() < 1e-14);
    }

    #[test]
    fn sup_distance_of_identical_curves_is_zero() {
        let pts: Vec<CurveSample> = (0..10)
            .map(|i| {
                let x = 0.1 * (i + 1) as f64;
                CurveSample {
                    x,
                    y: x * x,
                    yprime: 2.0 * x,
                    residual: 0.0,
                    admissible: true,
                }
            })
            .collect();
        let c = SolutionCurve {
            samples: pts,
            terminal_residual: 0.0,
            status: SolverStatus::Solved,
        };
        assert!(sup_distance(&c, &c) < 1e-15);
    }
}
