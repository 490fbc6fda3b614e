//! Built-in invariant suites behind the `selftest` command.
//!
//! Deterministic (fixed RNG seed) and small enough to finish in seconds.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::criteria::{boundary_identity_holds, classify};
use crate::poly::{dy_identity_residual_exact, CalabiParams};
use crate::solver::{solve_instance, SolveOptions};
use crate::symmetric::{in_admissible_cone, newton_defect, uniform_q_positive, EigenVector};

#[derive(Debug, Clone, Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

const SEED: u64 = 0x5eed;

fn small_rational(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> BigRational {
    let den = rng.gen_range(1..=6i64);
    BigRational::new(
        BigInt::from(rng.gen_range(lo * den..=hi * den)),
        BigInt::from(den),
    )
}

fn cone_sampling() -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut failures = 0;
    let mut in_cone = 0;
    let samples = 20_000;
    for _ in 0..samples {
        let len = rng.gen_range(2..=6);
        let values: Vec<f64> = (0..len).map(|_| rng.gen_range(-20..=40) as f64).collect();
        let lam = EigenVector::new(values).expect("non-empty");
        for r in 1..len {
            if newton_defect(&lam, r).expect("valid index") < 0.0 {
                failures += 1;
            }
        }
        for k in 1..=len {
            if in_admissible_cone(&lam, k).expect("valid index") {
                in_cone += 1;
                if !uniform_q_positive(&lam, len - k).expect("valid index") {
                    failures += 1;
                }
            }
        }
    }
    SuiteResult {
        name: "cone_sampling",
        pass: failures == 0,
        detail: format!(
            "{samples} vectors, {in_cone} cone memberships, {failures} counterexamples"
        ),
    }
}

fn polynomial_identities() -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let mut failures = 0;
    let mut checks = 0;
    for m in 0..=2 {
        for n in 1..=2 {
            for k in 1..=m + n + 1 {
                let p = small_rational(&mut rng, -2, 2);
                let x = small_rational(&mut rng, 1, 3);
                let y = small_rational(&mut rng, -2, 2);
                let r = dy_identity_residual_exact(m, n, k, &p, &x, &y).expect("valid input");
                checks += 1;
                if !r.is_zero() {
                    failures += 1;
                }
            }
        }
    }
    for _ in 0..40 {
        let m = rng.gen_range(0..=2);
        let n = rng.gen_range(1..=2);
        let k = rng.gen_range(1..=m + n + 1);
        let l = rng.gen_range(0..k);
        let params = CalabiParams::new(
            m,
            n,
            k,
            l,
            small_rational(&mut rng, -2, 3),
            small_rational(&mut rng, -2, 3),
            small_rational(&mut rng, 1, 3),
        )
        .expect("valid shape");
        if classify(&params).mu.is_some() {
            checks += 1;
            if !boundary_identity_holds(&params) {
                failures += 1;
            }
        }
    }
    SuiteResult {
        name: "polynomial_identities",
        pass: failures == 0,
        detail: format!("{checks} exact identities, {failures} failures"),
    }
}

fn oracle_agreement() -> SuiteResult {
    let cases = [
        (1, 1, 2, 1, 1.0, 1.0, 1.0),
        (1, 1, 2, 1, 0.5, 0.5, 1.0),
        (1, 1, 3, 0, 1.5, 0.6, 1.0),
        (0, 2, 2, 0, 1.0, 0.5, 1.0),
        (2, 1, 2, 1, 1.2, 0.7, 1.0),
    ];
    let mut worst = 0.0f64;
    let mut failures = 0;
    for (m, n, k, l, p, q, b) in cases {
        let params = CalabiParams::from_f64(m, n, k, l, p, q, b).expect("valid shape");
        let report = solve_instance(&params, &SolveOptions::default());
        match report.oracle_distance {
            Some(d) if report.solved() && d <= 1e-5 => worst = worst.max(d),
            _ => failures += 1,
        }
    }
    SuiteResult {
        name: "oracle_agreement",
        pass: failures == 0,
        detail: format!(
            "{} instances, worst tracker/RK4 distance {worst:.3e}, {failures} failures",
            cases.len()
        ),
    }
}

/// Runs every suite.
pub fn run_selftest() -> Vec<SuiteResult> {
    vec![cone_sampling(), polynomial_identities(), oracle_agreement()]
}
