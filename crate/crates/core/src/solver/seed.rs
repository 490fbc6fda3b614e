//! Starting data at the singular point `x = 0`.
//!
//! Two independent routes to `y'(0)`: the slope polynomial on the
//! zero-section eigenvalues, and the induction chain `F_{m0}, ..., F_0`
//! evaluated at small `epsilon` and extrapolated to `epsilon -> 0`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::SeedResult;
use crate::error::{Error, Result};
use crate::poly::{
    build_f, build_f_chain, rat, rat_binomial, to_f64, BivariatePolynomial, CalabiParams,
};
use crate::symmetric::elementary_symmetric;
use crate::univariate::{RationalPoly, RootInterval};

/// Bits of absolute precision (relative to `epsilon`) for chain roots.
const CHAIN_BITS: u32 = 110;
/// Bits of relative precision for slope roots.
const SLOPE_BITS: u32 = 110;
/// Richardson levels `epsilon / 2^j`, `j < LEVELS`.
const LEVELS: usize = 5;
/// Required agreement of the last two Richardson diagonals.
const RICHARDSON_TOL: f64 = 1e-10;
/// Hard limit on `|chosen_slope - chain limit|`.
pub const SLOPE_AGREEMENT: f64 = 1e-8;
const MAX_HALVINGS: usize = 20;

/// `P(t) = (sigma_k - mu sigma_l)(t ×(m+1), p ×n)` with
/// `sigma_j = sum_a C(m+1, a) C(n, j-a) p^(j-a) t^a`.
pub fn slope_polynomial(params: &CalabiParams, mu: &BigRational) -> RationalPoly {
    let sigma_coeffs = |j: i64| -> Vec<BigRational> {
        let m1 = params.m as i64 + 1;
        let n = params.n as i64;
        (0..=m1)
            .map(|a| {
                if j < a {
                    return BigRational::zero();
                }
                rat_binomial(m1, a)
                    * rat_binomial(n, j - a)
                    * num_traits::pow(params.p.clone(), (j - a) as usize)
            })
            .collect()
    };
    let sk = sigma_coeffs(params.k as i64);
    let sl = sigma_coeffs(params.l as i64);
    RationalPoly::new(sk.iter().zip(&sl).map(|(a, b)| a - mu * b).collect())
}

fn zero_section_in_cone(params: &CalabiParams, t: &BigRational) -> bool {
    let lam: Vec<BigRational> = std::iter::repeat_n(t.clone(), params.m + 1)
        .chain(std::iter::repeat_n(params.p.clone(), params.n))
        .collect();
    let sig = elementary_symmetric(&lam);
    (1..=params.k).all(|i| sig[i].is_positive())
}

/// Root of the slope polynomial selected as `y'(0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SlopeSeed {
    /// All distinct real roots, ascending.
    pub candidates: Vec<f64>,
    pub chosen: f64,
    pub chosen_exact: BigRational,
}

/// Largest real root `t` of the slope polynomial with `P'(t) > 0` and the
/// zero-section eigenvalues in `Gamma_k`.
pub fn seed_slope(params: &CalabiParams, mu: &BigRational) -> Result<SlopeSeed> {
    let poly = slope_polynomial(params, mu);
    let dpoly = poly.derivative();
    let roots = poly.real_roots(SLOPE_BITS);
    let candidates: Vec<f64> = roots.iter().map(RootInterval::to_f64).collect();
    let chosen = roots
        .iter()
        .rev()
        .map(RootInterval::midpoint)
        .find(|t| dpoly.eval(t).is_positive() && zero_section_in_cone(params, t))
        .ok_or_else(|| {
            Error::SeedNotFound(format!(
                "no root of the slope polynomial among {candidates:?} is stable and admissible"
            ))
        })?;
    Ok(SlopeSeed {
        candidates,
        chosen: to_f64(&chosen),
        chosen_exact: chosen,
    })
}

/// Extrapolated chain limits `y_i'(0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainSeed {
    /// `i = m0, m0-1, ..., 0`.
    pub slopes: Vec<f64>,
    /// `y_i(epsilon)` in the same order.
    pub values: Vec<f64>,
    pub epsilon: f64,
}

/// `y_{k-1}(x)` for the linear base case `m >= k - 1`:
/// `int_0^x s^a (1+s)^(n-1) (mu delta (1+s) - n p) ds / (x^a (1+x)^n)`
/// with `a = m - k + 1` and `delta = [l == k - 1]`.
pub(crate) fn linear_base_value(
    params: &CalabiParams,
    mu: &BigRational,
    x: &BigRational,
) -> BigRational {
    let a = params.m + 1 - params.k;
    let n = params.n;
    let md = if params.l + 1 == params.k {
        mu.clone()
    } else {
        BigRational::zero()
    };
    let np = rat(n as i64) * &params.p;
    // (1+s)^(n-1) (md - np + md s), ascending in s
    let mut integrand = vec![BigRational::zero(); n + 1];
    for j in 0..n {
        let c = rat_binomial(n as i64 - 1, j as i64);
        integrand[j] += &c * (&md - &np);
        integrand[j + 1] += &c * &md;
    }
    let integral = integrand
        .iter()
        .enumerate()
        .map(|(j, c)| {
            let e = j + a + 1;
            c * num_traits::pow(x.clone(), e) / rat(e as i64)
        })
        .fold(BigRational::zero(), |acc, v| acc + v);
    integral / (num_traits::pow(x.clone(), a) * num_traits::pow(BigRational::one() + x, n))
}

fn point(v: BigRational) -> RootInterval {
    RootInterval {
        lo: v.clone(),
        hi: v,
    }
}

fn restricted_roots(
    f: &BivariatePolynomial,
    x: &BigRational,
    lo: Option<&BigRational>,
) -> Vec<RootInterval> {
    let poly = f.at_x(x);
    if poly.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    let width = x / BigRational::from_integer(BigInt::one() << CHAIN_BITS);
    let bound = poly.root_bound();
    let lo = lo.cloned().unwrap_or_else(|| -bound.clone());
    if lo >= bound {
        return Vec::new();
    }
    let zero = BigRational::zero();
    let zero_is_root = poly.eval(&zero).is_zero();
    poly.isolate_in(&lo, &bound)
        .iter()
        .map(|r| {
            // keep an exact zero root exact
            if zero_is_root && r.lo < zero && zero <= r.hi {
                point(zero.clone())
            } else {
                poly.refine(r, &width)
            }
        })
        .collect()
}

/// Whether `y_j = 0` solves `F_j = 0` identically: for `j > l` the `mu`
/// term is absent and `F_j(x, 0) = C(n, k-j) p^(k-j) int_0^x s^(m-j) (1+s)^(n-k+j) ds`,
/// which vanishes when `p = 0` or `k - j > n`. Zero is then a multiple root
/// and the next function down cannot lie strictly above it.
pub(crate) fn zero_function_step(params: &CalabiParams, j: usize) -> bool {
    j > params.l && (params.p.is_zero() || params.k - j > params.n)
}

/// `y_i(epsilon)` for `i = 0..=m0` (index `i`).
fn chain_values(
    params: &CalabiParams,
    mu: &BigRational,
    chain: &[BivariatePolynomial],
    eps: &BigRational,
) -> Result<Vec<RootInterval>> {
    let m0 = chain.len() - 1;
    let mut values = vec![point(BigRational::zero()); m0 + 1];
    values[m0] = if params.m + 1 > params.k - 1 {
        point(linear_base_value(params, mu, eps))
    } else {
        let fm = &chain[m0];
        let fy = fm.coeff(0, 1);
        if !fy.is_positive() {
            return Err(Error::SeedNotFound(format!(
                "d F_{m0}/dy (0, 0) = {fy} is not positive"
            )));
        }
        let t_pred = to_f64(&(-fm.coeff(1, 0) / &fy));
        let target = t_pred * to_f64(eps);
        let dfy = fm.derivative_y(1);
        restricted_roots(fm, eps, None)
            .into_iter()
            .filter(|r| dfy.eval_exact(eps, &r.midpoint()).is_positive())
            .min_by(|a, b| {
                (a.to_f64() - target)
                    .abs()
                    .total_cmp(&(b.to_f64() - target).abs())
            })
            .ok_or_else(|| Error::SeedNotFound(format!("F_{m0}(epsilon, y) has no stable root")))?
    };
    for i in (1..=m0).rev() {
        let below = i - 1;
        if zero_function_step(params, below) {
            values[below] = point(BigRational::zero());
            continue;
        }
        let floor = values[i].hi.clone();
        values[below] = restricted_roots(&chain[below], eps, Some(&floor))
            .into_iter()
            .next()
            .ok_or_else(|| {
                Error::SeedNotFound(format!(
                    "F_{below}(epsilon, y) has no root above y_{i}(epsilon)"
                ))
            })?;
    }
    Ok(values)
}

/// Richardson extrapolation of `s(h) = s0 + c1 h + c2 h^2 + ...` from
/// samples at `h, h/2, h/4, ...`; returns the limit and the change between
/// the last two diagonal entries.
fn richardson(samples: &[f64]) -> (f64, f64) {
    let mut prev: Vec<f64> = samples.to_vec();
    let mut diag = vec![*samples.last().expect("at least one sample")];
    let mut factor = 1.0;
    while prev.len() > 1 {
        factor *= 2.0;
        let next: Vec<f64> = prev
            .windows(2)
            .map(|w| w[1] + (w[1] - w[0]) / (factor - 1.0))
            .collect();
        diag.push(*next.last().unwrap());
        prev = next;
    }
    let n = diag.len();
    let change = if n > 1 {
        (diag[n - 1] - diag[n - 2]).abs()
    } else {
        0.0
    };
    (diag[n - 1], change)
}

/// The induction chain at `epsilon` and its extrapolated slopes.
pub fn seed_chain(
    params: &CalabiParams,
    mu: &BigRational,
    epsilon: &BigRational,
) -> Result<ChainSeed> {
    if !epsilon.is_positive() || epsilon >= &params.b {
        return Err(Error::InvalidArgument(format!(
            "epsilon = {epsilon} must lie in (0, b)"
        )));
    }
    let chain = build_f_chain(params, mu)?;
    let m0 = chain.len() - 1;
    let two = rat(2);
    let mut eps = epsilon.clone();
    // slopes[level][i]
    let mut slopes = Vec::with_capacity(LEVELS);
    let mut first_values = Vec::new();
    for level in 0..LEVELS {
        let vals = chain_values(params, mu, &chain, &eps)?;
        slopes.push(
            vals.iter()
                .map(|v| to_f64(&(v.midpoint() / &eps)))
                .collect::<Vec<f64>>(),
        );
        if level == 0 {
            first_values = vals.iter().map(RootInterval::to_f64).collect();
        }
        eps /= &two;
    }
    let eps_f = to_f64(epsilon);
    let mut limits = Vec::with_capacity(m0 + 1);
    for i in (0..=m0).rev() {
        let column: Vec<f64> = slopes.iter().map(|row| row[i]).collect();
        let (limit, change) = richardson(&column);
        if change > RICHARDSON_TOL * limit.abs().max(1.0) {
            return Err(Error::RetryWithSmallerEpsilon { epsilon: eps_f });
        }
        limits.push(limit);
    }
    let monotone = limits
        .windows(2)
        .all(|w| w[1] > w[0] || (w[0] == 0.0 && w[1] == 0.0));
    if !monotone {
        return Err(Error::RetryWithSmallerEpsilon { epsilon: eps_f });
    }
    Ok(ChainSeed {
        slopes: limits,
        values: first_values.into_iter().rev().collect(),
        epsilon: eps_f,
    })
}

/// Both seeding routes, the agreement check and the start value at the
/// final `epsilon` (halved automatically while the chain asks for it).
pub fn seed(params: &CalabiParams, mu: &BigRational, epsilon: &BigRational) -> Result<SeedResult> {
    let slope = seed_slope(params, mu)?;
    let mut eps = epsilon.clone();
    let mut halvings = 0;
    let chain = loop {
        match seed_chain(params, mu, &eps) {
            Ok(chain) => break chain,
            Err(Error::RetryWithSmallerEpsilon { .. }) if halvings < MAX_HALVINGS => {
                eps /= rat(2);
                halvings += 1;
            }
            Err(err) => return Err(err),
        }
    };
    let limit = *chain.slopes.last().expect("non-empty chain");
    let diff = (limit - slope.chosen).abs();
    if diff > SLOPE_AGREEMENT {
        return Err(Error::SeedMismatch {
            slope: slope.chosen,
            chain: limit,
            diff,
        });
    }
    let f = build_f(params, mu)?;
    let target = slope.chosen * to_f64(&eps);
    let start = restricted_roots(&f, &eps, None)
        .iter()
        .map(RootInterval::to_f64)
        .min_by(|a, b| (a - target).abs().total_cmp(&(b - target).abs()))
        .ok_or_else(|| Error::SeedNotFound("F(epsilon, y) has no real root".into()))?;
    Ok(SeedResult {
        slope_candidates: slope.candidates,
        chosen_slope: slope.chosen,
        chain_slopes: chain.slopes,
        epsilon: to_f64(&eps),
        start_value: start,
    })
}
