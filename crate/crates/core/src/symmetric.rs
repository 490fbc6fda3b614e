//! Elementary symmetric functions and the cones they cut out.
//!
//! All `sigma_j` are produced together by expanding the generating polynomial
//! `prod_i (1 + lambda_i t)`, which costs `O(n^2)` and works over any
//! commutative ring, so the same routine serves `f64`, integers and exact
//! rationals.

use std::ops::{Add, Mul};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Block structure of an eigenvalue vector produced by the Calabi ansatz.
///
/// The vector is laid out as `first` equal entries, then `second` equal
/// entries, then (if `last`) one trailing entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Multiplicity {
    pub first: usize,
    pub second: usize,
    pub last: bool,
}

/// An eigenvalue vector, optionally carrying its ansatz block structure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenVector {
    values: Vec<f64>,
    multiplicity: Option<Multiplicity>,
}

impl EigenVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument(
                "eigenvalue vector must be non-empty".into(),
            ));
        }
        Ok(Self {
            values,
            multiplicity: None,
        })
    }

    /// Builds `(a repeated first, b repeated second, last?)`.
    pub fn blocks(a: f64, first: usize, b: f64, second: usize, last: Option<f64>) -> Self {
        let mut values = Vec::with_capacity(first + second + 1);
        values.extend(std::iter::repeat_n(a, first));
        values.extend(std::iter::repeat_n(b, second));
        values.extend(last);
        Self {
            values,
            multiplicity: Some(Multiplicity {
                first,
                second,
                last: last.is_some(),
            }),
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn multiplicity(&self) -> Option<Multiplicity> {
        self.multiplicity
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `sigma_0, ..., sigma_len`.
    pub fn sigmas(&self) -> Vec<f64> {
        elementary_symmetric(&self.values)
    }

    /// Appends one entry, dropping the block tag's `last` slot if it was free.
    pub fn with_last(&self, t: f64) -> Self {
        let mut values = self.values.clone();
        values.push(t);
        let multiplicity = match self.multiplicity {
            Some(mult) if !mult.last => Some(Multiplicity { last: true, ..mult }),
            _ => None,
        };
        Self {
            values,
            multiplicity,
        }
    }
}

impl From<Vec<f64>> for EigenVector {
    fn from(values: Vec<f64>) -> Self {
        Self {
            values,
            multiplicity: None,
        }
    }
}

/// All elementary symmetric functions `sigma_0..=sigma_n` of `values`.
pub fn elementary_symmetric<T>(values: &[T]) -> Vec<T>
where
    T: Clone + Zero + One + Add<Output = T> + Mul<Output = T>,
{
    let mut e = vec![T::zero(); values.len() + 1];
    e[0] = T::one();
    for (count, v) in values.iter().enumerate() {
        for j in (1..=count + 1).rev() {
            let term = v.clone() * e[j - 1].clone();
            e[j] = e[j].clone() + term;
        }
    }
    e
}

/// Reads `sigma_j` from a precomputed table, with `sigma_j = 0` outside
/// `0..=n` (negative indices included).
pub fn sigma_at<T: Clone + Zero>(table: &[T], j: i64) -> T {
    if j < 0 {
        return T::zero();
    }
    table.get(j as usize).cloned().unwrap_or_else(T::zero)
}

/// `sigma_k(lam)`; zero when `k` exceeds the length.
pub fn sigma(k: usize, lam: &EigenVector) -> f64 {
    if k > lam.len() {
        return 0.0;
    }
    lam.sigmas()[k]
}

/// Binomial coefficient `C(n, k)`, zero when `k < 0` or `k > n`.
pub fn binomial(n: i64, k: i64) -> u128 {
    if k < 0 || n < 0 || k > n {
        return 0;
    }
    let k = k.min(n - k) as u128;
    let n = n as u128;
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

fn binomial_f64(n: usize, k: usize) -> f64 {
    binomial(n as i64, k as i64) as f64
}

/// Strict membership in `Gamma_k`: `sigma_i > 0` for every `i <= k`.
pub fn in_admissible_cone(lam: &EigenVector, k: usize) -> Result<bool> {
    if k == 0 || k > lam.len() {
        return Err(Error::InvalidArgument(format!(
            "cone index k = {k} must lie in 1..={}",
            lam.len()
        )));
    }
    Ok(sigmas_in_cone(&lam.sigmas(), k))
}

/// Cone test on an already expanded `sigma` table.
pub(crate) fn sigmas_in_cone(table: &[f64], k: usize) -> bool {
    table.iter().take(k + 1).all(|&s| s > 0.0)
}

/// `(sigma_r / C(n,r))^2 - (sigma_{r-1} / C(n,r-1)) (sigma_{r+1} / C(n,r+1))`.
///
/// Evaluated as a single cross-multiplied numerator over a positive
/// denominator, so integer-valued inputs of moderate size give an exact sign.
pub fn newton_defect(lam: &EigenVector, r: usize) -> Result<f64> {
    let n = lam.len();
    if r == 0 || r + 1 > n {
        return Err(Error::InvalidArgument(format!(
            "Newton index r = {r} must lie in 1..={}",
            n.saturating_sub(1)
        )));
    }
    let s = lam.sigmas();
    let (c_prev, c_mid, c_next) = (
        binomial_f64(n, r - 1),
        binomial_f64(n, r),
        binomial_f64(n, r + 1),
    );
    let numerator = s[r] * s[r] * c_prev * c_next - s[r - 1] * s[r + 1] * c_mid * c_mid;
    Ok(numerator / (c_mid * c_mid * c_prev * c_next))
}

/// `((sigma_k / C(n,k)) / (sigma_l / C(n,l)))^(1/(k-l))` on `Gamma_k`.
pub fn hessian_quotient(lam: &EigenVector, k: usize, l: usize) -> Result<f64> {
    let n = lam.len();
    if l >= k || k > n {
        return Err(Error::InvalidArgument(format!(
            "need 0 <= l < k <= n, got l = {l}, k = {k}, n = {n}"
        )));
    }
    let s = lam.sigmas();
    if !sigmas_in_cone(&s, k) {
        return Err(Error::ConeViolation { k });
    }
    let ratio = (s[k] / binomial_f64(n, k)) / (s[l] / binomial_f64(n, l));
    Ok(ratio.powf(1.0 / (k - l) as f64))
}

/// Ansatz eigenvalues `lambda_{m,n}` and `check-lambda_{m,n}` at `(x, y)`.
///
/// For `x > 0` the full vector is `(y/x ×m, (p+y)/(1+x) ×n, y')` and the
/// checked vector drops `y'`. On the zero section `x = 0` (where `y = 0`) the
/// ratio `y/x` is replaced by its limit `y'(0)`, giving
/// `(y'(0) ×(m+1), p ×n)` and `(y'(0) ×m, p ×n)`.
///
/// When `x > 0` and `yprime` is omitted, the full vector is returned without
/// its last entry (identical to the checked vector).
pub fn structured_eigenvector(
    m: usize,
    n: usize,
    p: f64,
    x: f64,
    y: f64,
    yprime: Option<f64>,
) -> Result<(EigenVector, EigenVector)> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::InvalidArgument(format!("x = {x} must be >= 0")));
    }
    if x == 0.0 {
        if y != 0.0 {
            return Err(Error::SingularInput(format!(
                "on the zero section y must vanish, got y = {y}"
            )));
        }
        let t = yprime
            .ok_or_else(|| Error::SingularInput("y'(0) is required on the zero section".into()))?;
        let full = EigenVector::blocks(t, m + 1, p, n, None);
        let checked = EigenVector::blocks(t, m, p, n, None);
        return Ok((full, checked));
    }
    let a = y / x;
    let b = (p + y) / (1.0 + x);
    let checked = EigenVector::blocks(a, m, b, n, None);
    let full = match yprime {
        Some(t) => EigenVector::blocks(a, m, b, n, Some(t)),
        None => checked.clone(),
    };
    Ok((full, checked))
}

/// Uniform `q`-positivity: every sum of `q + 1` distinct entries is positive.
pub fn uniform_q_positive(lam: &EigenVector, q: usize) -> Result<bool> {
    if q + 1 > lam.len() {
        return Err(Error::InvalidArgument(format!(
            "q + 1 = {} exceeds the vector length {}",
            q + 1,
            lam.len()
        )));
    }
    let mut sorted = lam.values().to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(sorted.iter().take(q + 1).sum::<f64>() > 0.0)
}
