//! The bivariate polynomials `G^{m,n,k}_p(x, y)` of the Calabi reduction,
//! the constant `mu`, and the family `F_i` used near the zero section.
//!
//! `G^{m,n,k}_p` is the `t^k` Taylor coefficient of
//! `int_0^{x+ty} s^m (1 + tp + s)^n ds`. Expanding
//! `(1 + s + tp)^n = sum_j C(n,j) (tp)^j (1+s)^(n-j)`, integrating
//! `s^m (1+s)^(n-j)` term by term and expanding `(x+ty)^e` gives
//!
//! ```text
//! G = sum_{j<=min(n,k)} C(n,j) p^j sum_{i<=n-j} C(n-j,i)/(m+i+1)
//!         * C(m+i+1, k-j) x^(m+i+1-k+j) y^(k-j)
//! ```
//!
//! which is what [`build_g`] assembles.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::symmetric::{binomial, elementary_symmetric, sigma_at};
use crate::univariate::RationalPoly;

pub type Rational = BigRational;

pub(crate) fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub(crate) fn rat_binomial(n: i64, k: i64) -> Rational {
    Rational::from_integer(BigInt::from(binomial(n, k)))
}

pub(crate) fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact rational value of a finite `f64`.
pub fn rational_from_f64(v: f64) -> Result<Rational> {
    Rational::from_float(v)
        .ok_or_else(|| Error::InvalidArgument(format!("{v} is not a finite number")))
}

/// Parses `"3"`, `"-1/2"`, `"0.25"` or `"1e-3"` into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = || Error::InvalidArgument(format!("cannot parse {text:?} as a rational"));
    if let Some((num, den)) = s.split_once('/') {
        let num = BigInt::from_str(num.trim()).map_err(|_| bad())?;
        let den = BigInt::from_str(den.trim()).map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(num, den));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut value = Rational::from_integer(BigInt::from_str(&all_digits).map_err(|_| bad())?);
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    if scale >= 0 {
        value *= Rational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= Rational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if negative { -value } else { value })
}

/// Polynomial in `(x, y)` with exact rational coefficients.
///
/// Keys are `(deg_x, deg_y)`; zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BivariatePolynomial {
    terms: BTreeMap<(u32, u32), Rational>,
}

impl BivariatePolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = ((u32, u32), Rational)>,
    {
        let mut poly = Self::zero();
        for (key, c) in terms {
            poly.add_term(key, c);
        }
        poly
    }

    pub fn add_term(&mut self, key: (u32, u32), c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(key).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, dx: u32, dy: u32) -> Rational {
        self.terms
            .get(&(dx, dy))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree_x(&self) -> u32 {
        self.terms.keys().map(|k| k.0).max().unwrap_or(0)
    }

    pub fn degree_y(&self) -> u32 {
        self.terms.keys().map(|k| k.1).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::from_terms(self.terms.iter().map(|(k, v)| (*k, v * c)))
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.add_term(*k, -v.clone());
        }
        out
    }

    pub fn derivative_x(&self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|(k, _)| k.0 > 0)
                .map(|(k, v)| ((k.0 - 1, k.1), v * rat(k.0 as i64))),
        )
    }

    /// `d^s/dy^s`.
    pub fn derivative_y(&self, s: u32) -> Self {
        Self::from_terms(self.terms.iter().filter(|(k, _)| k.1 >= s).map(|(k, v)| {
            let falling: i64 = (0..s as i64).map(|i| k.1 as i64 - i).product();
            ((k.0, k.1 - s), v * rat(falling))
        }))
    }

    pub fn eval_exact(&self, x: &Rational, y: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for ((i, j), c) in &self.terms {
            acc += c
                * num_traits::pow(x.clone(), *i as usize)
                * num_traits::pow(y.clone(), *j as usize);
        }
        acc
    }

    /// Value, `d/dx` and `d^s/dy^s`, exactly.
    pub fn eval_and_partials_exact(
        &self,
        x: &Rational,
        y: &Rational,
        s: u32,
    ) -> (Rational, Rational, Rational) {
        (
            self.eval_exact(x, y),
            self.derivative_x().eval_exact(x, y),
            self.derivative_y(s).eval_exact(x, y),
        )
    }

    /// Value, `d/dx` and `d^s/dy^s` in floating point.
    pub fn eval_and_partials(&self, x: f64, y: f64, s: u32) -> (f64, f64, f64) {
        let fp = self.to_float();
        let (v, dx, _) = fp.eval_grad(x, y);
        let dys = if s == 0 {
            v
        } else {
            self.derivative_y(s).to_float().eval(x, y)
        };
        (v, dx, dys)
    }

    /// Restriction `y -> P(x0, y)` as an exact univariate polynomial.
    pub fn at_x(&self, x0: &Rational) -> RationalPoly {
        let mut coeffs = vec![Rational::zero(); self.degree_y() as usize + 1];
        for ((i, j), c) in &self.terms {
            coeffs[*j as usize] += c * num_traits::pow(x0.clone(), *i as usize);
        }
        RationalPoly::new(coeffs)
    }

    pub fn to_float(&self) -> FloatPoly {
        FloatPoly::new(self)
    }
}

impl fmt::Display for BivariatePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (n, ((i, j), c)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            if *i > 0 {
                write!(f, "*x^{i}")?;
            }
            if *j > 0 {
                write!(f, "*y^{j}")?;
            }
        }
        Ok(())
    }
}

/// `{"terms": [[dx, dy, "num/den"], ...]}`
impl Serialize for BivariatePolynomial {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        struct Terms<'a>(&'a BTreeMap<(u32, u32), Rational>);
        impl Serialize for Terms<'_> {
            fn serialize<S: Serializer>(
                &self,
                serializer: S,
            ) -> std::result::Result<S::Ok, S::Error> {
                let mut seq = serializer.serialize_seq(Some(self.0.len()))?;
                for ((i, j), c) in self.0 {
                    seq.serialize_element(&(i, j, c.to_string()))?;
                }
                seq.end()
            }
        }
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("BivariatePolynomial", 1)?;
        st.serialize_field("terms", &Terms(&self.terms))?;
        st.end()
    }
}

/// Dense floating-point copy of a [`BivariatePolynomial`] for fast evaluation.
#[derive(Debug, Clone)]
pub struct FloatPoly {
    deg_x: usize,
    deg_y: usize,
    /// row-major `c[i * (deg_y + 1) + j]` for `x^i y^j`
    c: Vec<f64>,
}

impl FloatPoly {
    fn new(p: &BivariatePolynomial) -> Self {
        let deg_x = p.degree_x() as usize;
        let deg_y = p.degree_y() as usize;
        let mut c = vec![0.0; (deg_x + 1) * (deg_y + 1)];
        for ((i, j), v) in p.terms() {
            c[*i as usize * (deg_y + 1) + *j as usize] = to_f64(v);
        }
        Self { deg_x, deg_y, c }
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.c[i * (self.deg_y + 1)..(i + 1) * (self.deg_y + 1)]
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.eval_grad(x, y).0
    }

    /// `(P, dP/dx, dP/dy)` by nested Horner.
    pub fn eval_grad(&self, x: f64, y: f64) -> (f64, f64, f64) {
        let (mut v, mut vx, mut vy) = (0.0, 0.0, 0.0);
        for i in (0..=self.deg_x).rev() {
            let (mut r, mut ry) = (0.0, 0.0);
            for &c in self.row(i).iter().rev() {
                ry = ry * y + r;
                r = r * y + c;
            }
            vx = vx * x + v;
            v = v * x + r;
            vy = vy * x + ry;
        }
        (v, vx, vy)
    }

    /// `sum |c_ij| |x|^i |y|^j`, the magnitude scale for residual tests.
    pub fn abs_scale(&self, x: f64, y: f64) -> f64 {
        let (ax, ay) = (x.abs(), y.abs());
        let mut v = 0.0;
        for i in (0..=self.deg_x).rev() {
            let r = self
                .row(i)
                .iter()
                .rev()
                .fold(0.0, |acc, c| acc * ay + c.abs());
            v = v * ax + r;
        }
        v
    }
}

/// A problem instance: `X = P(O_M + L^(m+1))` over an `n`-dimensional base,
/// the class `[alpha] = p[pi^* omega_M] + q eta`, the Kähler class
/// `[omega] = [pi^* omega_M] + b eta`, and the `(k, l)` pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CalabiParams {
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub l: usize,
    pub p: Rational,
    pub q: Rational,
    pub b: Rational,
}

impl CalabiParams {
    pub fn new(
        m: usize,
        n: usize,
        k: usize,
        l: usize,
        p: Rational,
        q: Rational,
        b: Rational,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument(
                "base dimension n must be positive".into(),
            ));
        }
        if l >= k || k > m + n + 1 {
            return Err(Error::InvalidArgument(format!(
                "need 0 <= l < k <= m + n + 1 = {}, got k = {k}, l = {l}",
                m + n + 1
            )));
        }
        if !b.is_positive() {
            return Err(Error::InvalidArgument(format!("b = {b} must be positive")));
        }
        Ok(Self {
            m,
            n,
            k,
            l,
            p,
            q,
            b,
        })
    }

    /// Convenience constructor from floating-point class coefficients
    /// (converted exactly).
    pub fn from_f64(
        m: usize,
        n: usize,
        k: usize,
        l: usize,
        p: f64,
        q: f64,
        b: f64,
    ) -> Result<Self> {
        Self::new(
            m,
            n,
            k,
            l,
            rational_from_f64(p)?,
            rational_from_f64(q)?,
            rational_from_f64(b)?,
        )
    }

    /// Total dimension `N = m + n + 1`.
    pub fn dim(&self) -> usize {
        self.m + self.n + 1
    }

    pub fn p_f64(&self) -> f64 {
        to_f64(&self.p)
    }

    pub fn q_f64(&self) -> f64 {
        to_f64(&self.q)
    }

    pub fn b_f64(&self) -> f64 {
        to_f64(&self.b)
    }

    /// `G^{m,n,j}_p` for this instance.
    pub fn g(&self, j: i64) -> Result<BivariatePolynomial> {
        build_g(self.m, self.n, j, &self.p)
    }
}

/// `mu = G^k(b, q) / G^l(b, q)`, kept exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MuValue {
    pub mu: Rational,
    pub numerator: Rational,
    pub denominator: Rational,
}

impl MuValue {
    pub fn mu_f64(&self) -> f64 {
        to_f64(&self.mu)
    }
}

/// Builds `G^{m,n,k}_p`. Negative `k` yields the zero polynomial.
pub fn build_g(m: usize, n: usize, k: i64, p: &Rational) -> Result<BivariatePolynomial> {
    let top = (m + n + 1) as i64;
    if k < 0 {
        return Ok(BivariatePolynomial::zero());
    }
    if k > top {
        return Err(Error::InvalidArgument(format!(
            "k = {k} exceeds m + n + 1 = {top}"
        )));
    }
    let (m, n) = (m as i64, n as i64);
    let mut poly = BivariatePolynomial::zero();
    for j in 0..=n.min(k) {
        let outer = rat_binomial(n, j) * num_traits::pow(p.clone(), j as usize);
        if outer.is_zero() {
            continue;
        }
        let dy = k - j;
        for i in 0..=(n - j) {
            let e = m + i + 1;
            if dy > e {
                continue;
            }
            let c = &outer * rat_binomial(n - j, i) * rat_binomial(e, dy) / rat(e);
            poly.add_term(((e - dy) as u32, dy as u32), c);
        }
    }
    Ok(poly)
}

/// `mu` from the boundary identity `G^k(b, q) = mu G^l(b, q)`.
pub fn compute_mu(params: &CalabiParams) -> Result<MuValue> {
    let numerator = params.g(params.k as i64)?.eval_exact(&params.b, &params.q);
    let denominator = params.g(params.l as i64)?.eval_exact(&params.b, &params.q);
    if denominator.is_zero() {
        return Err(Error::DegenerateClass);
    }
    Ok(MuValue {
        mu: &numerator / &denominator,
        numerator,
        denominator,
    })
}

/// `F = G^{m,n,k} - mu G^{m,n,l}`.
pub fn build_f(params: &CalabiParams, mu: &Rational) -> Result<BivariatePolynomial> {
    Ok(params
        .g(params.k as i64)?
        .sub(&params.g(params.l as i64)?.scale(mu)))
}

/// `F_i = G^{m-i,n,k-i} - mu G^{m-i,n,l-i}` for `i = 0..=min(m, k-1)`.
pub fn build_f_chain(params: &CalabiParams, mu: &Rational) -> Result<Vec<BivariatePolynomial>> {
    let m0 = params.m.min(params.k - 1);
    (0..=m0)
        .map(|i| {
            let mm = params.m - i;
            let gk = build_g(mm, params.n, params.k as i64 - i as i64, &params.p)?;
            let gl = build_g(mm, params.n, params.l as i64 - i as i64, &params.p)?;
            Ok(gk.sub(&gl.scale(mu)))
        })
        .collect()
}

/// `G^j(b, q) / C(N, j)`: the intersection number `[alpha]^j [omega]^(N-j)`
/// up to one positive normalising constant shared by all `j`.
pub fn intersection_ratio(params: &CalabiParams, j: usize) -> Result<Rational> {
    let n_total = params.dim();
    if j > n_total {
        return Err(Error::InvalidArgument(format!(
            "j = {j} exceeds N = {n_total}"
        )));
    }
    let g = params.g(j as i64)?.eval_exact(&params.b, &params.q);
    Ok(g / rat_binomial(n_total as i64, j as i64))
}

/// Closed form of the top intersection
/// `sum_i C(n,i) zeta^(m+i+1) xi^(n-i) / (m+i+1)`.
pub fn top_intersection_closed_form(
    m: usize,
    n: usize,
    xi: &Rational,
    zeta: &Rational,
) -> Rational {
    (0..=n)
        .map(|i| {
            rat_binomial(n as i64, i as i64)
                * num_traits::pow(zeta.clone(), m + i + 1)
                * num_traits::pow(xi.clone(), n - i)
                / rat((m + i + 1) as i64)
        })
        .fold(Rational::zero(), |a, b| a + b)
}

/// Ansatz vector `check-lambda_{m,n}(x, y)` in exact arithmetic (`x != 0`).
pub fn checked_lambda_exact(
    m: usize,
    n: usize,
    p: &Rational,
    x: &Rational,
    y: &Rational,
) -> Vec<Rational> {
    let a = y / x;
    let b = (p + y) / (Rational::one() + x);
    std::iter::repeat_n(a, m)
        .chain(std::iter::repeat_n(b, n))
        .collect()
}

/// `dG^{m,n,k}/dy - x^m (1+x)^n sigma_{k-1}(check-lambda)` in exact arithmetic.
pub fn dy_identity_residual_exact(
    m: usize,
    n: usize,
    k: usize,
    p: &Rational,
    x: &Rational,
    y: &Rational,
) -> Result<Rational> {
    if !x.is_positive() {
        return Err(Error::InvalidArgument("x must be positive".into()));
    }
    let g = build_g(m, n, k as i64, p)?;
    let lhs = g.derivative_y(1).eval_exact(x, y);
    let sig = elementary_symmetric(&checked_lambda_exact(m, n, p, x, y));
    let weight = num_traits::pow(x.clone(), m) * num_traits::pow(Rational::one() + x, n);
    Ok(lhs - weight * sigma_at(&sig, k as i64 - 1))
}

/// Floating-point counterpart of [`dy_identity_residual_exact`], returned
/// relative to the magnitude of the two sides.
pub fn verify_dy_identity(
    m: usize,
    n: usize,
    k: usize,
    p: &Rational,
    x: f64,
    y: f64,
) -> Result<f64> {
    if x.is_nan() || x <= 0.0 {
        return Err(Error::InvalidArgument("x must be positive".into()));
    }
    let g = build_g(m, n, k as i64, p)?;
    let lhs = g.derivative_y(1).to_float().eval(x, y);
    let pf = to_f64(p);
    let lam: Vec<f64> = std::iter::repeat_n(y / x, m)
        .chain(std::iter::repeat_n((pf + y) / (1.0 + x), n))
        .collect();
    let sig = elementary_symmetric(&lam);
    let rhs = x.powi(m as i32) * (1.0 + x).powi(n as i32) * sigma_at(&sig, k as i64 - 1);
    Ok((lhs - rhs) / (1.0 + lhs.abs().max(rhs.abs())))
}
