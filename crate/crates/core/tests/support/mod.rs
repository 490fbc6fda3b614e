//! Test-only oracles that share no code with the library's closed forms.

#![allow(dead_code)]

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Polynomial in `(s or x, y, t)` keyed by exponent triples.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Tri(BTreeMap<[u32; 3], BigRational>);

impl Tri {
    pub fn constant(c: BigRational) -> Self {
        let mut t = Tri::default();
        t.add([0, 0, 0], c);
        t
    }

    pub fn monomial(e: [u32; 3], c: BigRational) -> Self {
        let mut t = Tri::default();
        t.add(e, c);
        t
    }

    fn add(&mut self, e: [u32; 3], c: BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.0.entry(e).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.0.remove(&e);
        }
    }

    pub fn plus(&self, other: &Tri) -> Tri {
        let mut out = self.clone();
        for (e, c) in &other.0 {
            out.add(*e, c.clone());
        }
        out
    }

    pub fn times(&self, other: &Tri) -> Tri {
        let mut out = Tri::default();
        for (a, ca) in &self.0 {
            for (b, cb) in &other.0 {
                out.add([a[0] + b[0], a[1] + b[1], a[2] + b[2]], ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Tri {
        (0..e).fold(Tri::constant(BigRational::one()), |acc, _| acc.times(self))
    }

    /// `int_0^s` in the first variable.
    pub fn integrate_first(&self) -> Tri {
        let mut out = Tri::default();
        for (e, c) in &self.0 {
            let d = e[0] + 1;
            out.add(
                [d, e[1], e[2]],
                c / BigRational::from_integer(BigInt::from(d)),
            );
        }
        out
    }

    /// Replaces the first variable by `sub` (a polynomial in the same ring
    /// whose first variable plays the role of `x`).
    pub fn substitute_first(&self, sub: &Tri) -> Tri {
        let mut out = Tri::default();
        for (e, c) in &self.0 {
            let rest = Tri::monomial([0, e[1], e[2]], c.clone());
            out = out.plus(&sub.pow(e[0]).times(&rest));
        }
        out
    }

    pub fn d_third(&self) -> Tri {
        let mut out = Tri::default();
        for (e, c) in &self.0 {
            if e[2] > 0 {
                out.add(
                    [e[0], e[1], e[2] - 1],
                    c * BigRational::from_integer(BigInt::from(e[2])),
                );
            }
        }
        out
    }

    /// Sets the third variable to zero and returns `(i, j) -> c`.
    pub fn at_third_zero(&self) -> BTreeMap<(u32, u32), BigRational> {
        self.0
            .iter()
            .filter(|(e, _)| e[2] == 0)
            .map(|(e, c)| ((e[0], e[1]), c.clone()))
            .collect()
    }
}

/// `(1/k!) d^k/dt^k |_{t=0} int_0^{x+ty} s^m (1+tp+s)^n ds`, by expanding the
/// integrand, integrating, substituting and differentiating `k` times.
pub fn g_oracle(m: u32, n: u32, k: u32, p: &BigRational) -> BTreeMap<(u32, u32), BigRational> {
    // variables: (s, y, t) before substitution, (x, y, t) after
    let s = Tri::monomial([1, 0, 0], BigRational::one());
    let base = Tri::constant(BigRational::one())
        .plus(&Tri::monomial([0, 0, 1], p.clone()))
        .plus(&s);
    let integrand = s.pow(m).times(&base.pow(n));
    let upper = Tri::monomial([1, 0, 0], BigRational::one())
        .plus(&Tri::monomial([0, 1, 1], BigRational::one()));
    let mut h = integrand.integrate_first().substitute_first(&upper);
    let mut fact = BigRational::one();
    for i in 1..=k {
        h = h.d_third();
        fact *= BigRational::from_integer(BigInt::from(i));
    }
    h.at_third_zero()
        .into_iter()
        .map(|(e, c)| (e, c / &fact))
        .collect()
}

/// `sum_i C(n,i) q^(m+i+1) p^(n-i) / (m+i+1)` with binomials built by
/// Pascal's rule.
pub fn top_degree_sum(m: usize, n: usize, p: &BigRational, qv: &BigRational) -> BigRational {
    let mut row = vec![BigInt::one()];
    for _ in 0..n {
        let mut next = vec![BigInt::one(); row.len() + 1];
        for i in 1..row.len() {
            next[i] = &row[i - 1] + &row[i];
        }
        row = next;
    }
    (0..=n)
        .map(|i| {
            BigRational::from_integer(row[i].clone())
                * num_traits::pow(qv.clone(), m + i + 1)
                * num_traits::pow(p.clone(), n - i)
                / BigRational::from_integer(BigInt::from(m + i + 1))
        })
        .fold(BigRational::zero(), |a, b| a + b)
}

/// Elementary symmetric functions by subset enumeration (short vectors).
pub fn sigma_by_subsets(values: &[f64], k: usize) -> f64 {
    let n = values.len();
    (0u32..(1 << n))
        .filter(|mask| mask.count_ones() as usize == k)
        .map(|mask| {
            (0..n)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| values[i])
                .product::<f64>()
        })
        .sum()
}
