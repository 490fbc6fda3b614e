//! Exact univariate polynomials over `Q` with Sturm-sequence root isolation.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Polynomial with rational coefficients, lowest degree first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalPoly {
    coeffs: Vec<BigRational>,
}

/// A half-open interval `(lo, hi]` holding exactly one real root, or a
/// point `lo == hi` that is itself a root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl RootInterval {
    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from_integer(BigInt::from(2))
    }

    pub fn to_f64(&self) -> f64 {
        self.midpoint().to_f64().unwrap_or(f64::NAN)
    }
}

impl RationalPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c.to_f64().unwrap_or(f64::NAN))
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    fn leading(&self) -> &BigRational {
        self.coeffs.last().expect("non-zero polynomial")
    }

    /// Remainder of Euclidean division by a non-zero `divisor`.
    pub fn rem(&self, divisor: &Self) -> Self {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead = divisor.leading().clone();
        let mut r = self.coeffs.clone();
        while r.len() > dd && !r.is_empty() {
            let shift = r.len() - 1 - dd;
            let factor = r.last().unwrap() / &lead;
            for (i, c) in divisor.coeffs.iter().enumerate() {
                r[shift + i] -= &factor * c;
            }
            r.pop();
            while r.last().is_some_and(|c| c.is_zero()) {
                r.pop();
            }
        }
        Self::new(r)
    }

    /// Exact quotient, assuming `divisor` divides `self`.
    fn div_exact(&self, divisor: &Self) -> Self {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead = divisor.leading().clone();
        let mut r = self.coeffs.clone();
        let mut q = vec![BigRational::zero(); r.len().saturating_sub(dd)];
        while r.len() > dd && !r.is_empty() {
            let shift = r.len() - 1 - dd;
            let factor = r.last().unwrap() / &lead;
            for (i, c) in divisor.coeffs.iter().enumerate() {
                r[shift + i] -= &factor * c;
            }
            q[shift] = factor;
            r.pop();
        }
        Self::new(q)
    }

    fn monic(&self) -> Self {
        let lead = self.leading().clone();
        Self::new(self.coeffs.iter().map(|c| c / &lead).collect())
    }

    fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            a.monic()
        }
    }

    /// The square-free part `p / gcd(p, p')`, made monic.
    pub fn square_free(&self) -> Self {
        if self.degree().unwrap_or(0) == 0 {
            return self.clone();
        }
        let g = self.gcd(&self.derivative());
        if g.degree() == Some(0) {
            self.monic()
        } else {
            self.div_exact(&g).monic()
        }
    }

    fn sturm_sequence(&self) -> Vec<Self> {
        let mut seq = vec![self.clone(), self.derivative()];
        while !seq.last().unwrap().is_zero() {
            let n = seq.len();
            let r = seq[n - 2].rem(&seq[n - 1]);
            seq.push(Self::new(r.coeffs.into_iter().map(|c| -c).collect()));
        }
        seq.pop();
        seq
    }

    /// Cauchy bound: every real root has `|r| < bound`.
    pub fn root_bound(&self) -> BigRational {
        let lead = self.leading().abs();
        let max = self
            .coeffs
            .iter()
            .take(self.coeffs.len() - 1)
            .map(|c| c.abs() / &lead)
            .max()
            .unwrap_or_else(BigRational::zero);
        max + BigRational::one()
    }

    /// Isolating intervals for all distinct real roots, ascending.
    pub fn isolate_real_roots(&self) -> Vec<RootInterval> {
        match self.degree() {
            None | Some(0) => return Vec::new(),
            _ => {}
        }
        let sf = self.square_free();
        let bound = sf.root_bound();
        sf.isolate_in(&(-bound.clone()), &bound)
    }

    /// Isolating intervals for the distinct real roots in `(lo, hi]`.
    pub fn isolate_in(&self, lo: &BigRational, hi: &BigRational) -> Vec<RootInterval> {
        if self.degree().unwrap_or(0) == 0 {
            return Vec::new();
        }
        let sf = self.square_free();
        let seq = sf.sturm_sequence();
        let mut out = Vec::new();
        let mut stack = vec![(lo.clone(), hi.clone())];
        let two = BigRational::from_integer(BigInt::from(2));
        while let Some((a, b)) = stack.pop() {
            let count = sign_changes(&seq, &a) - sign_changes(&seq, &b);
            match count {
                0 => {}
                1 => out.push(RootInterval { lo: a, hi: b }),
                _ => {
                    // split at a non-root so every endpoint stays off the zero set
                    let mut mid = (&a + &b) / &two;
                    let mut denom = 3i64;
                    while sf.eval(&mid).is_zero() {
                        mid = &a + (&b - &a) / BigRational::from_integer(BigInt::from(denom));
                        denom += 1;
                    }
                    stack.push((mid.clone(), b));
                    stack.push((a, mid));
                }
            }
        }
        out.sort_by(|x, y| x.lo.cmp(&y.lo));
        out
    }

    /// Shrinks an isolating interval of this (square-free) polynomial by
    /// bisection until its width is at most `width`.
    pub fn refine(&self, root: &RootInterval, width: &BigRational) -> RootInterval {
        let sf = self.square_free();
        let mut lo = root.lo.clone();
        let mut hi = root.hi.clone();
        if lo == hi {
            return root.clone();
        }
        if sf.eval(&hi).is_zero() {
            return RootInterval { lo: hi.clone(), hi };
        }
        let two = BigRational::from_integer(BigInt::from(2));
        let sign_hi = sf.eval(&hi).signum();
        while &(&hi - &lo) > width {
            let mid = (&lo + &hi) / &two;
            let v = sf.eval(&mid);
            if v.is_zero() {
                return RootInterval {
                    lo: mid.clone(),
                    hi: mid,
                };
            }
            if v.signum() == sign_hi {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        RootInterval { lo, hi }
    }

    /// All distinct real roots to relative precision about `2^-bits`.
    pub fn real_roots(&self, bits: u32) -> Vec<RootInterval> {
        self.isolate_real_roots()
            .into_iter()
            .map(|r| {
                let scale = r.lo.abs().max(r.hi.abs()).max(BigRational::one());
                let width = scale / BigRational::from_integer(BigInt::one() << bits);
                self.refine(&r, &width)
            })
            .collect()
    }
}

fn sign_changes(seq: &[RationalPoly], x: &BigRational) -> i64 {
    let mut changes = 0;
    let mut last = 0i8;
    for p in seq {
        let v = p.eval(x);
        let s = if v.is_positive() {
            1
        } else if v.is_negative() {
            -1
        } else {
            0
        };
        if s != 0 {
            if last != 0 && s != last {
                changes += 1;
            }
            last = s;
        }
    }
    changes
}
