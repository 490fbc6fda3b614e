//! Positivity criteria on the distinguished subvarieties.
//!
//! Under Calabi symmetry only two families of subvarieties can obstruct
//! solvability: the zero section `P_0` and the subvarieties `D_inf^s`
//! obtained by cutting `s` times with the infinity divisor (class `eta`).
//! Their intersection numbers are the `y`-derivatives of
//! `F = G^k - mu G^l` at `(b, q)`. All signs are decided in exact rational
//! arithmetic; floating values are only reported.

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Serialize, Serializer};

use crate::format::sig17;
use crate::poly::{build_f, compute_mu, rat_binomial, to_f64, CalabiParams, MuValue};

fn ser17<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&sig17(*v))
}

fn ser17_opt<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.serialize_str(&sig17(*v)),
        None => s.serialize_none(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum P0Rule {
    PPositive,
    WeightedBinomial,
    Vacuous,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct P0Check {
    pub applicable: bool,
    #[serde(serialize_with = "ser17")]
    pub value: f64,
    pub pass: bool,
    pub rule: P0Rule,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TowerEntry {
    pub s: usize,
    #[serde(serialize_with = "ser17")]
    pub value: f64,
    pub pass: bool,
    pub required: bool,
}

/// Positivity of the top pairings `[alpha]^k [omega]^(N-k)` and of `mu`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VolumeCheck {
    #[serde(serialize_with = "ser17")]
    pub g_k: f64,
    #[serde(serialize_with = "ser17")]
    pub g_l: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    FailVolume,
    #[serde(rename = "fail_P0")]
    FailP0,
    #[serde(rename = "fail_Dinf")]
    FailDinf,
    Degenerate,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::FailVolume => "fail_volume",
            Verdict::FailP0 => "fail_P0",
            Verdict::FailDinf => "fail_Dinf",
            Verdict::Degenerate => "degenerate",
        }
    }

    pub fn is_pass(self) -> bool {
        self == Verdict::Pass
    }
}

const NOTES: &str = "Only the zero section P_0 and the infinity-divisor tower D_inf^s are tested; \
under Calabi symmetry no other subvariety can obstruct. The D_inf condition is always evaluated \
because its redundancy is not known. Intersection values use the normalisation C = 1 and are \
meaningful up to one positive constant.";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriteriaReport {
    #[serde(serialize_with = "ser17_opt")]
    pub mu: Option<f64>,
    /// `mu` as an exact fraction.
    pub mu_exact: Option<String>,
    pub volume: Option<VolumeCheck>,
    pub p0: Option<P0Check>,
    /// `d^s F / dy^s (b, q)`, `s = 1..=k`.
    pub dinf_tower: Vec<TowerEntry>,
    /// `d^s G^k / dy^s (b, q)`, `s = 1..=k-1`: the tower for `[alpha]` alone.
    pub subharmonic_tower: Vec<TowerEntry>,
    pub verdict: Verdict,
    pub normalization: &'static str,
    pub notes: &'static str,
}

/// Zero-section condition.
pub fn check_p0(params: &CalabiParams, mu: &BigRational) -> P0Check {
    let (m, n, k, l) = (params.m, params.n, params.k, params.l);
    if m + 1 > k - 1 {
        return P0Check {
            applicable: false,
            value: 0.0,
            pass: true,
            rule: P0Rule::Vacuous,
        };
    }
    let p = &params.p;
    if m + 1 > l {
        return P0Check {
            applicable: true,
            value: to_f64(p),
            pass: p.is_positive(),
            rule: P0Rule::PPositive,
        };
    }
    let value = num_traits::pow(p.clone(), k - m - 1) * rat_binomial(n as i64, (k - m - 1) as i64)
        - mu * num_traits::pow(p.clone(), l - m - 1) * rat_binomial(n as i64, (l - m - 1) as i64);
    P0Check {
        applicable: true,
        value: to_f64(&value),
        // p > 0 is already forced by m + 1 <= k - 1
        pass: value.is_positive() && p.is_positive(),
        rule: P0Rule::WeightedBinomial,
    }
}

/// The `D_inf^s` tower `d^s F/dy^s (b, q)` for `s = 1..=k`.
///
/// Required entries: `s < k` when `l = 0`, only `s = 1` when `l >= 1`.
pub fn check_dinf(params: &CalabiParams, mu: &BigRational) -> Vec<TowerEntry> {
    let f = build_f(params, mu).expect("validated parameters");
    (1..=params.k)
        .map(|s| {
            let v = f.derivative_y(s as u32).eval_exact(&params.b, &params.q);
            TowerEntry {
                s,
                value: to_f64(&v),
                pass: v.is_positive(),
                required: if params.l == 0 { s < params.k } else { s == 1 },
            }
        })
        .collect()
}

/// `d^s G^k/dy^s (b, q)` for `s = 1..k-1`; required when `l >= 1`, where
/// the class must independently admit a strictly `k`-subharmonic
/// representative.
pub fn check_subharmonic_tower(params: &CalabiParams) -> Vec<TowerEntry> {
    let g = params.g(params.k as i64).expect("validated parameters");
    (1..params.k)
        .map(|s| {
            let v = g.derivative_y(s as u32).eval_exact(&params.b, &params.q);
            TowerEntry {
                s,
                value: to_f64(&v),
                pass: v.is_positive(),
                required: params.l >= 1,
            }
        })
        .collect()
}

fn check_volume(mu: &MuValue) -> VolumeCheck {
    VolumeCheck {
        g_k: to_f64(&mu.numerator),
        g_l: to_f64(&mu.denominator),
        pass: mu.numerator.is_positive() && mu.mu.is_positive(),
    }
}

/// Runs every check and aggregates the verdict.
pub fn classify(params: &CalabiParams) -> CriteriaReport {
    let mu = match compute_mu(params) {
        Ok(mu) => mu,
        Err(_) => {
            return CriteriaReport {
                mu: None,
                mu_exact: None,
                volume: None,
                p0: None,
                dinf_tower: Vec::new(),
                subharmonic_tower: Vec::new(),
                verdict: Verdict::Degenerate,
                normalization: "C = 1",
                notes: NOTES,
            }
        }
    };
    let volume = check_volume(&mu);
    let p0 = check_p0(params, &mu.mu);
    let dinf_tower = check_dinf(params, &mu.mu);
    let subharmonic_tower = check_subharmonic_tower(params);
    let tower_ok = dinf_tower
        .iter()
        .chain(&subharmonic_tower)
        .all(|e| e.pass || !e.required);
    let verdict = if !volume.pass {
        Verdict::FailVolume
    } else if !p0.pass {
        Verdict::FailP0
    } else if !tower_ok {
        Verdict::FailDinf
    } else {
        Verdict::Pass
    };
    CriteriaReport {
        mu: Some(mu.mu_f64()),
        mu_exact: Some(mu.mu.to_string()),
        volume: Some(volume),
        p0: Some(p0),
        dinf_tower,
        subharmonic_tower,
        verdict,
        normalization: "C = 1",
        notes: NOTES,
    }
}

/// `true` when the exact `F(b, q)` vanishes (always, by construction of `mu`).
pub fn boundary_identity_holds(params: &CalabiParams) -> bool {
    match compute_mu(params) {
        Ok(mu) => build_f(params, &mu.mu)
            .map(|f| f.eval_exact(&params.b, &params.q).is_zero())
            .unwrap_or(false),
        Err(_) => false,
    }
}
