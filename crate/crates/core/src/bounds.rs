//! The hypothesis window of the small-support theorems, the chain of
//! successively weaker lower bounds on `p(n, eps)`, and the per-family
//! constants for classical groups.
//!
//! `log` is the natural logarithm throughout.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::exact::{p_exact, p_tilde_exact, rational_to_f64_floor, s_not, ExactProportion};

/// Absolute slack allowed when comparing floating-point chain stages.
pub const CHAIN_TOLERANCE: f64 = 1e-12;

/// Largest denominator for which `ceil(n^eps)` is decided in exact arithmetic.
const EXACT_POW_MAX_DEN: u64 = 2000;

/// An exponent `eps` in `(0, 1)`, kept as an exact fraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Epsilon {
    num: u64,
    den: u64,
}

impl Epsilon {
    pub fn from_ratio(num: u64, den: u64) -> Result<Self> {
        if den == 0 || num == 0 || num >= den {
            return invalid(format!("eps = {num}/{den} is not in (0, 1)"));
        }
        let g = num.gcd(&den);
        Ok(Epsilon {
            num: num / g,
            den: den / g,
        })
    }

    /// Converts through the shortest decimal representation of `x`.
    pub fn from_f64(x: f64) -> Result<Self> {
        if !(x > 0.0 && x < 1.0) {
            return invalid(format!("eps = {x} is not in (0, 1)"));
        }
        format!("{x}").parse()
    }

    pub fn numer(&self) -> u64 {
        self.num
    }

    pub fn denom(&self) -> u64 {
        self.den
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn as_rational(&self) -> BigRational {
        BigRational::new(BigInt::from(self.num), BigInt::from(self.den))
    }

    /// `ceil(n^eps)`: the least integer `c` with `c^den >= n^num`.
    pub fn ceil_pow(&self, n: u64) -> u64 {
        let approx = (n as f64).powf(self.value()).ceil() as u64;
        if self.den > EXACT_POW_MAX_DEN {
            return approx;
        }
        let target = BigUint::from(n).pow(self.num as u32);
        let reaches = |c: u64| BigUint::from(c).pow(self.den as u32) >= target;
        let mut c = approx.saturating_sub(2).max(1);
        while !reaches(c) {
            c += 1;
        }
        while c > 1 && reaches(c - 1) {
            c -= 1;
        }
        c
    }
}

impl FromStr for Epsilon {
    type Err = Error;

    /// Accepts a decimal (`0.82`) or a fraction (`41/50`).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("cannot parse eps from {s:?}"));
        if let Some((a, b)) = s.split_once('/') {
            let num = a.trim().parse().map_err(|_| bad())?;
            let den = b.trim().parse().map_err(|_| bad())?;
            return Epsilon::from_ratio(num, den);
        }
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if !int.chars().all(|c| c.is_ascii_digit())
            || !frac.chars().all(|c| c.is_ascii_digit())
            || frac.len() > 15
            || (int.is_empty() && frac.is_empty())
        {
            return Err(bad());
        }
        let den = 10u64.pow(frac.len() as u32);
        let int: u64 = if int.is_empty() {
            0
        } else {
            int.parse().map_err(|_| bad())?
        };
        let frac_val: u64 = if frac.is_empty() {
            0
        } else {
            frac.parse().map_err(|_| bad())?
        };
        let num = int
            .checked_mul(den)
            .and_then(|x| x.checked_add(frac_val))
            .ok_or_else(bad)?;
        Epsilon::from_ratio(num, den)
    }
}

impl fmt::Display for Epsilon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

impl Serialize for Epsilon {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_f64(self.value())
    }
}

/// `ceil(log n)` for `n >= 2`.
pub fn ceil_log(n: u64) -> u64 {
    (n as f64).ln().ceil() as u64
}

/// Evaluation of the hypothesis window
/// `ceil((log n + 1)^2) < ceil(n^eps) <= n - 2 ceil(log n)` and the derived
/// summation ranges `K` and `A`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisReport {
    pub n: u64,
    pub eps: Epsilon,
    pub ceil_n_eps: u64,
    pub ceil_log: u64,
    pub ceil_log_sq: u64,
    /// `n - 2 ceil(log n)`; negative when the window lies beyond `n`.
    pub upper: i64,
    pub valid: bool,
    /// `floor(ceil(n^eps) / ceil(log n))`.
    pub k: u64,
    /// `floor(log2(ceil(log n)))`.
    pub a_int: u32,
    /// `log2(ceil(log n))`, generally not an integer.
    pub a_real: f64,
}

impl HypothesisReport {
    /// Names the violated inequality, if any.
    pub fn violation(&self) -> Option<String> {
        if self.ceil_log_sq >= self.ceil_n_eps {
            Some(format!(
                "ceil((log n + 1)^2) = {} < ceil(n^eps) = {} fails",
                self.ceil_log_sq, self.ceil_n_eps
            ))
        } else if self.ceil_n_eps as i64 > self.upper {
            Some(format!(
                "ceil(n^eps) = {} <= n - 2 ceil(log n) = {} fails",
                self.ceil_n_eps, self.upper
            ))
        } else {
            None
        }
    }

    fn require_valid(&self) -> Result<()> {
        match self.violation() {
            Some(v) => Err(Error::Hypothesis(format!(
                "n = {}, eps = {}: {v}",
                self.n, self.eps
            ))),
            None => Ok(()),
        }
    }
}

pub fn validate_hypotheses(n: u64, eps: Epsilon) -> Result<HypothesisReport> {
    if n < 2 {
        return invalid("n must be at least 2");
    }
    let ceil_n_eps = eps.ceil_pow(n);
    let ln = (n as f64).ln();
    let ceil_log = ceil_log(n);
    let ceil_log_sq = ((ln + 1.0) * (ln + 1.0)).ceil() as u64;
    let upper = n as i64 - 2 * ceil_log as i64;
    let a_int = 63 - ceil_log.leading_zeros();
    let mut report = HypothesisReport {
        n,
        eps,
        ceil_n_eps,
        ceil_log,
        ceil_log_sq,
        upper,
        valid: false,
        k: ceil_n_eps / ceil_log,
        a_int,
        a_real: (ceil_log as f64).log2(),
    };
    report.valid = report.violation().is_none();
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SumMode {
    /// Uses the exact `s_not(n - 2^a k, a)`.
    Exact,
    /// Uses the lower bound `(4(n - 2^a k))^{-1/2^a}` in place of `s_not`.
    Lemma,
}

/// Index pairs `(a, k)` of the double sum: odd `k <= K`, `first_a <= a <= A`.
fn summands(report: &HypothesisReport, first_a: u32) -> Vec<(u32, u64)> {
    let mut out = Vec::new();
    for k in (1..=report.k).step_by(2) {
        for a in first_a..=report.a_int {
            let block = (1u64 << a) * k;
            assert!(block <= report.ceil_n_eps, "2^a k exceeds ceil(n^eps)");
            assert!(
                2 * (1u64 << a) <= report.n - block,
                "2^a <= (n - 2^a k)/2 fails at a = {a}, k = {k}"
            );
            out.push((a, k));
        }
    }
    out
}

/// `sum_{k odd <= K} sum_{a = first_a}^{A} s_not(n - 2^a k, a) / (2^a k)`.
pub fn cycle_sum_rational(report: &HypothesisReport, first_a: u32) -> Result<BigRational> {
    report.require_valid()?;
    let mut acc = BigRational::zero();
    for (a, k) in summands(report, first_a) {
        let block = (1u64 << a) * k;
        let s = s_not((report.n - block) as usize, a)?;
        acc += s.as_rational() / BigRational::from_integer(BigInt::from(block));
    }
    Ok(acc)
}

fn cycle_sum_lemma(report: &HypothesisReport, first_a: u32) -> Result<f64> {
    report.require_valid()?;
    Ok(summands(report, first_a)
        .into_iter()
        .map(|(a, k)| {
            let two_a = (1u64 << a) as f64;
            let rest = (report.n as f64) - two_a * k as f64;
            (4.0 * rest).powf(-1.0 / two_a) / (two_a * k as f64)
        })
        .sum())
}

/// The first displayed lower bound on `p(n, eps)`; the exact mode is
/// rounded toward zero.
pub fn cycle_sum(n: u64, eps: Epsilon, mode: SumMode) -> Result<f64> {
    let report = validate_hypotheses(n, eps)?;
    match mode {
        SumMode::Exact => Ok(rational_to_f64_floor(&cycle_sum_rational(&report, 1)?)),
        SumMode::Lemma => cycle_sum_lemma(&report, 1),
    }
}

/// Successive lower bounds, each expected to be at most the previous one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundChain {
    pub sum_exact: f64,
    pub sum_lemma: f64,
    pub b_product: f64,
    pub b_integral: f64,
    pub b_eps_term: f64,
    pub b_half_eps: f64,
    pub b_final: f64,
    /// Set when the `a`-range of the sums is empty.
    pub degenerate: bool,
}

/// One adjacent comparison `lhs >= rhs - tolerance` in a chain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainLink {
    pub lhs: &'static str,
    pub rhs: &'static str,
    pub lhs_value: f64,
    pub rhs_value: f64,
    pub pass: bool,
}

const STAGE_NAMES: [&str; 7] = [
    "sum_exact",
    "sum_lemma",
    "b_product",
    "b_integral",
    "b_eps_term",
    "b_half_eps",
    "b_final",
];

impl BoundChain {
    pub fn stages(&self) -> [f64; 7] {
        [
            self.sum_exact,
            self.sum_lemma,
            self.b_product,
            self.b_integral,
            self.b_eps_term,
            self.b_half_eps,
            self.b_final,
        ]
    }

    pub fn links(&self) -> Vec<ChainLink> {
        let s = self.stages();
        (0..6)
            .map(|i| ChainLink {
                lhs: STAGE_NAMES[i],
                rhs: STAGE_NAMES[i + 1],
                lhs_value: s[i],
                rhs_value: s[i + 1],
                pass: s[i] >= s[i + 1] - CHAIN_TOLERANCE,
            })
            .collect()
    }

    pub fn is_monotone(&self) -> bool {
        self.links().iter().all(|l| l.pass)
    }
}

fn odd_harmonic(k: u64) -> f64 {
    (1..=k).step_by(2).map(|k| 1.0 / k as f64).sum()
}

fn valuation_sum(n: f64, first_a: u32, a_int: u32) -> f64 {
    (first_a..=a_int)
        .map(|a| {
            let two_a = (1u64 << a) as f64;
            1.0 / (two_a * n.powf(1.0 / two_a))
        })
        .sum()
}

/// The chain for `S_n`, ending at `eps/48`.
pub fn bound_chain(n: u64, eps: Epsilon) -> Result<BoundChain> {
    let report = validate_hypotheses(n, eps)?;
    report.require_valid()?;
    let nf = n as f64;
    let ln = nf.ln();
    let e = eps.value();
    let ln2 = std::f64::consts::LN_2;
    let inv_e = (-1.0f64).exp();
    let kf = report.k as f64;
    Ok(BoundChain {
        sum_exact: rational_to_f64_floor(&cycle_sum_rational(&report, 1)?),
        sum_lemma: cycle_sum_lemma(&report, 1)?,
        b_product: 0.25 * odd_harmonic(report.k) * valuation_sum(nf, 1, report.a_int),
        b_integral: (kf + 1.0).ln() / (8.0 * ln2 * ln)
            * (nf.powf(-1.0 / 2f64.powf(report.a_real)) - 1.0 / nf),
        b_eps_term: (e - (ln + 1.0).ln() / ln) * (inv_e - 1.0 / nf) / (8.0 * ln2),
        b_half_eps: e / (16.0 * ln2) * (inv_e - 1.0 / nf),
        b_final: e / 48.0,
        degenerate: report.a_int < 1,
    })
}

/// The chain for `A_n`: prefactor `2/3`, valuations from 2, ending at `eps/96`.
pub fn bound_chain_alternating(n: u64, eps: Epsilon) -> Result<BoundChain> {
    let report = validate_hypotheses(n, eps)?;
    report.require_valid()?;
    let nf = n as f64;
    let ln = nf.ln();
    let e = eps.value();
    let ln2 = std::f64::consts::LN_2;
    let inv_e = (-1.0f64).exp();
    let kf = report.k as f64;
    let two_thirds = BigRational::new(2.into(), 3.into());
    let degenerate = report.a_int < 2;
    Ok(BoundChain {
        sum_exact: rational_to_f64_floor(&(two_thirds * cycle_sum_rational(&report, 2)?)),
        sum_lemma: 2.0 / 3.0 * cycle_sum_lemma(&report, 2)?,
        b_product: 2.0 / 3.0 * 0.25 * odd_harmonic(report.k) * valuation_sum(nf, 2, report.a_int),
        b_integral: 2.0 / 3.0 * (kf + 1.0).ln() / (8.0 * ln2 * ln)
            * (nf.powf(-1.0 / 2f64.powf(report.a_real)) - 1.0 / nf.sqrt()),
        b_eps_term: 2.0 / 3.0 * (e - (ln + 1.0).ln() / ln) * (inv_e - 1.0 / nf.sqrt())
            / (8.0 * ln2),
        b_half_eps: 2.0 / 3.0 * e / (16.0 * ln2) * (inv_e - 1.0 / nf.sqrt()),
        b_final: e / 96.0,
        degenerate,
    })
}

/// Exact verification of both small-support lower bounds at one point.
#[derive(Debug, Clone, Serialize)]
pub struct TheoremCheck {
    pub hypothesis: HypothesisReport,
    pub p: ExactProportion,
    pub p_tilde: ExactProportion,
    /// `eps/48` as an exact fraction.
    pub bound: ExactProportion,
    /// `eps/96` as an exact fraction.
    pub bound_tilde: ExactProportion,
    pub pass_sn: bool,
    pub pass_an: bool,
}

fn eps_over(eps: Epsilon, d: u64) -> ExactProportion {
    ExactProportion::new(BigUint::from(eps.numer()), BigUint::from(eps.denom() * d))
}

/// Strict comparisons `p(n, eps) > eps/48` and `p~(n, eps) > eps/96` in exact
/// rationals. Fails with [`Error::Hypothesis`] outside the window.
pub fn theorem_check(n: u64, eps: Epsilon) -> Result<TheoremCheck> {
    let hypothesis = validate_hypotheses(n, eps)?;
    hypothesis.require_valid()?;
    let m = hypothesis.ceil_n_eps as usize;
    let p = p_exact(n as usize, m)?;
    let p_tilde = p_tilde_exact(n as usize, m)?;
    let bound = eps_over(eps, 48);
    let bound_tilde = eps_over(eps, 96);
    Ok(TheoremCheck {
        pass_sn: p > bound,
        pass_an: p_tilde > bound_tilde,
        hypothesis,
        p,
        p_tilde,
        bound,
        bound_tilde,
    })
}

/// The five rows of the classical-group table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// `SL_n(q) <= H <= GL_n(q)`, `n = l`.
    Gl,
    /// `SU_n(q) <= H <= GU_n(q)`, `n = l`.
    Gu,
    /// `Sp_n(q) <= H <= GSp_n(q)`, `n = 2l`.
    Sp,
    /// `SO_n(q) <= H <= GSO_n(q)`, `n = 2l + 1`.
    SoOdd,
    /// `SO^±_n(q) <= H <= GO^±_n(q)°`, `n = 2l`.
    SoEven,
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gl" | "sl" => Ok(Family::Gl),
            "gu" | "su" => Ok(Family::Gu),
            "sp" | "gsp" => Ok(Family::Sp),
            "so-odd" | "gso" => Ok(Family::SoOdd),
            "so-even" | "so+" | "so-" | "go" => Ok(Family::SoEven),
            other => Err(Error::Parse(format!("unknown family {other:?}"))),
        }
    }
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::Gl,
        Family::Gu,
        Family::Sp,
        Family::SoOdd,
        Family::SoEven,
    ];

    /// Natural dimension `n` as a function of the rank parameter `l`.
    pub fn dimension(self, l: u64) -> u64 {
        match self {
            Family::Gl | Family::Gu => l,
            Family::Sp | Family::SoEven => 2 * l,
            Family::SoOdd => 2 * l + 1,
        }
    }

    /// Inverse of [`Family::dimension`], if `n` is a valid dimension.
    pub fn rank_of(self, n: u64) -> Option<u64> {
        match self {
            Family::Gl | Family::Gu => Some(n),
            Family::Sp | Family::SoEven => (n % 2 == 0).then_some(n / 2),
            Family::SoOdd => (n % 2 == 1).then_some(n / 2),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FamilyConstants {
    pub family: Family,
    pub strictly_between: bool,
    pub alpha: u64,
    #[serde(serialize_with = "ser_ratio")]
    pub c1: Ratio<u64>,
    #[serde(serialize_with = "ser_ratio")]
    pub c2: Ratio<u64>,
}

fn ser_ratio<S: serde::Serializer>(r: &Ratio<u64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
}

impl FamilyConstants {
    /// `c1 * c2 / 48`, the coefficient of `eps` in the lower bound.
    pub fn bound_factor(&self) -> Ratio<u64> {
        self.c1 * self.c2 / Ratio::from_integer(48)
    }

    pub fn bound(&self, eps: Epsilon) -> f64 {
        let f = self.bound_factor();
        eps.value() * *f.numer() as f64 / *f.denom() as f64
    }

    /// Largest admissible `(-1)`-eigenspace dimension, `alpha * ceil(l^eps)`.
    pub fn r_max(&self, l: u64, eps: Epsilon) -> u64 {
        self.alpha * eps.ceil_pow(l)
    }
}

pub fn family_constants(family: Family, strictly_between: bool) -> FamilyConstants {
    let (alpha, c1) = match family {
        Family::Gl | Family::Gu => (1, Ratio::new(1, 2)),
        Family::Sp | Family::SoOdd | Family::SoEven => (2, Ratio::new(1, 4)),
    };
    let c2 = match family {
        Family::Sp | Family::SoOdd | Family::SoEven if strictly_between => Ratio::new(1, 4),
        _ => Ratio::one(),
    };
    FamilyConstants {
        family,
        strictly_between,
        alpha,
        c1,
        c2,
    }
}

/// `eps` values `i/den` for `i = 1..den` lying inside the window at `n`.
pub fn valid_grid(n: u64, den: u64) -> Vec<Epsilon> {
    (1..den)
        .filter_map(|i| Epsilon::from_ratio(i, den).ok())
        .filter(|&e| validate_hypotheses(n, e).map(|r| r.valid).unwrap_or(false))
        .collect()
}
