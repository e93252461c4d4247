//! Exact big-rational proportions of permutations with restricted cycle
//! lengths, and of permutations whose half-order power has bounded support.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{invalid, Result};
use crate::perm::{two_adic_valuation, Parity, PermGroup, Permutation};

/// Largest degree accepted by [`brute_force_proportion`].
pub const BRUTE_FORCE_MAX_N: usize = 10;

/// An exact proportion in `[0, 1]`, always in lowest terms.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactProportion(BigRational);

impl ExactProportion {
    pub fn new(numerator: BigUint, denominator: BigUint) -> Self {
        assert!(!denominator.is_zero(), "zero denominator");
        assert!(numerator <= denominator, "proportion exceeds 1");
        ExactProportion(BigRational::new(numerator.into(), denominator.into()))
    }

    pub fn zero() -> Self {
        ExactProportion(BigRational::zero())
    }

    pub fn from_ratio(num: u64, den: u64) -> Self {
        Self::new(BigUint::from(num), BigUint::from(den))
    }

    pub fn numerator(&self) -> BigUint {
        self.0.numer().to_biguint().expect("non-negative")
    }

    pub fn denominator(&self) -> BigUint {
        self.0.denom().to_biguint().expect("positive")
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    /// Nearest-below `f64` (rounded toward zero), so that `x.to_f64_floor() >= b`
    /// implies `x >= b`.
    pub fn to_f64_floor(&self) -> f64 {
        rational_to_f64_floor(&self.0)
    }

    /// Decimal expansion truncated to `digits` significant digits.
    pub fn decimal(&self, digits: usize) -> String {
        rational_decimal(&self.0, digits)
    }
}

impl fmt::Display for ExactProportion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl fmt::Debug for ExactProportion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExactProportion({self})")
    }
}

impl Serialize for ExactProportion {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("ExactProportion", 3)?;
        st.serialize_field("numerator", &self.0.numer().to_string())?;
        st.serialize_field("denominator", &self.0.denom().to_string())?;
        st.serialize_field("decimal", &self.decimal(20))?;
        st.end()
    }
}

/// Rounds a rational toward zero to the nearest `f64` with a 53-bit mantissa.
pub fn rational_to_f64_floor(x: &BigRational) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let sign = if x.is_negative() { -1.0 } else { 1.0 };
    let num = x.numer().abs().to_biguint().expect("abs");
    let den = x.denom().to_biguint().expect("positive");
    // scale so that the integer quotient has 53 or 54 bits
    let mut shift = 54 + den.bits() as i64 - num.bits() as i64;
    let mut quot = if shift >= 0 {
        (num << shift as usize) / &den
    } else {
        num / (den << (-shift) as usize)
    };
    while quot.bits() > 53 {
        quot >>= 1;
        shift -= 1;
    }
    let mantissa = quot.to_u64().expect("53 bits") as f64;
    sign * mantissa * 2f64.powi(-(shift as i32))
}

fn rational_decimal(x: &BigRational, digits: usize) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    let neg = x.is_negative();
    let num = x.numer().abs();
    let den = x.denom().clone();
    let int_part = &num / &den;
    let mut rem = &num % &den;
    let ten = BigInt::from(10);
    let mut out = int_part.to_string();
    let mut significant = if int_part.is_zero() { 0 } else { out.len() };
    let mut frac = String::new();
    while significant < digits && !rem.is_zero() {
        rem *= &ten;
        let d = &rem / &den;
        rem %= &den;
        if significant > 0 || !d.is_zero() {
            significant += 1;
        }
        frac.push_str(&d.to_string());
    }
    if !frac.is_empty() {
        out.push('.');
        out.push_str(&frac);
    }
    if neg {
        out.insert(0, '-');
    }
    out
}

/// Counts of even and odd permutations satisfying some condition.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ParityCountPair {
    pub even: BigUint,
    pub odd: BigUint,
}

impl ParityCountPair {
    pub fn total(&self) -> BigUint {
        &self.even + &self.odd
    }

    pub fn get(&self, parity: Parity) -> &BigUint {
        match parity {
            Parity::Even => &self.even,
            Parity::Odd => &self.odd,
        }
    }
}

/// Counts for every size `0..=max` of permutations whose cycle lengths all
/// satisfy `allowed`, split by parity.
///
/// Uses the recursion on the cycle through a distinguished point: a cycle of
/// length `c` through it can be chosen in `(j-1)!/(j-c)!` ways, and flips the
/// parity when `c` is even.
pub fn restricted_count_table(max: usize, allowed: impl Fn(usize) -> bool) -> Vec<ParityCountPair> {
    let mut table = Vec::with_capacity(max + 1);
    table.push(ParityCountPair {
        even: BigUint::one(),
        odd: BigUint::zero(),
    });
    for j in 1..=max {
        let mut even = BigUint::zero();
        let mut odd = BigUint::zero();
        let mut falling = BigUint::one();
        for c in 1..=j {
            if c > 1 {
                falling *= (j - c + 1) as u64;
            }
            if !allowed(c) {
                continue;
            }
            let rest: &ParityCountPair = &table[j - c];
            if c % 2 == 1 {
                even += &falling * &rest.even;
                odd += &falling * &rest.odd;
            } else {
                even += &falling * &rest.odd;
                odd += &falling * &rest.even;
            }
        }
        table.push(ParityCountPair { even, odd });
    }
    table
}

pub fn count_restricted(j: usize, allowed: impl Fn(usize) -> bool) -> ParityCountPair {
    restricted_count_table(j, allowed)
        .pop()
        .expect("table has j + 1 rows")
}

pub fn factorial(n: usize) -> BigUint {
    (1..=n as u64).fold(BigUint::one(), |acc, k| acc * k)
}

fn binomial(n: usize, k: usize) -> BigUint {
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= (n - i) as u64;
        acc /= (i + 1) as u64;
    }
    acc
}

/// Order of the alternating group of degree `n`, taking `A_1 = S_1`.
fn alternating_order(n: usize) -> BigUint {
    if n < 2 {
        BigUint::one()
    } else {
        factorial(n) / 2u32
    }
}

fn check_sa(l: usize, a: u32) -> Result<()> {
    if l == 0 {
        return invalid("degree must be at least 1");
    }
    if a == 0 || a >= usize::BITS {
        return invalid("valuation bound a must be positive");
    }
    Ok(())
}

fn no_cycle_divisible(l: usize, a: u32) -> ParityCountPair {
    let modulus = 1usize << a;
    count_restricted(l, |c| c % modulus != 0)
}

/// Proportion of `S_l` with no cycle length divisible by `2^a`.
pub fn s_not(l: usize, a: u32) -> Result<ExactProportion> {
    check_sa(l, a)?;
    Ok(ExactProportion::new(
        no_cycle_divisible(l, a).total(),
        factorial(l),
    ))
}

/// Proportion of `A_l` with no cycle length divisible by `2^a`.
pub fn a_not(l: usize, a: u32) -> Result<ExactProportion> {
    check_sa(l, a)?;
    Ok(ExactProportion::new(
        no_cycle_divisible(l, a).even,
        alternating_order(l),
    ))
}

/// Proportion of `S_l \ A_l` with no cycle length divisible by `2^a`.
pub fn c_not(l: usize, a: u32) -> Result<ExactProportion> {
    check_sa(l, a)?;
    if l < 2 {
        return invalid("the odd coset is empty for l < 2");
    }
    Ok(ExactProportion::new(
        no_cycle_divisible(l, a).odd,
        alternating_order(l),
    ))
}

/// Counts of elements of `S_n`, by the support size of `g^{|g|/2}`.
///
/// `by_support[s]` holds the even/odd counts of permutations of even order
/// whose half-order power moves exactly `s` points. Odd-order permutations
/// are not counted anywhere.
#[derive(Debug, Clone)]
pub struct SupportDistribution {
    pub n: usize,
    pub by_support: Vec<ParityCountPair>,
}

impl SupportDistribution {
    /// Sums over all `a >= 1` with `2^a <= max_support` and all supports
    /// `s <= max_support`: `C(n, s) * D_a(s) * F_a(n - s)`, where `D_a` counts
    /// permutations with every cycle length of valuation exactly `a` and `F_a`
    /// those with no cycle length divisible by `2^a`.
    pub fn compute(n: usize, max_support: usize) -> Self {
        let max_support = max_support.min(n);
        let valuations: Vec<u32> = (1..usize::BITS)
            .take_while(|&a| (1usize << a) <= max_support)
            .collect();
        let partials: Vec<Vec<ParityCountPair>> = valuations
            .par_iter()
            .map(|&a| {
                let step = 1usize << a;
                let d = restricted_count_table(max_support, |c| two_adic_valuation(c) == a);
                let f = restricted_count_table(n, |c| c % step != 0);
                let mut by_support = vec![ParityCountPair::default(); max_support + 1];
                for s in (step..=max_support).step_by(step) {
                    let choose = binomial(n, s);
                    let (ds, fr) = (&d[s], &f[n - s]);
                    by_support[s].even = &choose * (&ds.even * &fr.even + &ds.odd * &fr.odd);
                    by_support[s].odd = &choose * (&ds.even * &fr.odd + &ds.odd * &fr.even);
                }
                by_support
            })
            .collect();
        let mut by_support = vec![ParityCountPair::default(); max_support + 1];
        for part in partials {
            for (acc, x) in by_support.iter_mut().zip(part) {
                acc.even += x.even;
                acc.odd += x.odd;
            }
        }
        SupportDistribution { n, by_support }
    }

    /// Counts of even-order permutations whose involution has support `<= m`.
    pub fn cumulative(&self, m: usize) -> ParityCountPair {
        let mut acc = ParityCountPair::default();
        for x in self.by_support.iter().take(m + 1) {
            acc.even += &x.even;
            acc.odd += &x.odd;
        }
        acc
    }

    pub fn proportion(&self, m: usize, group: PermGroup) -> ExactProportion {
        let counts = self.cumulative(m);
        match group {
            PermGroup::Sn => ExactProportion::new(counts.total(), factorial(self.n)),
            PermGroup::An => ExactProportion::new(counts.even, alternating_order(self.n)),
        }
    }
}

fn check_nm(n: usize, m: usize) -> Result<()> {
    if n == 0 {
        return invalid("n must be at least 1");
    }
    if m < 1 || m > n {
        return invalid(format!(
            "support bound m = {m} must satisfy 1 <= m <= n = {n}"
        ));
    }
    Ok(())
}

/// Exact proportion of `g` in `S_n` with even order and `|supp(g^{|g|/2})| <= m`.
pub fn p_exact(n: usize, m: usize) -> Result<ExactProportion> {
    check_nm(n, m)?;
    Ok(SupportDistribution::compute(n, m).proportion(m, PermGroup::Sn))
}

/// As [`p_exact`], within `A_n`.
pub fn p_tilde_exact(n: usize, m: usize) -> Result<ExactProportion> {
    check_nm(n, m)?;
    if n < 3 {
        return invalid("alternating proportion needs n >= 3");
    }
    Ok(SupportDistribution::compute(n, m).proportion(m, PermGroup::An))
}

pub fn p_exact_in(group: PermGroup, n: usize, m: usize) -> Result<ExactProportion> {
    match group {
        PermGroup::Sn => p_exact(n, m),
        PermGroup::An => p_tilde_exact(n, m),
    }
}

/// In-place lexicographic successor; `false` after the last permutation.
fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len())
        .rev()
        .find(|&j| v[j] > v[i - 1])
        .expect("exists");
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Visits every element of `S_n` (or `A_n`).
pub fn for_each_permutation(n: usize, group: PermGroup, mut visit: impl FnMut(&Permutation)) {
    let mut images: Vec<usize> = (0..n).collect();
    loop {
        let g = Permutation::from_images(images.clone()).expect("bijection");
        if group == PermGroup::Sn || g.parity() == Parity::Even {
            visit(&g);
        }
        if !next_permutation(&mut images) {
            break;
        }
    }
}

/// Exact proportion of the elements of `S_n` or `A_n` satisfying `event`,
/// by enumerating the whole group.
pub fn brute_force_proportion(
    n: usize,
    event: impl Fn(&Permutation) -> bool,
    group: PermGroup,
) -> Result<ExactProportion> {
    if n == 0 {
        return invalid("n must be at least 1");
    }
    if n > BRUTE_FORCE_MAX_N {
        return invalid(format!("brute force is capped at n = {BRUTE_FORCE_MAX_N}"));
    }
    let (mut hits, mut total) = (0u64, 0u64);
    for_each_permutation(n, group, |g| {
        total += 1;
        if event(g) {
            hits += 1;
        }
    });
    Ok(ExactProportion::from_ratio(hits, total))
}

/// Compares an exact rational against a float lower bound: returns the
/// ordering of `lhs` relative to `rhs`, with `lhs` rounded toward zero.
pub fn compare_floor(lhs: &BigRational, rhs: f64) -> Ordering {
    rational_to_f64_floor(lhs)
        .partial_cmp(&rhs)
        .unwrap_or(Ordering::Less)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: u64, d: u64) -> ExactProportion {
        ExactProportion::from_ratio(n, d)
    }

    #[test]
    fn count_examples() {
        let all = count_restricted(4, |_| true);
        assert_eq!((all.even, all.odd), (12u32.into(), 12u32.into()));
        let odd = count_restricted(4, |c| c % 2 == 1);
        assert_eq!((odd.even, odd.odd), (9u32.into(), 0u32.into()));
        let ones = count_restricted(3, |c| c == 1);
        assert_eq!((ones.even, ones.odd), (1u32.into(), 0u32.into()));
        let empty = count_restricted(0, |_| false);
        assert_eq!((empty.even, empty.odd), (1u32.into(), 0u32.into()));
    }

    #[test]
    fn s_not_examples() {
        assert_eq!(s_not(2, 1).unwrap(), r(1, 2));
        assert_eq!(s_not(4, 1).unwrap(), r(3, 8));
        assert_eq!(s_not(4, 2).unwrap(), r(3, 4));
        assert!(s_not(0, 1).is_err());
        assert!(s_not(3, 0).is_err());
    }

    #[test]
    fn a_c_examples() {
        assert_eq!(a_not(3, 1).unwrap(), r(1, 1));
        assert_eq!(c_not(3, 1).unwrap(), r(0, 1));
        assert_eq!(a_not(1, 1).unwrap(), r(1, 1));
        assert!(c_not(1, 1).is_err());
    }

    #[test]
    fn p_exact_examples() {
        assert_eq!(p_exact(4, 2).unwrap(), r(1, 4));
        assert_eq!(p_exact(4, 4).unwrap(), r(5, 8));
        assert_eq!(p_tilde_exact(4, 4).unwrap(), r(3, 12));
        assert_eq!(p_tilde_exact(4, 2).unwrap(), r(0, 1));
        assert_eq!(p_tilde_exact(3, 3).unwrap(), r(0, 1));
        assert_eq!(p_exact(5, 1).unwrap(), r(0, 1));
        assert!(p_exact(4, 0).is_err());
        assert!(p_exact(4, 5).is_err());
        assert!(p_tilde_exact(2, 2).is_err());
    }

    #[test]
    fn brute_force_examples() {
        let even_order = brute_force_proportion(4, |g| g.has_even_order(), PermGroup::Sn).unwrap();
        assert_eq!(even_order, r(15, 24));
        let p = brute_force_proportion(1, |g| g.is_identity(), PermGroup::Sn).unwrap();
        assert_eq!(p, r(1, 1));
        assert!(brute_force_proportion(11, |_| true, PermGroup::Sn).is_err());
    }

    #[test]
    fn float_rounding_is_toward_zero() {
        let third = BigRational::new(1.into(), 3.into());
        let f = rational_to_f64_floor(&third);
        assert!(f <= 1.0 / 3.0);
        assert!((1.0 / 3.0 - f) < 1e-16);
        assert_eq!(
            rational_to_f64_floor(&BigRational::new(3.into(), 4.into())),
            0.75
        );
        let big = BigRational::new(BigInt::from(10).pow(40u32), 7.into());
        let g = rational_to_f64_floor(&big);
        assert!((g / (1e40 / 7.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn decimal_digits() {
        assert_eq!(r(1, 4).decimal(20), "0.25");
        assert_eq!(r(1, 3).decimal(5), "0.33333");
        assert_eq!(r(1, 60).decimal(4), "0.01666");
        assert_eq!(r(1, 1).decimal(20), "1");
        assert_eq!(r(0, 1).decimal(20), "0");
    }

    #[test]
    fn serializes_as_strings() {
        let json = serde_json::to_string(&r(3, 12)).unwrap();
        assert_eq!(
            json,
            r#"{"numerator":"1","denominator":"4","decimal":"0.25"}"#
        );
    }
}
