//! Exact rational arithmetic, trial-division factorization, and the
//! prime-power budget sums that drive the J_A filters.
//!
//! Every accept/reject comparison in the elimination filters goes through
//! [`Rational`]; floating point never enters a verdict.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num::rational::Ratio;
use num::Zero;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Exact fraction over `i64`, always stored reduced with positive denominator.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(Ratio<i64>);

impl Rational {
    /// `numerator / denominator`, reduced. Panics on a zero denominator.
    pub fn new(numerator: i64, denominator: i64) -> Self {
        assert!(denominator != 0, "rational with zero denominator");
        Rational(Ratio::new(numerator, denominator))
    }

    pub fn integer(n: i64) -> Self {
        Rational(Ratio::from_integer(n))
    }

    pub fn zero() -> Self {
        Rational(Ratio::zero())
    }

    pub fn numer(&self) -> i64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i64 {
        *self.0.denom()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.numer() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.numer() < 0
    }

    /// Smallest integer >= self.
    pub fn ceil(&self) -> i64 {
        self.0.ceil().to_integer()
    }

    /// Largest integer <= self.
    pub fn floor(&self) -> i64 {
        self.0.floor().to_integer()
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero");
        Rational(self.0.recip())
    }

    /// Decimal form when the denominator is of the shape 2^a 5^b (so the
    /// expansion terminates), canonical `n/d` form otherwise.
    pub fn decimal_or_fraction(&self) -> String {
        let mut d = self.denom();
        let mut k2 = 0u32;
        let mut k5 = 0u32;
        while d % 2 == 0 {
            d /= 2;
            k2 += 1;
        }
        while d % 5 == 0 {
            d /= 5;
            k5 += 1;
        }
        if d != 1 {
            return self.to_string();
        }
        let k = k2.max(k5);
        let scale = 10i64.pow(k);
        let scaled = self.numer() * (scale / self.denom());
        let sign = if scaled < 0 { "-" } else { "" };
        let abs = scaled.unsigned_abs();
        let int = abs / 10u64.pow(k);
        let frac = abs % 10u64.pow(k);
        if frac == 0 {
            return format!("{sign}{int}");
        }
        let mut frac_digits = format!("{frac:0width$}", width = k as usize);
        while frac_digits.ends_with('0') {
            frac_digits.pop();
        }
        format!("{sign}{int}.{frac_digits}")
    }
}

/// Shorthand constructor used pervasively in filters and tests.
pub fn rat(numerator: i64, denominator: i64) -> Rational {
    Rational::new(numerator, denominator)
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::integer(n)
    }
}

impl From<u64> for Rational {
    fn from(n: u64) -> Self {
        Rational::integer(i64::try_from(n).expect("value exceeds i64 range"))
    }
}

impl From<u32> for Rational {
    fn from(n: u32) -> Self {
        Rational::integer(i64::from(n))
    }
}

impl Add for Rational {
    type Output = Rational;
    fn add(self, rhs: Rational) -> Rational {
        Rational(self.0 + rhs.0)
    }
}

impl AddAssign for Rational {
    fn add_assign(&mut self, rhs: Rational) {
        self.0 += rhs.0;
    }
}

impl Sub for Rational {
    type Output = Rational;
    fn sub(self, rhs: Rational) -> Rational {
        Rational(self.0 - rhs.0)
    }
}

impl Mul for Rational {
    type Output = Rational;
    fn mul(self, rhs: Rational) -> Rational {
        Rational(self.0 * rhs.0)
    }
}

impl Div for Rational {
    type Output = Rational;
    fn div(self, rhs: Rational) -> Rational {
        assert!(!rhs.is_zero(), "division by zero rational");
        Rational(self.0 / rhs.0)
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl FromStr for Rational {
    type Err = Error;

    /// Accepts `p/q`, plain integers, and terminating decimals such as `9.5`
    /// (parsed exactly, never through floating point).
    fn from_str(s: &str) -> Result<Self> {
        let parse_err = || Error::Parse {
            input: s.to_string(),
            what: "rational",
        };
        let t = s.trim();
        if let Some((n, d)) = t.split_once('/') {
            let n: i64 = n.trim().parse().map_err(|_| parse_err())?;
            let d: i64 = d.trim().parse().map_err(|_| parse_err())?;
            if d == 0 {
                return Err(parse_err());
            }
            return Ok(Rational::new(n, d));
        }
        if let Some((int_part, frac_part)) = t.split_once('.') {
            let (negative, int_digits) = match int_part.strip_prefix('-') {
                Some(rest) => (true, rest),
                None => (false, int_part),
            };
            if int_digits.is_empty()
                || frac_part.is_empty()
                || frac_part.len() > 12
                || !int_digits.bytes().all(|b| b.is_ascii_digit())
                || !frac_part.bytes().all(|b| b.is_ascii_digit())
            {
                return Err(parse_err());
            }
            let int: i64 = int_digits.parse().map_err(|_| parse_err())?;
            let frac: i64 = frac_part.parse().map_err(|_| parse_err())?;
            let scale = 10i64.pow(frac_part.len() as u32);
            let numer = int
                .checked_mul(scale)
                .and_then(|v| v.checked_add(frac))
                .ok_or_else(parse_err)?;
            let value = Rational::new(numer, scale);
            return Ok(if negative { -value } else { value });
        }
        let n: i64 = t.parse().map_err(|_| parse_err())?;
        Ok(Rational::integer(n))
    }
}

/// Strictness of a budget comparison. The filters mix strict `<` and
/// non-strict `<=`, so it is always an explicit parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strictness {
    Strict,
    Inclusive,
}

impl Strictness {
    fn admits(self, value: Rational, budget: Rational) -> bool {
        match self {
            Strictness::Strict => value < budget,
            Strictness::Inclusive => value <= budget,
        }
    }
}

/// Prime factorization with strictly increasing primes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    /// Product of all p^a, i.e. the factored integer.
    pub fn value(&self) -> u64 {
        self.factors
            .iter()
            .map(|&(p, a)| p.pow(a))
            .product::<u64>()
            .max(1)
    }

    /// The maximal prime powers p^a exactly dividing the integer.
    pub fn prime_powers(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, a)| p.pow(a))
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|&(p, a)| {
                if a == 1 {
                    p.to_string()
                } else {
                    format!("{p}^{a}")
                }
            })
            .collect();
        write!(f, "{}", parts.join("·"))
    }
}

/// Trial-division factorization. Inputs in this crate stay far below 10^6.
pub fn factorize(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::FactorizeZero);
    }
    let mut factors = Vec::new();
    let mut rest = n;
    let mut push = |p: u64, rest: &mut u64| {
        let mut a = 0;
        while (*rest).is_multiple_of(p) {
            *rest /= p;
            a += 1;
        }
        if a > 0 {
            factors.push((p, a));
        }
    };
    push(2, &mut rest);
    let mut p = 3;
    while p * p <= rest {
        push(p, &mut rest);
        p += 2;
    }
    if rest > 1 {
        factors.push((rest, 1));
    }
    Ok(Factorization { factors })
}

/// The budget term n - 1/n shared by the basket sums and the prime-power
/// sums; strictly increasing in n.
pub fn r_minus_inv(n: u64) -> Rational {
    assert!(n >= 1, "r_minus_inv requires n >= 1");
    Rational::from(n) - rat(1, n as i64)
}

/// Sum of p^a - 1/p^a over the maximal prime powers dividing `j`.
///
/// This is the quantity bounded by the budgets of the J_A filters;
/// `sigma_j(1) = 0`.
pub fn sigma_j(j: u64) -> Rational {
    assert!(j >= 1, "sigma_j requires j >= 1");
    let f = factorize(j).expect("nonzero by assertion");
    f.prime_powers().map(r_minus_inv).sum()
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// All positive integers J whose prime-power sum [`sigma_j`] stays within
/// `budget`. Finite because each admissible prime power is below budget + 1.
pub fn enumerate_j_with_budget(budget: Rational, strictness: Strictness) -> Vec<u64> {
    if !strictness.admits(Rational::zero(), budget) {
        return Vec::new();
    }
    // Admissible prime powers grouped by prime; v - 1/v is increasing in v,
    // so the scan stops at the first inadmissible value.
    let mut groups: Vec<Vec<u64>> = Vec::new();
    let mut v = 2u64;
    while strictness.admits(r_minus_inv(v), budget) {
        if is_prime(v) {
            let mut powers = Vec::new();
            let mut w = v;
            while strictness.admits(r_minus_inv(w), budget) {
                powers.push(w);
                w *= v;
            }
            groups.push(powers);
        }
        v += 1;
    }
    let mut out = Vec::new();
    fn walk(
        groups: &[Vec<u64>],
        from: usize,
        product: u64,
        sum: Rational,
        budget: Rational,
        strictness: Strictness,
        out: &mut Vec<u64>,
    ) {
        out.push(product);
        for i in from..groups.len() {
            for &pa in &groups[i] {
                let next = sum + r_minus_inv(pa);
                if strictness.admits(next, budget) {
                    walk(groups, i + 1, product * pa, next, budget, strictness, out);
                }
            }
        }
    }
    walk(&groups, 0, 1, Rational::zero(), budget, strictness, &mut out);
    out.sort_unstable();
    out
}

/// All m >= 1 with m^2 dividing `n`, sorted ascending. Always contains 1.
pub fn square_divisors(n: u64) -> Vec<u64> {
    assert!(n >= 1, "square_divisors requires n >= 1");
    let mut out = Vec::new();
    let mut m = 1;
    while m * m <= n {
        if n.is_multiple_of(m * m) {
            out.push(m);
        }
        m += 1;
    }
    out
}

/// All positive divisors of `n`, sorted ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    assert!(n >= 1, "divisors requires n >= 1");
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d != n / d {
                large.push(n / d);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_is_reduced_with_positive_denominator() {
        let x = rat(-6, -4);
        assert_eq!((x.numer(), x.denom()), (3, 2));
        let y = rat(6, -4);
        assert_eq!((y.numer(), y.denom()), (-3, 2));
    }

    #[test]
    fn rational_display_and_decimal() {
        assert_eq!(rat(45, 2).to_string(), "45/2");
        assert_eq!(rat(8, 2).to_string(), "4");
        assert_eq!(rat(35, 4).decimal_or_fraction(), "8.75");
        assert_eq!(rat(3, 2).decimal_or_fraction(), "1.5");
        assert_eq!(rat(5, 1).decimal_or_fraction(), "5");
        assert_eq!(rat(-11, 4).decimal_or_fraction(), "-2.75");
        assert_eq!(rat(8, 3).decimal_or_fraction(), "8/3");
    }

    #[test]
    fn rational_parsing() {
        assert_eq!("19/2".parse::<Rational>().unwrap(), rat(19, 2));
        assert_eq!("9.5".parse::<Rational>().unwrap(), rat(19, 2));
        assert_eq!("-7.5".parse::<Rational>().unwrap(), rat(-15, 2));
        assert_eq!("-0.25".parse::<Rational>().unwrap(), rat(-1, 4));
        assert_eq!("5".parse::<Rational>().unwrap(), Rational::integer(5));
        assert!("1/0".parse::<Rational>().is_err());
        assert!("".parse::<Rational>().is_err());
        assert!("x".parse::<Rational>().is_err());
        assert!("1.2.3".parse::<Rational>().is_err());
    }

    #[test]
    fn factorize_examples() {
        let f = factorize(224).unwrap();
        assert_eq!(f.factors(), &[(2, 5), (7, 1)]);
        assert_eq!(f.to_string(), "2^5·7");
        assert_eq!(factorize(1).unwrap().factors(), &[]);
        assert_eq!(factorize(150).unwrap().factors(), &[(2, 1), (3, 1), (5, 2)]);
        assert_eq!(factorize(0), Err(Error::FactorizeZero));
    }

    #[test]
    fn sigma_j_examples() {
        assert_eq!(sigma_j(1), Rational::zero());
        assert_eq!(sigma_j(9), rat(80, 9));
        assert_eq!(sigma_j(14), rat(117, 14));
        assert_eq!(sigma_j(4), rat(15, 4));
    }

    #[test]
    fn j_budget_enumeration_examples() {
        assert_eq!(
            enumerate_j_with_budget(rat(19, 2), Strictness::Strict),
            vec![1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12, 14, 15, 20, 30]
        );
        assert_eq!(
            enumerate_j_with_budget(rat(11, 2), Strictness::Strict),
            vec![1, 2, 3, 4, 5, 6]
        );
        assert_eq!(
            enumerate_j_with_budget(rat(3, 2), Strictness::Strict),
            vec![1]
        );
        // Non-strict admits the boundary value sigma_j(2) = 3/2.
        assert_eq!(
            enumerate_j_with_budget(rat(3, 2), Strictness::Inclusive),
            vec![1, 2]
        );
    }

    #[test]
    fn square_divisor_examples() {
        assert_eq!(square_divisors(153), vec![1, 3]);
        assert_eq!(square_divisors(169), vec![1, 13]);
        assert_eq!(square_divisors(7), vec![1]);
        assert_eq!(square_divisors(80), vec![1, 2, 4]);
    }

    #[test]
    fn divisor_lists() {
        assert_eq!(divisors(224), vec![1, 2, 4, 7, 8, 14, 16, 28, 32, 56, 112, 224]);
        assert_eq!(divisors(1), vec![1]);
    }
}
