//! Exact probabilities with power-of-two denominators.
//!
//! Every event probability under uniform random orientation is `k / 2^m`, so
//! the natural exact type is a big numerator over a binary exponent. General
//! rationals (`BigRational`) are used only where non-dyadic constants appear.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign as BigSign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DyadicError {
    #[error("{0} exceeds 1 and is not a probability")]
    AboveOne(String),
    #[error("malformed dyadic literal {0:?}, expected NUM/2^EXP")]
    Malformed(String),
}

/// A probability `num / 2^exp` in lowest terms.
///
/// Normal form: `num` is odd, or `num == 0` and `exp == 0`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DyadicProb {
    num: BigUint,
    exp: u32,
}

impl DyadicProb {
    /// `num / 2^exp`, normalized; fails if the value exceeds 1.
    pub fn new(num: BigUint, exp: u32) -> Result<Self, DyadicError> {
        let p = Self::normalized(num, exp);
        if p.num > BigUint::one() << p.exp {
            return Err(DyadicError::AboveOne(p.to_string()));
        }
        Ok(p)
    }

    /// Builds the normal form without the `<= 1` check.
    pub(crate) fn normalized(mut num: BigUint, mut exp: u32) -> Self {
        if num.is_zero() {
            return DyadicProb { num, exp: 0 };
        }
        let tz = num.trailing_zeros().unwrap_or(0).min(u64::from(exp)) as u32;
        num >>= tz;
        exp -= tz;
        DyadicProb { num, exp }
    }

    /// `count / 2^exp` for an event count over `2^exp` equally likely outcomes.
    pub fn from_count(count: u64, exp: u32) -> Result<Self, DyadicError> {
        Self::new(BigUint::from(count), exp)
    }

    pub fn zero() -> Self {
        DyadicProb { num: BigUint::zero(), exp: 0 }
    }

    pub fn one() -> Self {
        DyadicProb { num: BigUint::one(), exp: 0 }
    }

    /// `(1/2)^e`.
    pub fn half_pow(e: u32) -> Self {
        DyadicProb { num: BigUint::one(), exp: e }
    }

    pub fn num(&self) -> &BigUint {
        &self.num
    }

    pub fn exp(&self) -> u32 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// `self * 2^e` if that is an integer.
    pub fn scaled_by_pow2(&self, e: u32) -> Option<BigUint> {
        (e >= self.exp).then(|| &self.num << (e - self.exp))
    }

    /// Numerator of `self` written over `2^e`, requiring `e >= self.exp()`.
    pub(crate) fn num_over(&self, e: u32) -> BigUint {
        debug_assert!(e >= self.exp);
        &self.num << (e - self.exp)
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::normalized(&self.num * &other.num, self.exp + other.exp)
    }

    /// Exact `self - other` as a signed value.
    pub fn minus(&self, other: &Self) -> SignedDyadic {
        SignedDyadic::from(self).sub(&SignedDyadic::from(other))
    }

    /// `1 - self`.
    pub fn complement(&self) -> Self {
        let e = self.exp;
        Self::normalized((BigUint::one() << e) - &self.num, e)
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(
            BigInt::from(self.num.clone()),
            BigInt::one() << self.exp,
        )
    }

    /// Float rendering; exact values live in the numerator and exponent.
    pub fn to_f64(&self) -> f64 {
        self.to_rational().to_f64().unwrap_or(f64::NAN)
    }
}

impl Ord for DyadicProb {
    fn cmp(&self, other: &Self) -> Ordering {
        let e = self.exp.max(other.exp);
        self.num_over(e).cmp(&other.num_over(e))
    }
}

impl PartialOrd for DyadicProb {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for DyadicProb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2^{}", self.num, self.exp)
    }
}

impl fmt::Debug for DyadicProb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn split_literal(s: &str) -> Option<(&str, u32)> {
    let (num, exp) = s.split_once("/2^")?;
    if num.is_empty() || !exp.bytes().all(|c| c.is_ascii_digit()) {
        return None;
    }
    Some((num, exp.parse().ok()?))
}

impl FromStr for DyadicProb {
    type Err = DyadicError;

    /// Parses the `NUM/2^EXP` form produced by `Display`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let malformed = || DyadicError::Malformed(s.to_string());
        let (num, exp) = split_literal(s).ok_or_else(malformed)?;
        if !num.bytes().all(|c| c.is_ascii_digit()) {
            return Err(malformed());
        }
        let num = BigUint::from_str(num).map_err(|_| malformed())?;
        Self::new(num, exp)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub enum Sign {
    #[serde(rename = "-")]
    Negative,
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "+")]
    Positive,
}

impl Sign {
    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Negative => -1,
            Sign::Zero => 0,
            Sign::Positive => 1,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Sign::Negative => "-",
            Sign::Zero => "0",
            Sign::Positive => "+",
        }
    }

    pub fn of<T: Signed>(x: &T) -> Sign {
        if x.is_positive() {
            Sign::Positive
        } else if x.is_negative() {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }
}

/// Signed dyadic rational, used for covariances.
///
/// `sign == Zero` exactly when the magnitude is zero. The magnitude is not
/// restricted to `[0, 1]`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SignedDyadic {
    sign: Sign,
    magnitude: DyadicProb,
}

impl SignedDyadic {
    /// `num / 2^exp` for a signed integer numerator.
    pub fn from_parts(num: BigInt, exp: u32) -> Self {
        let (sign, mag) = num.into_parts();
        let magnitude = DyadicProb::normalized(mag, exp);
        let sign = match sign {
            _ if magnitude.is_zero() => Sign::Zero,
            BigSign::Minus => Sign::Negative,
            _ => Sign::Positive,
        };
        SignedDyadic { sign, magnitude }
    }

    pub fn zero() -> Self {
        SignedDyadic { sign: Sign::Zero, magnitude: DyadicProb::zero() }
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn magnitude(&self) -> &DyadicProb {
        &self.magnitude
    }

    /// Signed numerator over `2^e`, requiring `e >= self.magnitude().exp()`.
    fn signed_num_over(&self, e: u32) -> BigInt {
        let mag = BigInt::from(self.magnitude.num_over(e));
        if self.sign == Sign::Negative {
            -mag
        } else {
            mag
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let e = self.magnitude.exp.max(other.magnitude.exp);
        Self::from_parts(self.signed_num_over(e) + other.signed_num_over(e), e)
    }

    pub fn neg(&self) -> Self {
        let sign = match self.sign {
            Sign::Negative => Sign::Positive,
            Sign::Positive => Sign::Negative,
            Sign::Zero => Sign::Zero,
        };
        SignedDyadic { sign, magnitude: self.magnitude.clone() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let sign = match self.sign.as_i8() * other.sign.as_i8() {
            1 => Sign::Positive,
            -1 => Sign::Negative,
            _ => return Self::zero(),
        };
        SignedDyadic { sign, magnitude: self.magnitude.mul(&other.magnitude) }
    }

    pub fn to_rational(&self) -> BigRational {
        let r = self.magnitude.to_rational();
        if self.sign == Sign::Negative {
            -r
        } else {
            r
        }
    }

    pub fn to_f64(&self) -> f64 {
        f64::from(self.sign.as_i8()) * self.magnitude.to_f64()
    }
}

impl From<&DyadicProb> for SignedDyadic {
    fn from(p: &DyadicProb) -> Self {
        let sign = if p.is_zero() { Sign::Zero } else { Sign::Positive };
        SignedDyadic { sign, magnitude: p.clone() }
    }
}

impl From<DyadicProb> for SignedDyadic {
    fn from(p: DyadicProb) -> Self {
        SignedDyadic::from(&p)
    }
}

impl Ord for SignedDyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let e = self.magnitude.exp.max(other.magnitude.exp);
        self.signed_num_over(e).cmp(&other.signed_num_over(e))
    }
}

impl PartialOrd for SignedDyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for SignedDyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sign == Sign::Negative {
            f.write_str("-")?;
        }
        fmt::Display::fmt(&self.magnitude, f)
    }
}

impl fmt::Debug for SignedDyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for SignedDyadic {
    type Err = DyadicError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let malformed = || DyadicError::Malformed(s.to_string());
        let (num, exp) = split_literal(s).ok_or_else(malformed)?;
        let digits = num.strip_prefix('-').unwrap_or(num);
        if digits.is_empty() || !digits.bytes().all(|c| c.is_ascii_digit()) {
            return Err(malformed());
        }
        let num = BigInt::from_str(num).map_err(|_| malformed())?;
        Ok(Self::from_parts(num, exp))
    }
}

/// Binomial coefficient as a big integer.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// `base^e` for a rational base and signed exponent.
pub fn rational_pow(base: &BigRational, e: i64) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..e.unsigned_abs() {
        acc *= base;
    }
    if e < 0 {
        acc.recip()
    } else {
        acc
    }
}

/// `p / q` as an exact rational.
pub fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Decimal rendering of an exact rational with `places` digits after the
/// point, rounded half to even.
pub fn format_decimal(x: &BigRational, places: usize) -> String {
    let scale = BigInt::from(10u32).pow(places as u32);
    let scaled = x.abs() * BigRational::from_integer(scale.clone());
    let (q, r) = scaled.numer().div_rem(scaled.denom());
    let twice = r * 2u32;
    let q = match twice.cmp(scaled.denom()) {
        Ordering::Greater => q + 1u32,
        Ordering::Equal if q.is_odd() => q + 1u32,
        _ => q,
    };
    let (int, frac) = q.div_rem(&scale);
    let sign = if x.is_negative() { "-" } else { "" };
    if places == 0 {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{:0>width$}", frac.to_string(), width = places)
    }
}
