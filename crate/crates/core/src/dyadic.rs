//! Exact nonnegative dyadic rationals `k / 2^n`.
//!
//! Every mass, capacity, flow and threshold in the crate is a [`Dyadic`].
//! Numerators are arbitrary precision, so addition and multiplication never
//! lose information; the only failure modes are negative results, values that
//! are not dyadic at all, and rescaling to a denominator that is too coarse.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Mul};
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DyadicError {
    #[error("subtraction would produce a negative value")]
    NegativeResult,
    #[error("{value} is not representable with denominator 2^{exponent}")]
    PrecisionLoss { value: String, exponent: u32 },
    #[error("{0} is not a dyadic rational")]
    NonDyadic(String),
    #[error("negative values are not dyadic masses: {0}")]
    Negative(String),
    #[error("exponent overflow")]
    Overflow,
    #[error("cannot parse dyadic {0:?}")]
    Syntax(String),
}

/// A nonnegative dyadic rational in canonical form: the numerator is odd
/// whenever the exponent is positive, and zero is `0 / 2^0`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    numerator: BigUint,
    exponent: u32,
}

impl Dyadic {
    pub fn new(numerator: impl Into<BigUint>, exponent: u32) -> Self {
        Self::canonical(numerator.into(), exponent)
    }

    fn canonical(mut numerator: BigUint, mut exponent: u32) -> Self {
        if numerator.is_zero() {
            return Self { numerator, exponent: 0 };
        }
        let twos = numerator.trailing_zeros().unwrap_or(0);
        let shift = twos.min(u64::from(exponent)) as u32;
        if shift > 0 {
            numerator >>= shift;
            exponent -= shift;
        }
        Self { numerator, exponent }
    }

    pub fn zero() -> Self {
        Self { numerator: BigUint::zero(), exponent: 0 }
    }

    pub fn one() -> Self {
        Self { numerator: BigUint::one(), exponent: 0 }
    }

    pub fn from_int(n: u64) -> Self {
        Self::new(n, 0)
    }

    /// `2^-k`.
    pub fn pow2_neg(k: u32) -> Self {
        Self { numerator: BigUint::one(), exponent: k }
    }

    /// Builds `numerator / denominator`, rejecting denominators that are not
    /// powers of two after reduction.
    pub fn from_ratio(numerator: u64, denominator: u64) -> Result<Self, DyadicError> {
        Self::from_big_ratio(BigUint::from(numerator), BigUint::from(denominator))
    }

    fn from_big_ratio(numerator: BigUint, denominator: BigUint) -> Result<Self, DyadicError> {
        if denominator.is_zero() {
            return Err(DyadicError::NonDyadic(format!("{numerator}/0")));
        }
        let g = numerator.gcd(&denominator);
        let (n, d) = (&numerator / &g, &denominator / &g);
        let exponent = d.trailing_zeros().unwrap_or(0);
        if d != BigUint::one() << exponent {
            return Err(DyadicError::NonDyadic(format!("{numerator}/{denominator}")));
        }
        let exponent = u32::try_from(exponent).map_err(|_| DyadicError::Overflow)?;
        Ok(Self::canonical(n, exponent))
    }

    pub fn numerator(&self) -> &BigUint {
        &self.numerator
    }

    /// Smallest `n` with `self ∈ Dyad_n`.
    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.exponent == 0 && self.numerator.is_one()
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, DyadicError> {
        let e = self.exponent.max(other.exponent);
        let a = &self.numerator << (e - self.exponent);
        let b = &other.numerator << (e - other.exponent);
        if a < b {
            return Err(DyadicError::NegativeResult);
        }
        Ok(Self::canonical(a - b, e))
    }

    /// `|self - other|`.
    pub fn abs_diff(&self, other: &Self) -> Self {
        match self.cmp(other) {
            Ordering::Less => other.checked_sub(self).expect("ordered"),
            _ => self.checked_sub(other).expect("ordered"),
        }
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, DyadicError> {
        let e = self.exponent.checked_add(other.exponent).ok_or(DyadicError::Overflow)?;
        Ok(Self::canonical(&self.numerator * &other.numerator, e))
    }

    /// `self / 2^k`.
    pub fn shr(&self, k: u32) -> Result<Self, DyadicError> {
        let e = self.exponent.checked_add(k).ok_or(DyadicError::Overflow)?;
        Ok(Self::canonical(self.numerator.clone(), e))
    }

    /// Returns `self · 2^n` as an integer.
    pub fn rescale(&self, n: u32) -> Result<BigUint, DyadicError> {
        if self.exponent > n {
            return Err(DyadicError::PrecisionLoss { value: self.to_string(), exponent: n });
        }
        Ok(&self.numerator << (n - self.exponent))
    }

    /// Inverse of [`rescale`](Self::rescale): `k / 2^n`.
    pub fn from_scaled(k: BigUint, n: u32) -> Self {
        Self::canonical(k, n)
    }

    /// Integer multiple `self · k`.
    pub fn times(&self, k: u64) -> Self {
        Self::canonical(&self.numerator * BigUint::from(k), self.exponent)
    }

    pub fn min(self, other: Self) -> Self {
        if other < self { other } else { self }
    }

    pub fn max(self, other: Self) -> Self {
        if other > self { other } else { self }
    }

    /// Lossy conversion for reporting only.
    pub fn to_f64(&self) -> f64 {
        let n = self.numerator.to_f64().unwrap_or(f64::INFINITY);
        n / 2f64.powi(self.exponent as i32)
    }
}

/// Largest exponent among the given values; `0` for an empty input.
pub fn common_exponent<'a>(values: impl IntoIterator<Item = &'a Dyadic>) -> u32 {
    values.into_iter().map(Dyadic::exponent).max().unwrap_or(0)
}

impl Default for Dyadic {
    fn default() -> Self {
        Self::zero()
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let e = self.exponent.max(other.exponent);
        let a = &self.numerator << (e - self.exponent);
        let b = &other.numerator << (e - other.exponent);
        a.cmp(&b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &Dyadic {
    type Output = Dyadic;

    fn add(self, other: &Dyadic) -> Dyadic {
        let e = self.exponent.max(other.exponent);
        let a = &self.numerator << (e - self.exponent);
        let b = &other.numerator << (e - other.exponent);
        Dyadic::canonical(a + b, e)
    }
}

impl Add for Dyadic {
    type Output = Dyadic;

    fn add(self, other: Dyadic) -> Dyadic {
        &self + &other
    }
}

impl Mul for &Dyadic {
    type Output = Dyadic;

    /// Panics only if the exponent sum overflows `u32`.
    fn mul(self, other: &Dyadic) -> Dyadic {
        self.checked_mul(other).expect("dyadic exponent overflow")
    }
}

impl Sum for Dyadic {
    fn sum<I: Iterator<Item = Dyadic>>(iter: I) -> Self {
        iter.fold(Dyadic::zero(), |acc, x| &acc + &x)
    }
}

impl<'a> Sum<&'a Dyadic> for Dyadic {
    fn sum<I: Iterator<Item = &'a Dyadic>>(iter: I) -> Self {
        iter.fold(Dyadic::zero(), |acc, x| &acc + x)
    }
}

impl From<u64> for Dyadic {
    fn from(n: u64) -> Self {
        Self::from_int(n)
    }
}

/// Prints `k/2^n`, or a bare integer when the exponent is zero.
impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponent == 0 {
            write!(f, "{}", self.numerator)
        } else {
            write!(f, "{}/2^{}", self.numerator, self.exponent)
        }
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Accepts `k/2^n`, `k`, and `p/q` where `q` reduces to a power of two.
impl FromStr for Dyadic {
    type Err = DyadicError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.starts_with('-') {
            return Err(DyadicError::Negative(s.to_string()));
        }
        let int = |t: &str| -> Result<BigUint, DyadicError> {
            if t.is_empty() || !t.bytes().all(|b| b.is_ascii_digit()) {
                return Err(DyadicError::Syntax(s.to_string()));
            }
            t.parse::<BigUint>().map_err(|_| DyadicError::Syntax(s.to_string()))
        };
        match s.split_once('/') {
            None => Ok(Self::canonical(int(s)?, 0)),
            Some((num, den)) => {
                let num = int(num)?;
                match den.strip_prefix("2^") {
                    Some(exp) => {
                        let exp: u32 = exp.parse().map_err(|_| DyadicError::Syntax(s.to_string()))?;
                        Ok(Self::canonical(num, exp))
                    }
                    None => Self::from_big_ratio(num, int(den)?),
                }
            }
        }
    }
}
