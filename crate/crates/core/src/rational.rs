//! Exact non-negative rationals and power thresholds.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A non-negative rational number, always kept in lowest terms.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rational(Ratio<u64>);

impl Rational {
    /// Panics if `den` is zero.
    pub fn new(num: u64, den: u64) -> Self {
        assert!(den != 0, "zero denominator");
        Rational(Ratio::new(num, den))
    }

    pub fn integer(n: u64) -> Self {
        Rational(Ratio::from_integer(n))
    }

    /// The ratio `len / period` of a repetition.
    pub fn from_lengths(len: usize, period: usize) -> Self {
        Rational::new(len as u64, period as u64)
    }

    pub fn numer(&self) -> u64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> u64 {
        *self.0.denom()
    }

    /// Compares `len / period` against this value without building a fraction.
    pub fn cmp_lengths(&self, len: usize, period: usize) -> Ordering {
        let lhs = len as u128 * self.denom() as u128;
        let rhs = self.numer() as u128 * period as u128;
        lhs.cmp(&rhs)
    }

    /// Lossy conversion, for display and plotting only.
    pub fn to_f64(&self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom() == 1 {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = Error;

    /// Accepts `P/Q` or a bare integer. Decimal notation is rejected.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidRational(s.to_string());
        let digits = |t: &str| -> Result<u64> {
            if t.is_empty() || !t.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            t.parse::<u64>().map_err(|_| bad())
        };
        let s_trim = s.trim();
        match s_trim.split_once('/') {
            Some((n, d)) => {
                let (n, d) = (digits(n.trim())?, digits(d.trim())?);
                if d == 0 {
                    return Err(bad());
                }
                Ok(Rational::new(n, d))
            }
            None => Ok(Rational::integer(digits(s_trim)?)),
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A rational bound on exponents together with its strictness.
///
/// With `strict = false` the threshold forbids every exponent `>= value`
/// ("α-power-free"); with `strict = true` only exponents `> value` are
/// forbidden ("α⁺-power-free").
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PowerThreshold {
    pub value: Rational,
    pub strict: bool,
}

impl PowerThreshold {
    pub fn new(value: Rational, strict: bool) -> Result<Self> {
        if value < Rational::integer(1) {
            return Err(Error::ThresholdBelowOne(value.to_string()));
        }
        Ok(PowerThreshold { value, strict })
    }

    /// α-power-free: forbids exponents `>= value`.
    pub fn non_strict(value: Rational) -> Self {
        Self::new(value, false).expect("threshold below 1")
    }

    /// α⁺-power-free: forbids exponents `> value`.
    pub fn strict(value: Rational) -> Self {
        Self::new(value, true).expect("threshold below 1")
    }

    pub fn violated_by(&self, exponent: Rational) -> bool {
        if self.strict {
            exponent > self.value
        } else {
            exponent >= self.value
        }
    }

    /// Whether a repetition of length `len` with period `period` is forbidden.
    pub fn violated_by_lengths(&self, len: usize, period: usize) -> bool {
        match self.value.cmp_lengths(len, period) {
            Ordering::Greater => true,
            Ordering::Equal => !self.strict,
            Ordering::Less => false,
        }
    }

    /// Smallest length of a forbidden repetition with the given period.
    pub fn min_violating_len(&self, period: usize) -> usize {
        let num = self.value.numer() as u128 * period as u128;
        let den = self.value.denom() as u128;
        let len = if self.strict { num / den + 1 } else { num.div_ceil(den) };
        len as usize
    }
}

impl fmt::Display for PowerThreshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.strict {
            write!(f, "({})+", self.value)
        } else {
            write!(f, "{}", self.value)
        }
    }
}
