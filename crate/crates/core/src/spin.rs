//! Exact spin and outcome values.
//!
//! A spin `s` is stored as the integer `2s` and outcome values as twice their
//! value. Every coefficient that appears in the protocol is a multiple of one
//! half, so outcome arithmetic never leaves the integers.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A spin quantum number `s = twice_s / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SpinValue {
    twice_s: u32,
}

impl SpinValue {
    /// Builds a spin from `2s`. Negative values are rejected.
    pub fn from_twice(twice_s: i64) -> Result<Self> {
        if twice_s < 0 {
            return Err(Error::NegativeSpin(twice_s));
        }
        let twice_s = u32::try_from(twice_s)
            .map_err(|_| Error::Config(format!("spin 2s = {twice_s} is too large")))?;
        Ok(Self { twice_s })
    }

    pub fn twice(self) -> u32 {
        self.twice_s
    }

    /// Hilbert space dimension `2s + 1`.
    pub fn dimension(self) -> u32 {
        self.twice_s + 1
    }

    pub fn is_integer_spin(self) -> bool {
        self.twice_s.is_multiple_of(2)
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.twice_s) / 2.0
    }

    /// `s` as an outcome-valued half integer.
    pub fn as_half_integer(self) -> HalfIntegerValue {
        HalfIntegerValue::from_twice(i64::from(self.twice_s))
    }

    /// The spectrum `s, s-1, ..., -s` of a spin component, largest first.
    pub fn outcome_support(self) -> Vec<HalfIntegerValue> {
        let t = i64::from(self.twice_s);
        (0..=t).map(|k| HalfIntegerValue::from_twice(t - 2 * k)).collect()
    }

    /// Closed form `-s(s+1)/3` of the singlet correlation per unit `a.b`.
    pub fn singlet_correlation_factor(self) -> f64 {
        let s = self.as_f64();
        -s * (s + 1.0) / 3.0
    }
}

/// Builds a spin from `2s`; same as [`SpinValue::from_twice`].
pub fn make_spin(twice_s: i64) -> Result<SpinValue> {
    SpinValue::from_twice(twice_s)
}

impl fmt::Display for SpinValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.as_half_integer().fmt(f)
    }
}

impl FromStr for SpinValue {
    type Err = Error;

    /// Accepts `"3"`, `"3/2"` and `"1.5"`. Decimal input must end in `.0` or `.5`.
    fn from_str(s: &str) -> Result<Self> {
        let text = s.trim();
        let bad = || Error::SpinParse(s.to_string());
        let twice: i64 = if let Some((num, den)) = text.split_once('/') {
            let num: i64 = num.trim().parse().map_err(|_| bad())?;
            match den.trim() {
                "2" => num,
                "1" => num.checked_mul(2).ok_or_else(bad)?,
                _ => return Err(bad()),
            }
        } else if let Some((whole, frac)) = text.split_once('.') {
            let whole: i64 = if whole.is_empty() || whole == "-" {
                0
            } else {
                whole.parse().map_err(|_| bad())?
            };
            if whole < 0 || text.starts_with('-') {
                return Err(Error::NegativeSpin(-1));
            }
            let frac = frac.trim_end_matches('0');
            let half = match frac {
                "" => 0,
                "5" => 1,
                _ => return Err(bad()),
            };
            whole.checked_mul(2).ok_or_else(bad)? + half
        } else {
            let whole: i64 = text.parse().map_err(|_| bad())?;
            whole.checked_mul(2).ok_or_else(bad)?
        };
        SpinValue::from_twice(twice)
    }
}

impl Serialize for SpinValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.as_half_integer().serialize(serializer)
    }
}

/// An exact half integer `twice_value / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct HalfIntegerValue {
    twice_value: i64,
}

impl HalfIntegerValue {
    pub const ZERO: Self = Self { twice_value: 0 };

    pub const fn from_twice(twice_value: i64) -> Self {
        Self { twice_value }
    }

    pub const fn from_integer(value: i64) -> Self {
        Self { twice_value: 2 * value }
    }

    pub const fn twice(self) -> i64 {
        self.twice_value
    }

    pub fn as_f64(self) -> f64 {
        self.twice_value as f64 / 2.0
    }

    pub fn is_integer(self) -> bool {
        self.twice_value % 2 == 0
    }

    /// Multiplication by a sign `+1` or `-1`.
    pub fn signed(self, sign: i8) -> Self {
        debug_assert!(sign == 1 || sign == -1);
        Self::from_twice(self.twice_value * i64::from(sign))
    }

    /// Product of two half integers, in units of one quarter (`4 * self * other`).
    pub fn quarter_product(self, other: Self) -> i64 {
        self.twice_value * other.twice_value
    }
}

impl Add for HalfIntegerValue {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::from_twice(self.twice_value + rhs.twice_value)
    }
}

impl Sub for HalfIntegerValue {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::from_twice(self.twice_value - rhs.twice_value)
    }
}

impl Neg for HalfIntegerValue {
    type Output = Self;
    fn neg(self) -> Self {
        Self::from_twice(-self.twice_value)
    }
}

impl Mul<i64> for HalfIntegerValue {
    type Output = Self;
    fn mul(self, rhs: i64) -> Self {
        Self::from_twice(self.twice_value * rhs)
    }
}

impl fmt::Display for HalfIntegerValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.twice_value / 2)
        } else {
            write!(f, "{}/2", self.twice_value)
        }
    }
}

impl FromStr for HalfIntegerValue {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let text = s.trim();
        let bad = || Error::SpinParse(s.to_string());
        if let Some(num) = text.strip_suffix("/2") {
            Ok(Self::from_twice(num.trim().parse().map_err(|_| bad())?))
        } else {
            let v: i64 = text.parse().map_err(|_| bad())?;
            Ok(Self::from_integer(v))
        }
    }
}

/// Integers serialize as JSON numbers, proper halves as `"p/2"` strings.
impl Serialize for HalfIntegerValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_integer() {
            serializer.serialize_i64(self.twice_value / 2)
        } else {
            serializer.collect_str(self)
        }
    }
}

impl<'de> Deserialize<'de> for HalfIntegerValue {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Int(i64),
            Text(String),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Int(v) => Ok(Self::from_integer(v)),
            Repr::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(twice: i64) -> HalfIntegerValue {
        HalfIntegerValue::from_twice(twice)
    }

    #[test]
    fn make_spin_examples() {
        let half = make_spin(1).unwrap();
        assert_eq!(half.as_f64(), 0.5);
        assert_eq!(half.dimension(), 2);
        assert!(!half.is_integer_spin());

        let three = make_spin(6).unwrap();
        assert_eq!(three.as_f64(), 3.0);
        assert_eq!(three.dimension(), 7);
        assert!(three.is_integer_spin());

        let zero = make_spin(0).unwrap();
        assert_eq!(zero.dimension(), 1);

        assert_eq!(make_spin(-1), Err(Error::NegativeSpin(-1)));
    }

    #[test]
    fn outcome_support_examples() {
        assert_eq!(make_spin(2).unwrap().outcome_support(), vec![h(2), h(0), h(-2)]);
        assert_eq!(make_spin(1).unwrap().outcome_support(), vec![h(1), h(-1)]);
        assert_eq!(make_spin(0).unwrap().outcome_support(), vec![h(0)]);
    }

    #[test]
    fn parse_spin_forms() {
        let p = |s: &str| s.parse::<SpinValue>().map(SpinValue::twice);
        assert_eq!(p("3"), Ok(6));
        assert_eq!(p("3/2"), Ok(3));
        assert_eq!(p("1.5"), Ok(3));
        assert_eq!(p("2.0"), Ok(4));
        assert_eq!(p("0"), Ok(0));
        assert_eq!(p(" 15/2 "), Ok(15));
        assert!(p("1.25").is_err());
        assert!(p("3/4").is_err());
        assert!(p("abc").is_err());
        assert!(p("-1").is_err());
        assert!(p("-0.5").is_err());
    }

    #[test]
    fn half_integer_display_and_json() {
        assert_eq!(h(3).to_string(), "3/2");
        assert_eq!(h(-4).to_string(), "-2");
        assert_eq!(serde_json::to_string(&h(-3)).unwrap(), "\"-3/2\"");
        assert_eq!(serde_json::to_string(&h(4)).unwrap(), "2");
        let back: HalfIntegerValue = serde_json::from_str("\"-3/2\"").unwrap();
        assert_eq!(back, h(-3));
        let back: HalfIntegerValue = serde_json::from_str("-1").unwrap();
        assert_eq!(back, h(-2));
    }

    #[test]
    fn quarter_product_is_exact() {
        // (3/2) * (-1/2) = -3/4
        assert_eq!(h(3).quarter_product(h(-1)), -3);
    }
}
