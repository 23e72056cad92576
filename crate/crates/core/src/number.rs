//! Scalar types used for probabilities.
//!
//! Every computation runs in one of two modes: exact rationals backed by
//! arbitrary-precision integers, or binary64 floats. Algorithms are generic
//! over [`Number`] so the mode is fixed for the whole computation.

use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact rational probability.
pub type Exact = BigRational;

/// Tolerance used to validate float-mode distributions.
pub const FLOAT_SUM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NumberMode {
    Rational,
    Float,
}

impl Display for NumberMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NumberMode::Rational => f.write_str("rational"),
            NumberMode::Float => f.write_str("float"),
        }
    }
}

impl FromStr for NumberMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rational" => Ok(NumberMode::Rational),
            "float" => Ok(NumberMode::Float),
            other => Err(Error::Precondition(format!("unknown number mode {other:?}"))),
        }
    }
}

pub trait Number:
    Clone
    + Debug
    + Display
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + Zero
    + One
    + Signed
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + for<'a> Div<&'a Self, Output = Self>
    + 'static
{
    const MODE: NumberMode;

    fn from_ratio(r: &BigRational) -> Self;

    /// Converts a float. In rational mode the conversion is exact.
    fn from_f64(x: f64) -> Self;

    fn to_f64(&self) -> f64;

    /// True when `values` sum to one (exactly, or within
    /// [`FLOAT_SUM_TOLERANCE`] for floats).
    fn sums_to_one(values: &[Self]) -> bool;

    /// Canonical text: `"p/q"` in rational mode, shortest round-trip decimal
    /// for floats.
    fn to_text(&self) -> String;

    fn to_json(&self) -> serde_json::Value;

    fn from_usize(n: usize) -> Self {
        Self::from_ratio(&BigRational::from_integer(BigInt::from(n)))
    }

    fn parse_text(s: &str) -> Result<Self> {
        parse_rational(s).map(|r| Self::from_ratio(&r))
    }
}

impl Number for BigRational {
    const MODE: NumberMode = NumberMode::Rational;

    fn from_ratio(r: &BigRational) -> Self {
        r.clone()
    }

    fn from_f64(x: f64) -> Self {
        BigRational::from_float(x).unwrap_or_else(BigRational::zero)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn sums_to_one(values: &[Self]) -> bool {
        values.iter().fold(BigRational::zero(), |acc, v| acc + v).is_one()
    }

    fn to_text(&self) -> String {
        self.to_string()
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(self.to_string())
    }
}

impl Number for f64 {
    const MODE: NumberMode = NumberMode::Float;

    fn from_ratio(r: &BigRational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }

    fn from_f64(x: f64) -> Self {
        x
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn sums_to_one(values: &[Self]) -> bool {
        (values.iter().sum::<f64>() - 1.0).abs() <= FLOAT_SUM_TOLERANCE
    }

    fn to_text(&self) -> String {
        format!("{self:?}")
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Number::from_f64(*self).map(serde_json::Value::Number).unwrap_or(serde_json::Value::Null)
    }
}

/// Parses `"3/8"`, `"0.125"`, `"1e-3"` or `"7"` into an exact rational.
/// Decimal input is read digit by digit, so `"0.1"` is exactly 1/10.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Precondition(format!("cannot parse {s:?} as a number"));
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| bad())?;
        let den: BigInt = den.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(num, den));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("0{int_part}{frac_part}").parse().map_err(|_| bad())?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10u8);
    let mut value = BigRational::from_integer(digits);
    if scale >= 0 {
        value *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if negative { -value } else { value })
}

/// Shorthand for `p/q` as an exact rational.
pub fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals_exactly() {
        assert_eq!(parse_rational("1/3").unwrap(), ratio(1, 3));
        assert_eq!(parse_rational("0.1").unwrap(), ratio(1, 10));
        assert_eq!(parse_rational("-2.50").unwrap(), ratio(-5, 2));
        assert_eq!(parse_rational("1e-3").unwrap(), ratio(1, 1000));
        assert_eq!(parse_rational("7").unwrap(), ratio(7, 1));
        assert_eq!(parse_rational(".5").unwrap(), ratio(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn float_sum_tolerance() {
        assert!(f64::sums_to_one(&[0.1, 0.2, 0.7]));
        assert!(!f64::sums_to_one(&[0.1, 0.2, 0.6]));
        assert!(BigRational::sums_to_one(&[ratio(1, 3), ratio(2, 3)]));
        assert!(!BigRational::sums_to_one(&[ratio(1, 3), ratio(1, 3)]));
    }

    #[test]
    fn text_forms() {
        assert_eq!(ratio(2, 4).to_text(), "1/2");
        assert_eq!(0.5f64.to_text(), "0.5");
        assert_eq!(<f64 as Number>::parse_text("1/4").unwrap(), 0.25);
    }
}
