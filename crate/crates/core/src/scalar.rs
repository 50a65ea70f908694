// SPDX-License-Identifier: Apache-2.0

//! Scalar abstraction shared by every engine.
//!
//! Predicates and probability products are written once against [`Scalar`]
//! and instantiated either with exact rationals ([`BigRational`]) or with
//! binary64 floats. Exact instances never round; the float instance treats
//! magnitudes at or below [`FLOAT_TOLERANCE`] as zero when a sign is asked for.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, Signed, ToPrimitive, Zero};

/// Default zero band for float-mode sign tests.
pub const FLOAT_TOLERANCE: f64 = 1e-9;

/// Numeric field used by the geometric predicates and probability engines.
pub trait Scalar:
    Clone + Debug + Display + PartialOrd + Num + Signed + Send + Sync + 'static
{
    /// `true` when arithmetic never rounds.
    const EXACT: bool;

    fn from_rational(r: &BigRational) -> Self;

    fn from_f64(x: f64) -> Self;

    fn to_f64(&self) -> f64;

    /// Sign in {-1, 0, +1}; float instances snap tiny magnitudes to zero.
    fn sign(&self) -> i8;

    fn is_negligible(&self) -> bool {
        self.sign() == 0
    }

    /// Exact rational value, when the instance carries one.
    fn to_rational(&self) -> Option<BigRational>;

    fn from_i64(v: i64) -> Self {
        Self::from_rational(&BigRational::from_integer(BigInt::from(v)))
    }

    fn half() -> Self {
        Self::one() / (Self::one() + Self::one())
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_rational(r: &BigRational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }

    fn from_f64(x: f64) -> Self {
        x
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn sign(&self) -> i8 {
        if self.abs() <= FLOAT_TOLERANCE {
            0
        } else if *self > 0.0 {
            1
        } else {
            -1
        }
    }

    fn to_rational(&self) -> Option<BigRational> {
        None
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }

    fn from_f64(x: f64) -> Self {
        BigRational::from_float(x).expect("finite float")
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn sign(&self) -> i8 {
        if self.is_zero() {
            0
        } else if self.is_positive() {
            1
        } else {
            -1
        }
    }

    fn to_rational(&self) -> Option<BigRational> {
        Some(self.clone())
    }
}

/// Parses a decimal literal (`"0.25"`, `"-3"`, `"1e-3"`) or a ratio (`"3/4"`) exactly.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let t = text.trim();
    if t.is_empty() {
        return None;
    }
    if let Some((num, den)) = t.split_once('/') {
        let n = BigInt::from_str_radix(num.trim(), 10).ok()?;
        let d = BigInt::from_str_radix(den.trim(), 10).ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(pos) => (&t[..pos], t[pos + 1..].parse::<i32>().ok()?),
        None => (t, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let joined = format!("{int_part}{frac_part}");
    let mut value = BigRational::from_integer(BigInt::from_str_radix(&joined, 10).ok()?);
    let scale = exponent - frac_part.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    if scale >= 0 {
        for _ in 0..scale {
            value *= ten.clone();
        }
    } else {
        for _ in 0..(-scale) {
            value /= ten.clone();
        }
    }
    if negative {
        value = -value;
    }
    Some(value)
}

/// Renders a rational as `"a/b"` (denominator always printed).
pub fn format_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Renders a rational as a decimal string with `digits` fractional digits (truncated).
pub fn format_decimal(r: &BigRational, digits: usize) -> String {
    let negative = r.is_negative();
    let abs = r.abs();
    let int = abs.numer() / abs.denom();
    let mut rem = abs.numer() % abs.denom();
    let mut out = String::new();
    if negative && !abs.is_zero() {
        out.push('-');
    }
    out.push_str(&int.to_string());
    if digits > 0 {
        out.push('.');
        let ten = BigInt::from(10);
        for _ in 0..digits {
            rem *= &ten;
            let digit = &rem / abs.denom();
            rem %= abs.denom();
            out.push_str(&digit.to_string());
        }
    }
    out
}

/// `n / d` as an exact rational.
pub fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimal_and_ratio_forms() {
        assert_eq!(parse_rational("0.25"), Some(rational(1, 4)));
        assert_eq!(parse_rational("3/4"), Some(rational(3, 4)));
        assert_eq!(parse_rational("-1.5"), Some(rational(-3, 2)));
        assert_eq!(parse_rational("1e-3"), Some(rational(1, 1000)));
        assert_eq!(parse_rational("2.5E1"), Some(rational(25, 1)));
        assert_eq!(parse_rational("7"), Some(rational(7, 1)));
        assert_eq!(parse_rational(".5"), Some(rational(1, 2)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
        assert_eq!(parse_rational(""), None);
    }

    #[test]
    fn float_sign_uses_tolerance() {
        assert_eq!(1e-12f64.sign(), 0);
        assert_eq!((-2.0f64).sign(), -1);
        assert_eq!(rational(-1, 1_000_000_000_000).sign(), -1);
    }

    #[test]
    fn formats() {
        assert_eq!(format_rational(&rational(3, 4)), "3/4");
        assert_eq!(format_rational(&rational(1, 1)), "1/1");
        assert_eq!(format_decimal(&rational(3, 4), 3), "0.750");
        assert_eq!(format_decimal(&rational(-1, 3), 4), "-0.3333");
    }
}
