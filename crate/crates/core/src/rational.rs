//! Exact scalars.
//!
//! Every breakpoint, value and slope in this crate is a [`Rational`]: an
//! arbitrary-precision fraction kept in lowest terms with a positive
//! denominator. The type itself is `num_rational::BigRational`; this module
//! adds the handful of helpers the rest of the crate needs (parsing,
//! floor, powers of two, fixed-precision decimal rendering).

use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseRationalError {
    #[error("empty rational literal")]
    Empty,
    #[error("invalid rational literal `{0}`")]
    Invalid(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

/// Parses `p/q`, `p`, or a plain decimal such as `-0.125`.
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let s = text.trim();
    if s.is_empty() {
        return Err(ParseRationalError::Empty);
    }
    if let Some((num, den)) = s.split_once('/') {
        let num =
            BigInt::from_str(num.trim()).map_err(|_| ParseRationalError::Invalid(s.into()))?;
        let den =
            BigInt::from_str(den.trim()).map_err(|_| ParseRationalError::Invalid(s.into()))?;
        if den.is_zero() {
            return Err(ParseRationalError::ZeroDenominator(s.into()));
        }
        return Ok(Rational::new(num, den));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(ParseRationalError::Invalid(s.into()));
        }
        let negative = int.starts_with('-');
        let int_digits = int.trim_start_matches(['-', '+']);
        let int_part = if int_digits.is_empty() {
            BigInt::zero()
        } else {
            BigInt::from_str(int_digits).map_err(|_| ParseRationalError::Invalid(s.into()))?
        };
        let frac_part =
            BigInt::from_str(frac).map_err(|_| ParseRationalError::Invalid(s.into()))?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let magnitude = Rational::new(int_part * &scale + frac_part, scale);
        return Ok(if negative { -magnitude } else { magnitude });
    }
    BigInt::from_str(s)
        .map(Rational::from_integer)
        .map_err(|_| ParseRationalError::Invalid(s.into()))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// `2^e` for any integer exponent.
pub fn pow2(e: i64) -> Rational {
    let magnitude = BigInt::one() << e.unsigned_abs();
    if e >= 0 {
        Rational::from_integer(magnitude)
    } else {
        Rational::new(BigInt::one(), magnitude)
    }
}

pub fn floor(x: &Rational) -> BigInt {
    x.numer().div_floor(x.denom())
}

/// Floor as a machine integer; panics only if the value does not fit in `i64`.
pub fn floor_i64(x: &Rational) -> i64 {
    floor(x).to_i64().expect("floor out of i64 range")
}

pub fn ceil_i64(x: &Rational) -> i64 {
    x.numer()
        .div_ceil(x.denom())
        .to_i64()
        .expect("ceil out of i64 range")
}

/// Fractional part in `[0, 1)`.
pub fn frac(x: &Rational) -> Rational {
    x - Rational::from_integer(floor(x))
}

/// True when `n` is a (positive) power of two, including `1 = 2^0`.
pub fn is_power_of_two_int(n: &BigInt) -> bool {
    n.sign() == Sign::Plus && n.magnitude().count_ones() == 1
}

/// Returns `e` when `x = 2^e`.
pub fn log2_exact(x: &Rational) -> Option<i64> {
    if !x.is_positive() {
        return None;
    }
    let (n, d) = (x.numer(), x.denom());
    if !is_power_of_two_int(n) || !is_power_of_two_int(d) {
        return None;
    }
    let ne = n.bits() as i64 - 1;
    let de = d.bits() as i64 - 1;
    Some(ne - de)
}

pub fn is_dyadic(x: &Rational) -> bool {
    is_power_of_two_int(x.denom())
}

/// Renders `x` in scientific-free decimal form rounded (half away from
/// zero) to `digits` significant digits.
pub fn to_decimal(x: &Rational, digits: usize) -> String {
    assert!(digits >= 1, "at least one significant digit");
    if x.is_zero() {
        return "0".to_string();
    }
    let negative = x.is_negative();
    let a = x.abs();
    // exponent e with 10^e <= a < 10^(e+1)
    let ten = BigInt::from(10);
    let mut e = (a.numer().to_string().len() as i64) - (a.denom().to_string().len() as i64);
    let pow10 = |k: i64| -> Rational {
        let m = num_traits::pow(ten.clone(), k.unsigned_abs() as usize);
        if k >= 0 {
            Rational::from_integer(m)
        } else {
            Rational::new(BigInt::one(), m)
        }
    };
    while pow10(e) > a {
        e -= 1;
    }
    while pow10(e + 1) <= a {
        e += 1;
    }
    // scaled has `digits` integer digits before rounding
    let shift = digits as i64 - 1 - e;
    let scaled = &a * pow10(shift);
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let mut mantissa = floor(&(scaled + half));
    let mut shift = shift;
    if mantissa.to_string().len() > digits {
        // rounding carried into a new digit, e.g. 9.99 -> 10.0
        mantissa /= &ten;
        shift -= 1;
    }
    let mut body = mantissa.to_string();
    let out = if shift <= 0 {
        body.extend(std::iter::repeat_n('0', (-shift) as usize));
        body
    } else {
        let shift = shift as usize;
        if body.len() <= shift {
            let pad = shift - body.len();
            format!("0.{}{}", "0".repeat(pad), body)
        } else {
            let split = body.len() - shift;
            format!("{}.{}", &body[..split], &body[split..])
        }
    };
    let out = if out.contains('.') {
        out.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        out
    };
    if negative {
        format!("-{out}")
    } else {
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("7/3").unwrap(), ratio(7, 3));
        assert_eq!(parse_rational(" -4/6 ").unwrap(), ratio(-2, 3));
        assert_eq!(parse_rational("5").unwrap(), int(5));
        assert_eq!(parse_rational("-0.125").unwrap(), ratio(-1, 8));
        assert_eq!(parse_rational(".5").unwrap(), ratio(1, 2));
        assert!(matches!(
            parse_rational("1/0"),
            Err(ParseRationalError::ZeroDenominator(_))
        ));
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
        assert!(parse_rational("1.").is_err());
    }

    #[test]
    fn display_is_p_over_q() {
        assert_eq!(ratio(6, 4).to_string(), "3/2");
        assert_eq!(int(-5).to_string(), "-5");
        assert_eq!(ratio(3, -9).to_string(), "-1/3");
    }

    #[test]
    fn powers_and_floors() {
        assert_eq!(pow2(3), int(8));
        assert_eq!(pow2(-2), ratio(1, 4));
        assert_eq!(floor_i64(&ratio(-1, 2)), -1);
        assert_eq!(ceil_i64(&ratio(-1, 2)), 0);
        assert_eq!(frac(&ratio(-1, 4)), ratio(3, 4));
        assert_eq!(log2_exact(&ratio(1, 8)), Some(-3));
        assert_eq!(log2_exact(&int(1)), Some(0));
        assert_eq!(log2_exact(&ratio(3, 4)), None);
        assert_eq!(log2_exact(&int(-2)), None);
        assert!(is_dyadic(&ratio(5, 16)));
        assert!(!is_dyadic(&ratio(1, 3)));
    }

    #[test]
    fn decimals() {
        assert_eq!(to_decimal(&ratio(1, 3), 5), "0.33333");
        assert_eq!(to_decimal(&ratio(2, 3), 3), "0.667");
        assert_eq!(to_decimal(&int(1024), 20), "1024");
        assert_eq!(to_decimal(&int(123456), 2), "120000");
        assert_eq!(to_decimal(&ratio(-999, 1000), 2), "-1");
        assert_eq!(to_decimal(&ratio(1, 1000), 1), "0.001");
        assert_eq!(to_decimal(&int(0), 4), "0");
        assert_eq!(to_decimal(&ratio(1, 7), 20), "0.14285714285714285714");
    }
}
