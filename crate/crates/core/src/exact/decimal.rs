//! Decimal rendering of exact values. Output here is for humans and logs;
//! exact triples remain the authoritative form.

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{Signed, Zero};

use super::rational::Rational;

fn pow10(e: u32) -> BigInt {
    num_traits::pow(BigInt::from(10), e as usize)
}

/// `floor(sqrt(v) * 10^places)` for a nonnegative rational `v`.
pub fn sqrt_decimal(v: &Rational, places: u32) -> BigInt {
    assert!(!v.is_negative(), "sqrt_decimal of a negative value");
    let scaled = v.numer() * pow10(2 * places) / v.denom();
    scaled.sqrt()
}

/// Formats `q` in scientific notation with `digits` significant digits,
/// rounding half away from zero, e.g. `3.00000000000000e-1`.
pub fn to_scientific(q: &Rational, digits: usize) -> String {
    let digits = digits.max(1);
    if q.is_zero() {
        return "0".to_string();
    }
    let negative = q.is_negative();
    let a = q.abs();
    // Exponent estimate from digit counts, corrected below.
    let mut exp = a.numer().to_string().len() as i64 - a.denom().to_string().len() as i64;
    let ten = Rational::from_integer(BigInt::from(10));
    let pow = |e: i64| -> Rational {
        if e >= 0 {
            Rational::from_integer(pow10(e as u32))
        } else {
            Rational::from_integer(pow10((-e) as u32)).recip()
        }
    };
    while a < pow(exp) {
        exp -= 1;
    }
    while a >= pow(exp) * &ten {
        exp += 1;
    }
    let shift = digits as i64 - 1 - exp;
    let scaled = &a * pow(shift);
    let mut mantissa = (scaled + Rational::new(BigInt::from(1), BigInt::from(2))).floor().to_integer();
    if mantissa >= pow10(digits as u32) {
        mantissa /= 10;
        exp += 1;
    }
    let m = mantissa.to_string();
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    out.push_str(&m[..1]);
    if m.len() > 1 {
        out.push('.');
        out.push_str(&m[1..]);
    }
    out.push_str(&format!("e{exp}"));
    out
}

pub(crate) fn signed_sqrt_fixed(coef: &Rational, radicand: &BigUint, places: u32) -> BigInt {
    let square = coef * coef * Rational::from_integer(BigInt::from(radicand.clone()));
    let magnitude = sqrt_decimal(&square, places);
    if coef.numer().sign() == Sign::Minus {
        -magnitude
    } else {
        magnitude
    }
}
