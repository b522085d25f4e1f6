use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision signed fraction, always kept in lowest terms with a
/// positive denominator.
pub type Rational = BigRational;

/// Shorthand for `num/den` as a [`Rational`].
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Integer binomial coefficient with the convention `C(n, k) = 0` whenever
/// `k < 0` or `k > n` (in particular for every negative `n`).
pub fn binom_int(n: i64, k: i64) -> BigInt {
    if k < 0 || n < 0 || k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Falling-factorial binomial `x (x-1) ... (x-k+1) / k!` for rational `x`.
///
/// Negative `k` yields zero, mirroring [`binom_int`].
pub fn binom_gen(x: &Rational, k: i64) -> Rational {
    if k < 0 {
        return Rational::zero();
    }
    let mut num = Rational::one();
    for i in 0..k {
        num *= x - Rational::from_integer(BigInt::from(i));
    }
    let mut fact = BigInt::one();
    for i in 2..=k {
        fact *= i;
    }
    num / Rational::from_integer(fact)
}

/// Parses `"3"`, `"-7/4"`, `"0.001"` or `"1e-3"` into an exact rational.
/// Decimal and exponent forms are read digit-for-digit, never through `f64`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = || Error::Parse(format!("not a rational number: {text:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| bad())?;
        let den: BigInt = den.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(num, den));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let e: i64 = s[pos + 1..].parse().map_err(|_| bad())?;
            (&s[..pos], e)
        }
        None => (s, 0),
    };
    let (negative, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("{int_part}{frac_part}0").parse().map_err(|_| bad())?;
    let digits = digits / 10;
    let scale = exponent - frac_part.len() as i64;
    let ten = BigInt::from(10);
    let mut value = if scale >= 0 {
        Rational::from_integer(digits * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(digits, num_traits::pow(ten, (-scale) as usize))
    };
    if negative {
        value = -value;
    }
    Ok(value)
}

pub(crate) fn is_nonnegative(q: &Rational) -> bool {
    !q.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_binomials() {
        assert_eq!(binom_int(7, 2), BigInt::from(21));
        assert_eq!(binom_int(5, -1), BigInt::zero());
        assert_eq!(binom_int(4, 4), BigInt::one());
        assert_eq!(binom_int(3, 5), BigInt::zero());
        assert_eq!(binom_int(-2, 1), BigInt::zero());
        assert_eq!(binom_int(100, 50).to_string(), "100891344545564193334812497256");
    }

    #[test]
    fn generalized_binomials() {
        assert_eq!(binom_gen(&rat(7, 2), 2), rat(35, 8));
        assert_eq!(binom_gen(&rat(7, 4), 1), rat(7, 4));
        assert_eq!(binom_gen(&rat(5, 2), 2), rat(15, 8));
        assert_eq!(binom_gen(&rat(3, 1), -1), Rational::zero());
        // negative upper argument: C(-1, 3) = -1
        assert_eq!(binom_gen(&rat(-1, 1), 3), rat(-1, 1));
    }

    #[test]
    fn generalized_agrees_with_integer_grid() {
        for x in 0..=30i64 {
            for k in -2..=32i64 {
                let g = binom_gen(&rat(x, 1), k);
                assert_eq!(g, Rational::from_integer(binom_int(x, k)), "x={x} k={k}");
            }
        }
    }

    #[test]
    fn parses_rationals() {
        assert_eq!(parse_rational("0.001").unwrap(), rat(1, 1000));
        assert_eq!(parse_rational("1e-3").unwrap(), rat(1, 1000));
        assert_eq!(parse_rational("-7/4").unwrap(), rat(-7, 4));
        assert_eq!(parse_rational("2.5E2").unwrap(), rat(250, 1));
        assert_eq!(parse_rational(".5").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("-0.0267249").unwrap(), rat(-267249, 10_000_000));
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("").is_err());
    }
}
