use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Mul, Neg};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::decimal::{signed_sqrt_fixed, to_scientific};
use super::factor::{squarefree_decompose, DEFAULT_TRIAL_BOUND};
use super::rational::{is_nonnegative, Rational};
use crate::error::{Error, Result};

/// A real number `coef * sqrt(radicand)` in canonical form: the radicand is
/// a squarefree positive integer and zero is always `0 * sqrt(1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RadicalRepr", into = "RadicalRepr")]
pub struct Radical {
    coef: Rational,
    radicand: BigUint,
}

/// Canonical `sqrt(q)` using the default trial-division bound.
pub fn sqrt_canonical(q: &Rational) -> Result<Radical> {
    sqrt_canonical_with(q, DEFAULT_TRIAL_BOUND)
}

/// Canonical `sqrt(q)` with an explicit trial-division bound for the
/// squarefree decomposition.
pub fn sqrt_canonical_with(q: &Rational, bound: u64) -> Result<Radical> {
    if !is_nonnegative(q) {
        return Err(Error::NegativeRadicand(q.to_string()));
    }
    if q.is_zero() {
        return Ok(Radical::zero());
    }
    // sqrt(p/r) = sqrt(p) sqrt(r) / r; p and r are coprime so their
    // squarefree cores multiply to a squarefree core.
    let p = q.numer().to_biguint().expect("nonnegative");
    let r = q.denom().to_biguint().expect("positive");
    let (p_root, p_core) = squarefree_decompose(&p, bound)?;
    let (r_root, r_core) = squarefree_decompose(&r, bound)?;
    let coef = Rational::new(BigInt::from(p_root * r_root), BigInt::from(r));
    Ok(Radical {
        coef,
        radicand: p_core * r_core,
    })
}

impl Radical {
    pub fn zero() -> Self {
        Radical {
            coef: Rational::zero(),
            radicand: BigUint::one(),
        }
    }

    pub fn one() -> Self {
        Radical::rational(Rational::one())
    }

    pub fn rational(q: Rational) -> Self {
        Radical {
            coef: q,
            radicand: BigUint::one(),
        }
    }

    /// Builds `coef * sqrt(radicand)` for any positive integer radicand,
    /// pulling square factors into the coefficient.
    pub fn new(coef: Rational, radicand: BigUint) -> Result<Self> {
        if radicand.is_zero() {
            return Err(Error::InvalidParams("radicand must be positive".into()));
        }
        if coef.is_zero() {
            return Ok(Radical::zero());
        }
        let (root, core) = squarefree_decompose(&radicand, DEFAULT_TRIAL_BOUND)?;
        Ok(Radical {
            coef: coef * Rational::from_integer(BigInt::from(root)),
            radicand: core,
        })
    }

    pub fn coef(&self) -> &Rational {
        &self.coef
    }

    pub fn radicand(&self) -> &BigUint {
        &self.radicand
    }

    pub fn is_zero(&self) -> bool {
        self.coef.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.radicand.is_one()
    }

    /// The exact square `coef^2 * radicand`.
    pub fn square(&self) -> Rational {
        &self.coef * &self.coef * Rational::from_integer(BigInt::from(self.radicand.clone()))
    }

    pub fn signum(&self) -> i32 {
        match self.coef.numer().sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn scale(&self, q: &Rational) -> Radical {
        if q.is_zero() {
            return Radical::zero();
        }
        Radical {
            coef: &self.coef * q,
            radicand: self.radicand.clone(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        let c = self.coef.numer().to_f64().unwrap_or(f64::NAN) / self.coef.denom().to_f64().unwrap_or(f64::NAN);
        if c.is_finite() && self.radicand.bits() < 1000 {
            return c * self.radicand.to_f64().unwrap_or(f64::NAN).sqrt();
        }
        to_scientific_value(self, 20).parse().unwrap_or(f64::NAN)
    }

    /// Scientific-notation rendering with `digits` significant digits.
    pub fn to_decimal(&self, digits: usize) -> String {
        to_scientific_value(self, digits)
    }
}

fn to_scientific_value(r: &Radical, digits: usize) -> String {
    if r.is_rational() {
        return to_scientific(&r.coef, digits);
    }
    let places = (digits + 20 + r.coef.denom().to_string().len()) as u32;
    let fixed = signed_sqrt_fixed(&r.coef, &r.radicand, places);
    let value = Rational::new(fixed, num_traits::pow(BigInt::from(10), places as usize));
    to_scientific(&value, digits)
}

impl fmt::Display for Radical {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            write!(f, "{}", self.coef)
        } else {
            write!(f, "{}*sqrt({})", self.coef, self.radicand)
        }
    }
}

impl Mul for &Radical {
    type Output = Radical;

    /// `sqrt(d1) sqrt(d2) = g sqrt((d1/g)(d2/g))` with `g = gcd(d1, d2)`;
    /// the reduced factors are coprime and squarefree, so no factoring is
    /// needed.
    fn mul(self, rhs: &Radical) -> Radical {
        if self.is_zero() || rhs.is_zero() {
            return Radical::zero();
        }
        let g = self.radicand.gcd(&rhs.radicand);
        let radicand = (&self.radicand / &g) * (&rhs.radicand / &g);
        let coef = &self.coef * &rhs.coef * Rational::from_integer(BigInt::from(g));
        Radical { coef, radicand }
    }
}

impl Mul for Radical {
    type Output = Radical;
    fn mul(self, rhs: Radical) -> Radical {
        &self * &rhs
    }
}

impl Neg for &Radical {
    type Output = Radical;
    fn neg(self) -> Radical {
        Radical {
            coef: -&self.coef,
            radicand: self.radicand.clone(),
        }
    }
}

impl Neg for Radical {
    type Output = Radical;
    fn neg(self) -> Radical {
        -&self
    }
}

impl From<Rational> for Radical {
    fn from(q: Rational) -> Self {
        Radical::rational(q)
    }
}

#[derive(Serialize, Deserialize)]
struct RadicalRepr {
    num: String,
    den: String,
    rad: String,
}

impl From<Radical> for RadicalRepr {
    fn from(r: Radical) -> Self {
        RadicalRepr {
            num: r.coef.numer().to_string(),
            den: r.coef.denom().to_string(),
            rad: r.radicand.to_string(),
        }
    }
}

impl TryFrom<RadicalRepr> for Radical {
    type Error = Error;

    fn try_from(repr: RadicalRepr) -> Result<Self> {
        let parse = |s: &str| -> Result<BigInt> {
            s.parse::<BigInt>()
                .map_err(|_| Error::Parse(format!("bad integer {s:?} in radical")))
        };
        let num = parse(&repr.num)?;
        let den = parse(&repr.den)?;
        let rad = parse(&repr.rad)?;
        if !den.is_positive() {
            return Err(Error::Parse("radical denominator must be positive".into()));
        }
        if !num.gcd(&den).is_one() {
            return Err(Error::Parse(format!("radical coefficient {num}/{den} is not reduced")));
        }
        let rad = rad
            .to_biguint()
            .filter(|r| !r.is_zero())
            .ok_or_else(|| Error::Parse("radicand must be positive".into()))?;
        let coef = Rational::new(num, den);
        let canonical = Radical::new(coef.clone(), rad.clone())?;
        let stored = Radical { coef, radicand: rad };
        if canonical != stored {
            return Err(Error::Parse(format!("radical {stored} is not in canonical form")));
        }
        Ok(canonical)
    }
}

/// A finite sum of radicals with distinct squarefree radicands. Square roots
/// of distinct squarefree integers are linearly independent over the
/// rationals, so the sum is zero exactly when no terms remain.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct RadicalSum {
    terms: BTreeMap<BigUint, Rational>,
}

impl RadicalSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_rational(q: Rational) -> Self {
        let mut s = Self::new();
        s.add_radical(&Radical::rational(q));
        s
    }

    pub fn add_radical(&mut self, r: &Radical) {
        if r.is_zero() {
            return;
        }
        let entry = self.terms.entry(r.radicand.clone()).or_insert_with(Rational::zero);
        *entry += &r.coef;
        if entry.is_zero() {
            self.terms.remove(&r.radicand);
        }
    }

    pub fn add_sum(&mut self, other: &RadicalSum) {
        for (d, c) in &other.terms {
            self.add_radical(&Radical {
                coef: c.clone(),
                radicand: d.clone(),
            });
        }
    }

    pub fn sub_sum(&mut self, other: &RadicalSum) {
        self.add_sum(&other.neg())
    }

    pub fn neg(&self) -> RadicalSum {
        RadicalSum {
            terms: self.terms.iter().map(|(d, c)| (d.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, factor: &Radical) -> RadicalSum {
        let mut out = RadicalSum::new();
        for r in self.terms() {
            out.add_radical(&(&r * factor));
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in increasing radicand order.
    pub fn terms(&self) -> impl Iterator<Item = Radical> + '_ {
        self.terms.iter().map(|(d, c)| Radical {
            coef: c.clone(),
            radicand: d.clone(),
        })
    }

    /// Fixed-point value `sum * 10^places`, each term truncated toward zero;
    /// the total error is below `len()` units.
    pub fn fixed_point(&self, places: u32) -> BigInt {
        self.terms
            .iter()
            .map(|(d, c)| signed_sqrt_fixed(c, d, places))
            .sum()
    }

    /// Exact sign, decided by refining a fixed-point evaluation until the
    /// truncation error can no longer flip it.
    pub fn signum(&self) -> i32 {
        if self.is_zero() {
            return 0;
        }
        let slack = BigInt::from(self.terms.len() as u64 + 1);
        let mut places = 32u32;
        loop {
            let v = self.fixed_point(places);
            if v.abs() > slack {
                return if v.is_negative() { -1 } else { 1 };
            }
            places *= 2;
        }
    }

    /// `|sum|`, i.e. the sum or its negation, whichever is nonnegative.
    pub fn abs(&self) -> RadicalSum {
        if self.signum() < 0 {
            self.neg()
        } else {
            self.clone()
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.terms().map(|r| r.to_f64()).sum()
    }

    pub fn to_decimal(&self, digits: usize) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let max_den = self.terms.values().map(|c| c.denom().to_string().len()).max().unwrap_or(1);
        let places = (digits + 30 + max_den) as u32;
        let value = Rational::new(self.fixed_point(places), num_traits::pow(BigInt::from(10), places as usize));
        to_scientific(&value, digits)
    }
}

impl fmt::Display for RadicalSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms().map(|r| r.to_string()).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl From<&Radical> for RadicalSum {
    fn from(r: &Radical) -> Self {
        let mut s = RadicalSum::new();
        s.add_radical(r);
        s
    }
}

impl FromIterator<Radical> for RadicalSum {
    fn from_iter<I: IntoIterator<Item = Radical>>(iter: I) -> Self {
        let mut s = RadicalSum::new();
        for r in iter {
            s.add_radical(&r);
        }
        s
    }
}

impl Serialize for RadicalSum {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.terms())
    }
}

impl<'de> Deserialize<'de> for RadicalSum {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let terms: Vec<Radical> = Vec::deserialize(deserializer)?;
        Ok(terms.into_iter().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn rad(num: i64, den: i64, d: u64) -> Radical {
        Radical::new(rat(num, den), BigUint::from(d)).unwrap()
    }

    #[test]
    fn canonical_square_roots() {
        let r = sqrt_canonical(&rat(9, 4)).unwrap();
        assert_eq!((r.coef().clone(), r.radicand().clone()), (rat(3, 2), BigUint::one()));
        let r = sqrt_canonical(&rat(8, 15)).unwrap();
        assert_eq!((r.coef().clone(), r.radicand().clone()), (rat(2, 15), BigUint::from(30u32)));
        // (2/15)^2 * 30 = 8/15 by plain rational arithmetic
        assert_eq!(rat(2, 15) * rat(2, 15) * rat(30, 1), rat(8, 15));
        assert_eq!(sqrt_canonical(&rat(0, 1)).unwrap(), Radical::zero());
        assert_eq!(sqrt_canonical(&rat(7, 10)).unwrap(), rad(1, 10, 70));
        assert!(matches!(sqrt_canonical(&rat(-1, 2)), Err(Error::NegativeRadicand(_))));
    }

    #[test]
    fn multiplication_recanonicalizes() {
        assert_eq!(&rad(1, 1, 2) * &rad(1, 1, 2), Radical::rational(rat(2, 1)));
        assert_eq!(&rad(1, 1, 6) * &rad(1, 1, 10), rad(2, 1, 15));
        // sqrt(60) = 2 sqrt(15), squared both sides equal 60
        assert_eq!((&rad(1, 1, 6) * &rad(1, 1, 10)).square(), rat(60, 1));
        assert_eq!(&rad(0, 1, 1) * &rad(3, 1, 7), Radical::zero());
    }

    #[test]
    fn sums_cancel() {
        let mut s = RadicalSum::new();
        s.add_radical(&rad(1, 1, 2));
        s.add_radical(&rad(-1, 1, 2));
        assert!(s.is_zero());
        s.add_radical(&rad(1, 3, 5));
        s.add_radical(&rad(2, 1, 1));
        assert_eq!(s.len(), 2);
        assert!(!s.is_zero());
    }

    #[test]
    fn exact_sign() {
        // sqrt(2) + sqrt(3) - sqrt(10) is about -0.0165
        let s: RadicalSum = [rad(1, 1, 2), rad(1, 1, 3), rad(-1, 1, 10)].into_iter().collect();
        assert_eq!(s.signum(), -1);
        assert_eq!(s.abs().signum(), 1);
        // 99/70 - sqrt(2) is tiny and positive
        let t: RadicalSum = [Radical::rational(rat(99, 70)), rad(-1, 1, 2)].into_iter().collect();
        assert_eq!(t.signum(), 1);
    }

    #[test]
    fn json_triples() {
        let r = rad(-3, 4, 30);
        let json = serde_json::to_string(&r).unwrap();
        assert_eq!(json, r#"{"num":"-3","den":"4","rad":"30"}"#);
        let back: Radical = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
        let bad = r#"{"num":"1","den":"1","rad":"8"}"#;
        assert!(serde_json::from_str::<Radical>(bad).is_err());
        let zero_bad = r#"{"num":"0","den":"1","rad":"2"}"#;
        assert!(serde_json::from_str::<Radical>(zero_bad).is_err());
        let unreduced = r#"{"num":"2","den":"4","rad":"3"}"#;
        assert!(serde_json::from_str::<Radical>(unreduced).is_err());
    }

    #[test]
    fn decimals() {
        assert_eq!(rad(1, 1, 2).to_decimal(15), "1.41421356237310e0");
        assert_eq!(rad(-1, 10, 70).to_decimal(6), "-8.36660e-1");
        assert!((rad(1, 10, 70).to_f64() - 0.7f64.sqrt()).abs() < 1e-15);
    }
}
