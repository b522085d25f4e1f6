//! Amplitude-damping analysis of the (g, m, delta) codes with a truncated
//! Kraus set of at most `t` damped positions. Inner products are exact
//! polynomials in `p`; Kraus operators are grouped into classes `(a, c)`
//! since permutation invariance makes every inner product depend only on
//! the support sizes.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::code::{GmdParams, PICode};
use crate::error::{Error, Result};
use crate::exact::{binom_gen, binom_int, to_scientific, Rational};
use crate::par::{self, Execution};

/// Polynomial in `p` with exact coefficients; index is the power.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PolyP {
    coeffs: Vec<Rational>,
}

impl PolyP {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        PolyP { coeffs }
    }

    pub fn zero() -> Self {
        PolyP { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        PolyP::new(vec![c])
    }

    /// `p^k`.
    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); k + 1];
        coeffs[k] = Rational::one();
        PolyP { coeffs }
    }

    /// `(1 - p)^e`.
    pub fn one_minus_p_pow(e: usize) -> Self {
        let coeffs = (0..=e)
            .map(|k| {
                let c = Rational::from_integer(binom_int(e as i64, k as i64));
                if k % 2 == 1 {
                    -c
                } else {
                    c
                }
            })
            .collect();
        PolyP::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// `[p^k]`.
    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Lowest power with a nonzero coefficient.
    pub fn order(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn scale(&self, s: &Rational) -> PolyP {
        PolyP::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn add(&self, other: &PolyP) -> PolyP {
        let len = self.coeffs.len().max(other.coeffs.len());
        PolyP::new((0..len).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &PolyP) -> PolyP {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn mul(&self, other: &PolyP) -> PolyP {
        if self.is_zero() || other.is_zero() {
            return PolyP::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        PolyP::new(out)
    }

    pub fn eval(&self, p: &Rational) -> Rational {
        self.coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * p + c)
    }

    pub fn eval_f64(&self, p: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * p + c.to_f64().unwrap_or(f64::NAN))
    }

    /// `sum_{k >= from} |[p^k]|`.
    pub fn abs_tail(&self, from: usize) -> Rational {
        self.coeffs.iter().skip(from).map(|c| c.abs()).sum()
    }
}

impl fmt::Display for PolyP {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})*p")?,
                _ => write!(f, "({c})*p^{k}")?,
            }
        }
        Ok(())
    }
}

impl Serialize for PolyP {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.collect_seq(self.coeffs.iter().map(|c| c.to_string()))
    }
}

/// Kraus pair class: `a = |supp A| = |supp B|`, `c = |supp A u supp B| - a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ADClass {
    pub a: usize,
    pub c: usize,
}

impl ADClass {
    pub fn new(a: usize, c: usize) -> Result<Self> {
        if c > a {
            return Err(Error::InvalidParams(format!("class needs c <= a, got a = {a}, c = {c}")));
        }
        Ok(ADClass { a, c })
    }

    /// All classes with `c <= a <= t`, ordered by `(a, c)`.
    pub fn all(t: usize) -> Vec<ADClass> {
        (0..=t).flat_map(|a| (0..=a).map(move |c| ADClass { a, c })).collect()
    }
}

/// `<D^n_w| A^dagger B |D^n_w> = p^a (1-p)^(w-a) C(n-c-a, w-a) / C(n, w)`.
pub fn ad_dicke_inner(n: usize, w: usize, cls: ADClass) -> PolyP {
    if w < cls.a || w > n || cls.a + cls.c > n {
        return PolyP::zero();
    }
    let factor = Rational::new(
        binom_int((n - cls.c - cls.a) as i64, (w - cls.a) as i64),
        binom_int(n as i64, w as i64),
    );
    if factor.is_zero() {
        return PolyP::zero();
    }
    PolyP::monomial(cls.a)
        .mul(&PolyP::one_minus_p_pow(w - cls.a))
        .scale(&factor)
}

fn check_regime(params: &GmdParams, t: usize) -> Result<()> {
    params.validate()?;
    if (params.g as usize) < t + 1 || (params.delta as usize) < t {
        return Err(Error::Precondition(format!(
            "{} with t = {t}: cross terms vanish only for g >= t+1 and delta >= t",
            params.label()
        )));
    }
    Ok(())
}

/// `<c+|A^dagger B|c->` for the Hadamard-basis codewords:
/// `sum_l f(l)^2 (-1)^l [inner(gl) - inner(n - gl)]` with
/// `f(l)^2 = gamma^2 b_l^2 / 2`.
pub fn hadamard_cross_poly(params: &GmdParams, t: usize, cls: ADClass) -> Result<PolyP> {
    check_regime(params, t)?;
    if cls.a > t {
        return Err(Error::InvalidParams(format!("class a = {} exceeds t = {t}", cls.a)));
    }
    let n = params.n();
    let g = params.g as usize;
    let half = Rational::new(BigInt::from(1), BigInt::from(2));
    let mut acc = PolyP::zero();
    for (l, amp2) in params.amplitudes_squared().iter().enumerate() {
        let f2 = amp2 * &half;
        let diff = ad_dicke_inner(n, g * l, cls).sub(&ad_dicke_inner(n, n - g * l, cls));
        let signed = if l % 2 == 1 { -f2 } else { f2 };
        acc = acc.add(&diff.scale(&signed));
    }
    Ok(acc)
}

/// Constant `C` and the class attaining it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConstantC {
    #[serde(serialize_with = "ser_rational")]
    pub value: Rational,
    pub class: ADClass,
}

/// `C = max_{(a,c)} sum_{k >= 2m-t+1} |[p^k] <c+|A^dagger B|c->|`.
pub fn constant_c(params: &GmdParams, t: usize) -> Result<ConstantC> {
    constant_c_with(params, t, Execution::default())
}

pub fn constant_c_with(params: &GmdParams, t: usize, exec: Execution) -> Result<ConstantC> {
    check_regime(params, t)?;
    let from = (2 * params.m as usize + 1).saturating_sub(t);
    let classes = ADClass::all(t);
    let tails = par::map(exec, &classes, |&cls| {
        hadamard_cross_poly(params, t, cls).map(|poly| poly.abs_tail(from))
    });
    let mut best = ConstantC {
        value: Rational::zero(),
        class: classes[0],
    };
    for (cls, tail) in classes.into_iter().zip(tails) {
        let tail = tail?;
        if tail > best.value {
            best = ConstantC { value: tail, class: cls };
        }
    }
    Ok(best)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConstantD {
    #[serde(serialize_with = "ser_rational")]
    pub value: Rational,
    pub class: ADClass,
    pub codeword: usize,
}

/// `D = min_{a <= t} min_i <c_i|A^dagger A|c_i> / p^a` at `p -> 0`, i.e.
/// the constant term left after removing the leading `p^a` factor.
pub fn constant_d(code: &PICode, t: usize) -> Result<ConstantD> {
    if !code.is_normalized() {
        return Err(Error::NotNormalized(code.label().to_string()));
    }
    let n = code.n();
    let mut best: Option<ConstantD> = None;
    for a in 0..=t.min(n) {
        let cls = ADClass { a, c: 0 };
        for i in 0..2 {
            let value: Rational = code
                .codeword(i)
                .iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .map(|(w, x)| x.square() * ad_dicke_inner(n, w, cls).coeff(a))
                .sum();
            if best.as_ref().is_none_or(|b| value < b.value) {
                best = Some(ConstantD { value, class: cls, codeword: i });
            }
        }
    }
    Ok(best.expect("at least one class"))
}

/// `Tr M = sum_{A} (<c0|A^dagger A|c0> + <c1|A^dagger A|c1>) / 2` over the
/// truncated set of at most `t` damped positions.
pub fn trace_m_poly(code: &PICode, t: usize) -> PolyP {
    let n = code.n();
    let half = Rational::new(BigInt::from(1), BigInt::from(2));
    let mut acc = PolyP::zero();
    for a in 0..=t.min(n) {
        let count = Rational::from_integer(binom_int(n as i64, a as i64));
        for i in 0..2 {
            for (w, x) in code.codeword(i).iter().enumerate() {
                if !x.is_zero() {
                    let term = ad_dicke_inner(n, w, ADClass { a, c: 0 });
                    acc = acc.add(&term.scale(&(x.square() * &count * &half)));
                }
            }
        }
    }
    acc
}

/// True when every weight in the support of `|c0>` is more than `t` away
/// from every weight of `|c1>`, so `<c0|A^dagger B|c1> = 0` for all
/// operators damping at most `t` positions each.
pub fn cross_terms_vanish(code: &PICode, t: usize) -> bool {
    let s1 = code.support(1);
    code.support(0)
        .iter()
        .all(|&w| s1.iter().all(|&v| w.abs_diff(v) > t))
}

/// `p0 = (R)^(1/e)` with `R = D / (2 C n^t)` and `e = 2m - 2t + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct P0 {
    /// `None` when `C = 0` (no upper limit).
    pub radicand: Option<Rational>,
    pub exponent: u32,
}

impl P0 {
    /// Exact test of `p < p0`, i.e. `p^e < R`.
    pub fn admits(&self, p: &Rational) -> bool {
        match &self.radicand {
            None => true,
            Some(r) => pow(p, self.exponent) < *r,
        }
    }

    /// `p0` rounded to `digits` significant digits.
    pub fn to_decimal(&self, digits: usize) -> String {
        let Some(r) = &self.radicand else {
            return "inf".into();
        };
        let e = self.exponent;
        let mut places = digits as u32 + 10;
        loop {
            // floor(r * 10^(places e)) ^ (1/e) = floor(p0 * 10^places)
            let scaled = r * Rational::from_integer(BigInt::from(10u32).pow(places * e));
            let floor = scaled.to_integer().to_biguint().unwrap_or_default();
            let root = floor.nth_root(e);
            if root.to_string().len() > digits + 5 {
                let q = Rational::new(BigInt::from(root), BigInt::from(10u32).pow(places));
                return to_scientific(&q, digits.saturating_sub(1));
            }
            places += digits as u32;
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.to_decimal(17).parse().unwrap_or(f64::INFINITY)
    }
}

fn pow(x: &Rational, e: u32) -> Rational {
    (0..e).fold(Rational::one(), |acc, _| acc * x)
}

/// Constants of the damping bound for one `(params, t)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdAnalysis {
    pub params: GmdParams,
    pub t: usize,
    pub c: ConstantC,
    pub d: ConstantD,
    /// `|eps_{p,t}| = sum_{i <= t} C(n, i)`.
    pub kraus_count: BigUint,
    pub p0: P0,
}

impl AdAnalysis {
    pub fn new(params: GmdParams, t: usize) -> Result<Self> {
        let m = params.m as usize;
        if m < t {
            return Err(Error::Precondition(format!(
                "the bound needs 2m - 2t + 1 >= 1, got m = {m}, t = {t}"
            )));
        }
        let code = crate::code::construct_gmdelta(params)?;
        let c = constant_c(&params, t)?;
        let d = constant_d(&code, t)?;
        let n = params.n();
        let kraus_count = (0..=t)
            .map(|i| binom_int(n as i64, i as i64).to_biguint().unwrap_or_default())
            .sum();
        let exponent = (2 * m - 2 * t + 1) as u32;
        let radicand = (!c.value.is_zero()).then(|| {
            let nt = Rational::from_integer(BigInt::from(n).pow(t as u32));
            &d.value / (Rational::from_integer(2.into()) * &c.value * nt)
        });
        Ok(AdAnalysis {
            params,
            t,
            c,
            d,
            kraus_count,
            p0: P0 { radicand, exponent },
        })
    }

    /// The final bound evaluated at `p` with no range check.
    pub fn bound_formula(&self, p: &Rational) -> Rational {
        bound_formula(
            self.params.n(),
            self.t,
            self.params.m as usize,
            &self.c.value,
            &self.d.value,
            p,
        )
    }

    /// The bound at `p`, rejecting `p` outside `(0, p0)`.
    pub fn infidelity_bound(&self, p: &Rational) -> Result<Rational> {
        if !p.is_positive() || !self.p0.admits(p) || *p >= Rational::one() {
            return Err(Error::OutOfRange {
                p: p.to_string(),
                p0: self.p0.to_decimal(30),
            });
        }
        Ok(self.bound_formula(p))
    }

    /// `lim_{p -> 0} bound / p^(t+1) = C(n, t+1) + 2C|eps|^2(|eps|-1)/D`
    /// when `m >= ceil(3t/2)`.
    pub fn limit_ratio(&self) -> Rational {
        let n = self.params.n() as i64;
        let eps = Rational::from_integer(BigInt::from(self.kraus_count.clone()));
        Rational::from_integer(binom_int(n, self.t as i64 + 1))
            + Rational::from_integer(2.into()) * &self.c.value * &eps * &eps * (&eps - Rational::one())
                / &self.d.value
    }
}

/// `1 - (1 - C(n,t+1) p^(t+1) - |eps|^2 C p^(2m-t+1)) /
///  (1 + (2 C |eps|^2 (|eps|-1) / D) p^(2m-2t+1))`.
pub fn bound_formula(n: usize, t: usize, m: usize, c: &Rational, d: &Rational, p: &Rational) -> Rational {
    let eps = Rational::from_integer(
        (0..=t).map(|i| binom_int(n as i64, i as i64)).sum::<BigInt>(),
    );
    let one = Rational::one();
    let num = &one
        - Rational::from_integer(binom_int(n as i64, t as i64 + 1)) * pow(p, t as u32 + 1)
        - &eps * &eps * c * pow(p, (2 * m + 1 - t) as u32);
    let eta = Rational::from_integer(2.into()) * c * &eps * &eps * (&eps - &one) / d;
    let den = &one + eta * pow(p, (2 * m + 1 - 2 * t) as u32);
    one - num / den
}

/// `infidelity_bound(params, t, p)` with the constants computed on the fly.
pub fn infidelity_bound(params: GmdParams, t: usize, p: &Rational) -> Result<Rational> {
    AdAnalysis::new(params, t)?.infidelity_bound(p)
}

/// Exact E2 sum:
/// `sum_l (-1)^l C(m,l)/C(n/g - l, m+1) * [C(gl-a, k-a) C(n-c-a, gl-a)
///  - C(n-gl-a, k-a) C(n-c-a, n-gl-a)] / C(n, gl)`.
pub fn e2_sum(n: i64, g: i64, m: i64, a: i64, c: i64, k: i64) -> Rational {
    let x = Rational::new(BigInt::from(n), BigInt::from(g));
    let mut acc = Rational::zero();
    for l in 0..=m {
        let gl = g * l;
        let weight = Rational::from_integer(binom_int(m, l))
            / binom_gen(&(&x - Rational::from_integer(BigInt::from(l))), m + 1);
        let bracket = binom_int(gl - a, k - a) * binom_int(n - c - a, gl - a)
            - binom_int(n - gl - a, k - a) * binom_int(n - c - a, n - gl - a);
        let term = weight * Rational::new(bracket, binom_int(n, gl));
        if l % 2 == 1 {
            acc -= term;
        } else {
            acc += term;
        }
    }
    acc
}

/// E2 instance check; true when the sum is exactly zero.
pub fn check_identity_e2(n: i64, g: i64, m: i64, a: i64, c: i64, k: i64, t: i64) -> Result<bool> {
    let ok = g > 0 && n > 2 * g * m && k >= 0 && k <= 2 * m - t && 0 <= c && c <= a && a <= t && t <= m;
    if !ok {
        return Err(Error::Precondition(format!(
            "E2 needs n > 2gm, 0 <= k <= 2m - t, 0 <= c <= a <= t <= m; got n={n} g={g} m={m} a={a} c={c} k={k} t={t}"
        )));
    }
    Ok(e2_sum(n, g, m, a, c, k).is_zero())
}

fn ser_rational<S: serde::Serializer>(q: &Rational, ser: S) -> std::result::Result<S::Ok, S::Error> {
    ser.serialize_str(&q.to_string())
}
