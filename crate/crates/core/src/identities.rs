//! Exact instance checks of the appendix binomial identities and grid
//! sweeps that emit a JSON-lines ledger.

use std::io::Write;
use std::ops::RangeInclusive;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use crate::damping::check_identity_e2;
use crate::error::{Error, Result};
use crate::exact::{binom_gen, binom_int, Rational};
use crate::par::{self, Execution};

fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

fn check_e1_pre(n: i64, g: i64, m: i64, a: i64, r: i64) -> Result<()> {
    if !(g > 0 && 0 <= a && a <= r && r <= 2 * m && 2 * m * g < n) {
        return Err(Error::Precondition(format!(
            "need g > 0 and 0 <= a <= r <= 2m < n/g; got n={n} g={g} m={m} a={a} r={r}"
        )));
    }
    Ok(())
}

/// E1 sum: `sum_l (-1)^l C(m,l)/C(n/g - l, m+1) *
/// [C(n-r, gl-a) - C(n-r, gl-r+a)] / C(n, gl)`.
pub fn e1_sum(n: i64, g: i64, m: i64, a: i64, r: i64) -> Rational {
    let x = Rational::new(BigInt::from(n), BigInt::from(g));
    let mut acc = Rational::zero();
    for l in 0..=m {
        let gl = g * l;
        let weight = Rational::from_integer(binom_int(m, l)) / binom_gen(&(&x - int(l)), m + 1);
        let bracket = binom_int(n - r, gl - a) - binom_int(n - r, gl - r + a);
        let term = weight * Rational::new(bracket, binom_int(n, gl));
        if l % 2 == 1 {
            acc -= term;
        } else {
            acc += term;
        }
    }
    acc
}

pub fn check_e1(n: i64, g: i64, m: i64, a: i64, r: i64) -> Result<bool> {
    check_e1_pre(n, g, m, a, r)?;
    Ok(e1_sum(n, g, m, a, r).is_zero())
}

/// `sum_l C(n/g, l) C(2m - n/g, m - l) C(gl, a) C(n - gl, r - a)`.
pub fn two_sums_side(n: i64, g: i64, m: i64, a: i64, r: i64) -> Rational {
    let x = Rational::new(BigInt::from(n), BigInt::from(g));
    let y = int(2 * m) - &x;
    (0..=m)
        .map(|l| {
            let gl = g * l;
            binom_gen(&x, l)
                * binom_gen(&y, m - l)
                * Rational::from_integer(binom_int(gl, a) * binom_int(n - gl, r - a))
        })
        .sum()
}

/// The two sides agree with `a` and `r - a` exchanged.
pub fn check_two_sums(n: i64, g: i64, m: i64, a: i64, r: i64) -> Result<bool> {
    check_e1_pre(n, g, m, a, r)?;
    Ok(two_sums_side(n, g, m, a, r) == two_sums_side(n, g, m, r - a, r))
}

/// `sum_l C(m,l)/C(2x-l, m+1) = (m+1) / (2 (x-m) C(x,m))`.
pub fn check_z(x: &Rational, m: i64) -> Result<bool> {
    if !(m > 0 && *x > int(m)) {
        return Err(Error::Precondition(format!("Z needs x > m > 0; got x={x} m={m}")));
    }
    let two_x = int(2) * x;
    let lhs: Rational = (0..=m)
        .map(|l| Rational::from_integer(binom_int(m, l)) / binom_gen(&(&two_x - int(l)), m + 1))
        .sum();
    let rhs = int(m + 1) / (int(2) * (x - int(m)) * binom_gen(x, m));
    Ok(lhs == rhs)
}

fn tele_f(m: i64, l: i64, x: &Rational) -> Rational {
    Rational::from_integer(binom_int(m, l)) / binom_gen(&(int(2) * x - int(l)), m + 1)
}

/// `G(m,l) = (m+2) C(m, l-1) / C(2x-l, m+1)`, equal to
/// `F(m,l) l (m+2) / (m-l+1)` wherever that is defined.
fn tele_g(m: i64, l: i64, x: &Rational) -> Rational {
    int(m + 2) * Rational::from_integer(binom_int(m, l - 1)) / binom_gen(&(int(2) * x - int(l)), m + 1)
}

/// `2(m+2)F(m,l) - 2(x-m-1)F(m+1,l) = G(m,l+1) - G(m,l)`.
pub fn check_telescoping(m: i64, l: i64, x: &Rational) -> Result<bool> {
    if !(0 <= l && l <= m && *x > int(m + 1)) {
        return Err(Error::Precondition(format!(
            "telescoping needs 0 <= l <= m and x > m+1; got m={m} l={l} x={x}"
        )));
    }
    let lhs = int(2 * (m + 2)) * tele_f(m, l, x) - int(2) * (x - int(m + 1)) * tele_f(m + 1, l, x);
    Ok(lhs == tele_g(m, l + 1, x) - tele_g(m, l, x))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Lemma {
    E1,
    #[serde(rename = "two_sums")]
    TwoSums,
    E2,
    Z,
    #[serde(rename = "telescoping")]
    Telescoping,
}

impl Lemma {
    pub const ALL: [Lemma; 5] = [Lemma::E1, Lemma::TwoSums, Lemma::E2, Lemma::Z, Lemma::Telescoping];
}

impl FromStr for Lemma {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "e1" => Ok(Lemma::E1),
            "two_sums" | "two-sums" => Ok(Lemma::TwoSums),
            "e2" => Ok(Lemma::E2),
            "z" => Ok(Lemma::Z),
            "telescoping" => Ok(Lemma::Telescoping),
            _ => Err(Error::Parse(format!(
                "unknown lemma {s:?} (expected E1, two_sums, E2, Z, telescoping)"
            ))),
        }
    }
}

/// One tuple of a sweep.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "lemma")]
pub enum Instance {
    E1 { n: i64, g: i64, m: i64, a: i64, r: i64 },
    #[serde(rename = "two_sums")]
    TwoSums { n: i64, g: i64, m: i64, a: i64, r: i64 },
    E2 { n: i64, g: i64, m: i64, a: i64, c: i64, k: i64, t: i64 },
    Z {
        #[serde(serialize_with = "ser_rational")]
        x: Rational,
        m: i64,
    },
    #[serde(rename = "telescoping")]
    Telescoping {
        m: i64,
        l: i64,
        #[serde(serialize_with = "ser_rational")]
        x: Rational,
    },
}

fn ser_rational<S: serde::Serializer>(q: &Rational, ser: S) -> std::result::Result<S::Ok, S::Error> {
    ser.serialize_str(&q.to_string())
}

impl Instance {
    pub fn check(&self) -> Result<bool> {
        match *self {
            Instance::E1 { n, g, m, a, r } => check_e1(n, g, m, a, r),
            Instance::TwoSums { n, g, m, a, r } => check_two_sums(n, g, m, a, r),
            Instance::E2 { n, g, m, a, c, k, t } => check_identity_e2(n, g, m, a, c, k, t),
            Instance::Z { ref x, m } => check_z(x, m),
            Instance::Telescoping { m, l, ref x } => check_telescoping(m, l, x),
        }
    }
}

/// Parameter ranges of a sweep. `n` runs over `2gm+1 ..= 2gm+n_extra` and
/// `x` over `m+1, m+3/2, ..., m+1+x_half_steps/2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridSpec {
    pub g: RangeInclusive<i64>,
    pub m: RangeInclusive<i64>,
    pub n_extra: i64,
    pub x_half_steps: i64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            g: 1..=4,
            m: 1..=4,
            n_extra: 8,
            x_half_steps: 8,
        }
    }
}

impl GridSpec {
    /// A reduced grid for quick runs.
    pub fn small() -> Self {
        GridSpec {
            g: 1..=2,
            m: 1..=2,
            n_extra: 3,
            x_half_steps: 4,
        }
    }

    fn ns(&self, g: i64, m: i64) -> RangeInclusive<i64> {
        (2 * g * m + 1)..=(2 * g * m + self.n_extra)
    }

    fn xs(&self, m: i64) -> Vec<Rational> {
        (0..=self.x_half_steps)
            .map(|j| int(m + 1) + Rational::new(BigInt::from(j), BigInt::from(2)))
            .collect()
    }

    /// Every tuple of `lemma` satisfying its hypotheses, in lexicographic
    /// parameter order.
    pub fn instances(&self, lemma: Lemma) -> Vec<Instance> {
        let mut out = Vec::new();
        match lemma {
            Lemma::E1 | Lemma::TwoSums | Lemma::E2 => {
                for g in self.g.clone() {
                    for m in self.m.clone() {
                        for n in self.ns(g, m) {
                            self.push_integer_tuples(lemma, n, g, m, &mut out);
                        }
                    }
                }
            }
            Lemma::Z => {
                for m in self.m.clone() {
                    for x in self.xs(m) {
                        out.push(Instance::Z { x, m });
                    }
                }
            }
            Lemma::Telescoping => {
                for m in self.m.clone() {
                    for l in 0..=m {
                        for x in self.xs(m).into_iter().filter(|x| *x > int(m + 1)) {
                            out.push(Instance::Telescoping { m, l, x });
                        }
                    }
                }
            }
        }
        out
    }

    fn push_integer_tuples(&self, lemma: Lemma, n: i64, g: i64, m: i64, out: &mut Vec<Instance>) {
        match lemma {
            Lemma::E1 | Lemma::TwoSums => {
                for r in 0..=2 * m {
                    for a in 0..=r {
                        out.push(if lemma == Lemma::E1 {
                            Instance::E1 { n, g, m, a, r }
                        } else {
                            Instance::TwoSums { n, g, m, a, r }
                        });
                    }
                }
            }
            _ => {
                for t in 0..=m {
                    for a in 0..=t {
                        for c in 0..=a {
                            for k in 0..=2 * m - t {
                                out.push(Instance::E2 { n, g, m, a, c, k, t });
                            }
                        }
                    }
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LedgerEntry {
    #[serde(flatten)]
    pub instance: Instance,
    pub passed: bool,
}

/// Checks every tuple of `lemma` on the grid; order follows
/// [`GridSpec::instances`] whatever the execution mode.
pub fn sweep(lemma: Lemma, spec: &GridSpec, exec: Execution) -> Result<Vec<LedgerEntry>> {
    let instances = spec.instances(lemma);
    par::map(exec, &instances, |inst| {
        inst.check().map(|passed| LedgerEntry {
            instance: inst.clone(),
            passed,
        })
    })
    .into_iter()
    .collect()
}

/// One JSON object per line.
pub fn write_ledger<W: Write>(entries: &[LedgerEntry], mut out: W) -> Result<()> {
    for e in entries {
        serde_json::to_writer(&mut out, e)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// Counts `(total, failed)`.
pub fn tally(entries: &[LedgerEntry]) -> (usize, usize) {
    (entries.len(), entries.iter().filter(|e| !e.passed).count())
}
