//! Exact Knill-Laflamme style conditions (C1)-(C4) for permutation-invariant
//! codes, for `t` Pauli errors (span `2t`) and `s` deletions (span `s`), and
//! the action of the deletion Kraus operators `E_a = G^a F^(s-a)`.

use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;

use crate::code::PICode;
use crate::error::{Error, Result};
use crate::exact::{binom_int, sqrt_canonical, Radical, RadicalSum, Rational};
use crate::par::{self, Execution};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Condition {
    C1,
    C2,
    C3,
    C4,
}

/// Which error model a report belongs to: `t` Pauli errors or `s` deletions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorModel {
    Pauli { t: usize },
    Deletion { s: usize },
}

impl ErrorModel {
    /// Width of the `(a, b)` index range: `2t` or `s`.
    pub fn span(&self) -> usize {
        match *self {
            ErrorModel::Pauli { t } => 2 * t,
            ErrorModel::Deletion { s } => s,
        }
    }
}

/// One evaluated condition. `passed` is true exactly when the residual is
/// the empty radical sum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionReport {
    pub condition: Condition,
    pub a: usize,
    pub b: usize,
    pub model: ErrorModel,
    pub residual: RadicalSum,
    pub passed: bool,
}

impl ConditionReport {
    fn new(condition: Condition, a: usize, b: usize, model: ErrorModel, residual: RadicalSum) -> Self {
        let passed = residual.is_zero();
        ConditionReport {
            condition,
            a,
            b,
            model,
            residual,
            passed,
        }
    }
}

impl Serialize for ConditionReport {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = ser.serialize_map(Some(6))?;
        map.serialize_entry("condition", &self.condition)?;
        map.serialize_entry("a", &self.a)?;
        map.serialize_entry("b", &self.b)?;
        match self.model {
            ErrorModel::Pauli { t } => map.serialize_entry("t", &t)?,
            ErrorModel::Deletion { s } => map.serialize_entry("s", &s)?,
        }
        map.serialize_entry("residual", &self.residual)?;
        map.serialize_entry("passed", &self.passed)?;
        map.end()
    }
}

/// True when every report passed.
pub fn all_passed(reports: &[ConditionReport]) -> bool {
    reports.iter().all(|r| r.passed)
}

#[derive(Clone, Copy)]
enum Integrand {
    Cross,
    Diagonal,
}

/// `sum_j C(n-span, j) / sqrt(C(n, j+a) C(n, j+b)) * (integrand at j+a, j+b)`.
fn condition_sum(code: &PICode, span: usize, a: usize, b: usize, kind: Integrand) -> RadicalSum {
    let n = code.n();
    let (alpha, beta) = (code.alpha(), code.beta());
    let mut acc = RadicalSum::new();
    if span > n {
        return acc;
    }
    for j in 0..=(n - span) {
        let (ja, jb) = (j + a, j + b);
        if ja > n || jb > n {
            continue;
        }
        let products: Vec<Radical> = match kind {
            Integrand::Cross => vec![&alpha[ja] * &beta[jb]],
            Integrand::Diagonal => vec![&alpha[ja] * &alpha[jb], -(&beta[ja] * &beta[jb])],
        };
        if products.iter().all(Radical::is_zero) {
            continue;
        }
        let top = binom_int((n - span) as i64, j as i64);
        let weight2 = Rational::new(
            &top * &top,
            binom_int(n as i64, ja as i64) * binom_int(n as i64, jb as i64),
        );
        let weight = sqrt_canonical(&weight2).expect("binomial ratio is nonnegative");
        for p in &products {
            if !p.is_zero() {
                acc.add_radical(&(&weight * p));
            }
        }
    }
    acc
}

fn check_range(code: &PICode, span: usize, a: usize, b: usize) -> Result<()> {
    if span > code.n() {
        return Err(Error::Precondition(format!(
            "span {span} exceeds code length {}",
            code.n()
        )));
    }
    if a > span || b > span {
        return Err(Error::Precondition(format!("need 0 <= a, b <= {span}, got ({a}, {b})")));
    }
    Ok(())
}

/// Left-hand side of (C3) with the index range `0..=span`.
pub fn c3_residual_span(code: &PICode, span: usize, a: usize, b: usize) -> Result<RadicalSum> {
    check_range(code, span, a, b)?;
    Ok(condition_sum(code, span, a, b, Integrand::Cross))
}

/// Left-hand side of (C4) with the index range `0..=span`.
pub fn c4_residual_span(code: &PICode, span: usize, a: usize, b: usize) -> Result<RadicalSum> {
    check_range(code, span, a, b)?;
    Ok(condition_sum(code, span, a, b, Integrand::Diagonal))
}

/// (C3) for `t` Pauli errors.
pub fn c3_residual(code: &PICode, t: usize, a: usize, b: usize) -> Result<RadicalSum> {
    c3_residual_span(code, 2 * t, a, b)
}

/// (C4) for `t` Pauli errors.
pub fn c4_residual(code: &PICode, t: usize, a: usize, b: usize) -> Result<RadicalSum> {
    c4_residual_span(code, 2 * t, a, b)
}

fn verify_model(code: &PICode, model: ErrorModel, exec: Execution) -> Result<Vec<ConditionReport>> {
    let span = model.span();
    if span > code.n() {
        return Err(Error::Precondition(format!(
            "{model:?} needs n >= {span}, code has n = {}",
            code.n()
        )));
    }
    let ip = code.inner_products();
    let mut reports = vec![
        ConditionReport::new(Condition::C1, 0, 0, model, ip.overlap),
        ConditionReport::new(Condition::C2, 0, 0, model, ip.norm0_defect),
        ConditionReport::new(Condition::C2, 1, 1, model, ip.norm1_defect),
    ];
    let mut grid = Vec::new();
    for cond in [Condition::C3, Condition::C4] {
        for a in 0..=span {
            for b in 0..=span {
                grid.push((cond, a, b));
            }
        }
    }
    reports.extend(par::map(exec, &grid, |&(cond, a, b)| {
        let kind = match cond {
            Condition::C3 => Integrand::Cross,
            _ => Integrand::Diagonal,
        };
        ConditionReport::new(cond, a, b, model, condition_sum(code, span, a, b, kind))
    }));
    Ok(reports)
}

/// All reports for correcting `t` Pauli errors: (C1), (C2) for each
/// codeword, and every `(a, b)` pair of (C3)/(C4) in row-major order.
pub fn verify_pauli(code: &PICode, t: usize) -> Result<Vec<ConditionReport>> {
    verify_pauli_with(code, t, Execution::default())
}

pub fn verify_pauli_with(code: &PICode, t: usize, exec: Execution) -> Result<Vec<ConditionReport>> {
    verify_model(code, ErrorModel::Pauli { t }, exec)
}

/// As [`verify_pauli`] with `2t` replaced by the deletion count `s`.
pub fn verify_deletion(code: &PICode, s: usize) -> Result<Vec<ConditionReport>> {
    verify_deletion_with(code, s, Execution::default())
}

pub fn verify_deletion_with(code: &PICode, s: usize, exec: Execution) -> Result<Vec<ConditionReport>> {
    verify_model(code, ErrorModel::Deletion { s }, exec)
}

/// Kraus operator `E_a = G^a F^(s-a)` of the `s`-deletion channel restricted
/// to permutation-invariant inputs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DeletionKrausIndex {
    pub s: usize,
    pub a: usize,
}

impl DeletionKrausIndex {
    pub fn new(s: usize, a: usize) -> Result<Self> {
        if a > s {
            return Err(Error::InvalidParams(format!("need a <= s, got a = {a}, s = {s}")));
        }
        Ok(DeletionKrausIndex { s, a })
    }

    /// Number of bra strings `<c|` on `s` positions with weight `a`; each
    /// acts on permutation-invariant states exactly like `E_a`.
    pub fn multiplicity(&self) -> Rational {
        Rational::from_integer(binom_int(self.s as i64, self.a as i64))
    }
}

/// Coefficient of `E_a |D^n_w>` on `|D^(n-s)_(w-a)>`:
/// `sqrt(C(n-s, w-a) / C(n, w))`, zero when `w < a` or `w - a > n - s`.
pub fn dicke_kraus_coefficient(n: usize, w: usize, idx: DeletionKrausIndex) -> Radical {
    if w < idx.a || idx.s > n || w > n {
        return Radical::zero();
    }
    let num = binom_int((n - idx.s) as i64, (w - idx.a) as i64);
    let q = Rational::new(num, binom_int(n as i64, w as i64));
    sqrt_canonical(&q).expect("binomial ratio is nonnegative")
}

/// Images `E_a|c0>` and `E_a|c1>` over the `(n-s)`-qubit Dicke basis.
pub fn deletion_kraus_action(code: &PICode, idx: DeletionKrausIndex) -> Result<(Vec<Radical>, Vec<Radical>)> {
    let n = code.n();
    if idx.s > n || idx.a > idx.s {
        return Err(Error::Precondition(format!(
            "need 0 <= a <= s <= n, got a = {}, s = {}, n = {n}",
            idx.a, idx.s
        )));
    }
    let image = |coeffs: &[Radical]| {
        let mut out = vec![Radical::zero(); n - idx.s + 1];
        for (w, c) in coeffs.iter().enumerate() {
            if c.is_zero() || w < idx.a || w - idx.a > n - idx.s {
                continue;
            }
            out[w - idx.a] = c * &dicke_kraus_coefficient(n, w, idx);
        }
        out
    };
    Ok((image(code.alpha()), image(code.beta())))
}

/// `<c_i| E_a^dagger E_a |c_i>` for one bra string of weight `a`.
pub fn kraus_expectation(code: &PICode, idx: DeletionKrausIndex, i: usize) -> Result<Rational> {
    let (img0, img1) = deletion_kraus_action(code, idx)?;
    let img = if i == 0 { img0 } else { img1 };
    Ok(img.iter().map(Radical::square).sum())
}

/// `sum_a C(s, a) <c_i| E_a^dagger E_a |c_i>`, which equals the squared norm
/// of codeword `i`.
pub fn kraus_completeness(code: &PICode, s: usize, i: usize) -> Result<Rational> {
    let mut total = Rational::from_integer(0.into());
    for a in 0..=s {
        let idx = DeletionKrausIndex::new(s, a)?;
        total += idx.multiplicity() * kraus_expectation(code, idx, i)?;
    }
    Ok(total)
}
