//! Generalized Pollatsek-Ruskai quadratic systems (D1)-(D3) for odd-length
//! parity-split codes, exact residuals, and a seeded multi-start
//! Levenberg-Marquardt search for numerical solutions.
//!
//! Variables are `q_0, q_2, ..., q_{n-1}`; slot `l` of every vector holds
//! `q_{2l}`.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{binom_int, sqrt_canonical, to_scientific, Radical, RadicalSum, Rational};
use crate::par::{self, Execution};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Family {
    D1,
    D2,
    D3,
}

/// Homogeneous quadratic form `sum c_ij q_i q_j` over variable slots.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Equation {
    pub family: Family,
    pub a: usize,
    pub b: usize,
    /// `(i, j)` with `i <= j` (variable slots) mapped to the merged coefficient.
    terms: BTreeMap<(usize, usize), BigInt>,
}

impl Equation {
    fn new(family: Family, a: usize, b: usize) -> Self {
        Equation {
            family,
            a,
            b,
            terms: BTreeMap::new(),
        }
    }

    fn add(&mut self, i: usize, j: usize, c: BigInt) {
        let key = (i.min(j), i.max(j));
        let entry = self.terms.entry(key).or_default();
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    /// Merged integer coefficients, in `(i, j)` order.
    pub fn terms(&self) -> &BTreeMap<(usize, usize), BigInt> {
        &self.terms
    }

    pub fn coefficients(&self) -> Vec<BigInt> {
        self.terms.values().cloned().collect()
    }

    /// Coefficients divided by their gcd, sign fixed so the first is positive.
    pub fn primitive_coefficients(&self) -> Vec<BigInt> {
        let coeffs = self.coefficients();
        let g = coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
        if g.is_zero() {
            return coeffs;
        }
        let g = if coeffs[0].is_negative() { -g } else { g };
        coeffs.iter().map(|c| c / &g).collect()
    }

    pub fn eval_rational(&self, q: &[Rational]) -> Rational {
        self.terms
            .iter()
            .map(|(&(i, j), c)| Rational::from_integer(c.clone()) * &q[i] * &q[j])
            .sum()
    }

    /// `max_ij |c_ij q_i q_j|`, the size of the largest single term.
    pub fn leading_term(&self, q: &[Rational]) -> Rational {
        self.terms
            .iter()
            .map(|(&(i, j), c)| (Rational::from_integer(c.clone()) * &q[i] * &q[j]).abs())
            .max()
            .unwrap_or_else(Rational::zero)
    }

    pub fn eval_radical(&self, q: &[Radical]) -> RadicalSum {
        let mut acc = RadicalSum::new();
        for (&(i, j), c) in &self.terms {
            acc.add_radical(&(&q[i] * &q[j]).scale(&Rational::from_integer(c.clone())));
        }
        acc
    }

    fn eval_f64(&self, q: &[f64], coeffs: &[f64]) -> f64 {
        self.terms.keys().zip(coeffs).map(|(&(i, j), c)| c * q[i] * q[j]).sum()
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0 = 0");
        }
        for (k, (&(i, j), c)) in self.terms.iter().enumerate() {
            let mag = c.abs();
            let sign = if c.is_negative() { "-" } else { "+" };
            match (k, c.is_negative()) {
                (0, false) => {}
                (0, true) => write!(f, "-")?,
                _ => write!(f, " {sign} ")?,
            }
            if mag != BigInt::from(1) {
                write!(f, "{mag}*")?;
            }
            if i == j {
                write!(f, "q{}^2", 2 * i)?;
            } else {
                write!(f, "q{}*q{}", 2 * i, 2 * j)?;
            }
        }
        write!(f, " = 0")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuadraticSystem {
    pub n: usize,
    pub t: usize,
    pub equations: Vec<Equation>,
}

/// Builds (D1) for even `a`, odd `b` in `0..=2t`; (D2) for even `a <= b`
/// and (D3) for odd `a <= b`, both with `a + b < 2t`. Terms whose `q` index
/// falls outside `0..n` are dropped.
pub fn generate_system(n: usize, t: usize) -> Result<QuadraticSystem> {
    if n.is_multiple_of(2) {
        return Err(Error::InvalidParams(format!("length n = {n} must be odd")));
    }
    if n < 2 * t + 1 {
        return Err(Error::InvalidParams(format!("need n >= 2t + 1, got n = {n}, t = {t}")));
    }
    let (ni, ti) = (n as i64, t as i64);
    let kmax = (n - 1) / 2 - t;
    let coef = |k: usize| binom_int(ni - 2 * ti, 2 * k as i64);
    // variable slot of q_idx; None when idx is out of range or odd
    let slot = |idx: i64| ((0..ni).contains(&idx) && idx % 2 == 0).then_some((idx / 2) as usize);
    let push = |eq: &mut Equation, c: BigInt, i: i64, j: i64| {
        if let (Some(i), Some(j)) = (slot(i), slot(j)) {
            eq.add(i, j, c);
        }
    };
    let mut equations = Vec::new();
    for a in (0..=2 * t).step_by(2) {
        for b in (1..2 * t).step_by(2) {
            let mut eq = Equation::new(Family::D1, a, b);
            for k in 0..=kmax {
                let k2 = 2 * k as i64;
                push(&mut eq, coef(k), k2 + a as i64, ni - k2 - b as i64);
            }
            equations.push(eq);
        }
    }
    for (family, start) in [(Family::D2, 0usize), (Family::D3, 1usize)] {
        for a in (start..=2 * t).step_by(2) {
            for b in (a..=2 * t).step_by(2) {
                if a + b >= 2 * t {
                    continue;
                }
                let (a, b) = (a as i64, b as i64);
                let mut eq = Equation::new(family, a as usize, b as usize);
                for k in 0..=kmax {
                    let k2 = 2 * k as i64;
                    let c = coef(k);
                    match family {
                        Family::D2 => {
                            push(&mut eq, c.clone(), k2 + a, k2 + b);
                            push(&mut eq, -c, k2 + 2 * ti - a, k2 + 2 * ti - b);
                        }
                        _ => {
                            push(&mut eq, c.clone(), ni - k2 - a, ni - k2 - b);
                            push(&mut eq, -c, ni - k2 - 2 * ti + a, ni - k2 - 2 * ti + b);
                        }
                    }
                }
                equations.push(eq);
            }
        }
    }
    Ok(QuadraticSystem { n, t, equations })
}

impl QuadraticSystem {
    pub fn num_vars(&self) -> usize {
        self.n.div_ceil(2)
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.num_vars() {
            return Err(Error::InvalidParams(format!(
                "expected {} coefficients, got {len}",
                self.num_vars()
            )));
        }
        Ok(())
    }

    /// Exact residual of each equation.
    pub fn residual(&self, q: &[Rational]) -> Result<Vec<Rational>> {
        self.check_len(q.len())?;
        Ok(self.equations.iter().map(|e| e.eval_rational(q)).collect())
    }

    /// Each residual divided by the size of its largest term (zero when
    /// every term vanishes).
    pub fn relative_residual(&self, q: &[Rational]) -> Result<Vec<Rational>> {
        self.check_len(q.len())?;
        Ok(self
            .equations
            .iter()
            .map(|e| {
                let lead = e.leading_term(q);
                if lead.is_zero() {
                    Rational::zero()
                } else {
                    e.eval_rational(q) / lead
                }
            })
            .collect())
    }

    /// Exact residuals at radical coefficients.
    pub fn residual_radical(&self, q: &[Radical]) -> Result<Vec<RadicalSum>> {
        self.check_len(q.len())?;
        Ok(self.equations.iter().map(|e| e.eval_radical(q)).collect())
    }

    fn f64_coefficients(&self) -> Vec<Vec<f64>> {
        self.equations
            .iter()
            .map(|e| e.terms.values().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect())
            .collect()
    }
}

/// How the scale freedom of the homogeneous system is removed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Gauge {
    /// Slot `l` (variable `q_{2l}`) is fixed to 1.
    Pin(usize),
    /// `sum q^2 = 1` is appended as an extra equation.
    UnitNorm,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveConfig {
    pub restarts: usize,
    pub seed: u64,
    pub gauge: Gauge,
    /// Threshold on the certified max-abs residual.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Random starts are uniform in `[-init_scale, init_scale]`.
    pub init_scale: f64,
    /// Starting points tried before the random ones (full `q` vectors).
    pub extra_starts: Vec<Vec<f64>>,
    pub execution: Execution,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            restarts: 100,
            seed: 7,
            gauge: Gauge::Pin(0),
            tolerance: 1e-10,
            max_iterations: 500,
            init_scale: 0.5,
            extra_starts: Vec::new(),
            execution: Execution::default(),
        }
    }
}

impl SolveConfig {
    pub fn validate(&self, system: &QuadraticSystem) -> Result<()> {
        if self.restarts == 0 && self.extra_starts.is_empty() {
            return Err(Error::InvalidParams("restarts must be at least 1".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidParams("tolerance must be positive".into()));
        }
        if let Gauge::Pin(l) = self.gauge {
            if l >= system.num_vars() {
                return Err(Error::InvalidParams(format!("gauge slot {l} out of range")));
            }
        }
        if self.extra_starts.iter().any(|s| s.len() != system.num_vars()) {
            return Err(Error::InvalidParams("extra start has the wrong length".into()));
        }
        Ok(())
    }
}

/// A converged point with its exact residual certificate.
#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    /// Slot `l` holds `q_{2l}`.
    pub q: Vec<f64>,
    /// Max absolute exact residual at the dyadic rationals equal to `q`.
    pub certified_residual: Rational,
    /// Exact coefficients when every `q_i^2` is recognized as a small
    /// rational and the radical point satisfies the system exactly.
    pub closed_form: Option<Vec<Radical>>,
    /// Index of the start that produced it (extra starts first).
    pub start: usize,
}

impl Solution {
    pub fn q_rational(&self) -> Vec<Rational> {
        self.q.iter().map(|&x| Rational::from_float(x).expect("finite")).collect()
    }

    pub fn residual_f64(&self) -> f64 {
        self.certified_residual.to_f64().unwrap_or(f64::INFINITY)
    }
}

impl Serialize for Solution {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = ser.serialize_map(Some(5))?;
        let q: Vec<String> = self.q.iter().map(|x| format!("{x:e}")).collect();
        map.serialize_entry("q", &q)?;
        map.serialize_entry("certified_residual", &self.certified_residual.to_string())?;
        map.serialize_entry("certified_residual_decimal", &to_scientific(&self.certified_residual, 15))?;
        map.serialize_entry("closed_form", &self.closed_form)?;
        map.serialize_entry("start", &self.start)?;
        map.end()
    }
}

struct Problem<'a> {
    system: &'a QuadraticSystem,
    coeffs: Vec<Vec<f64>>,
    gauge: Gauge,
    free: Vec<usize>,
}

impl<'a> Problem<'a> {
    fn new(system: &'a QuadraticSystem, gauge: Gauge) -> Self {
        let free = (0..system.num_vars())
            .filter(|&l| gauge != Gauge::Pin(l))
            .collect();
        Problem {
            system,
            coeffs: system.f64_coefficients(),
            gauge,
            free,
        }
    }

    fn full(&self, y: &DVector<f64>) -> Vec<f64> {
        let mut q = vec![1.0; self.system.num_vars()];
        for (k, &l) in self.free.iter().enumerate() {
            q[l] = y[k];
        }
        q
    }

    fn free_part(&self, q: &[f64]) -> DVector<f64> {
        DVector::from_iterator(self.free.len(), self.free.iter().map(|&l| q[l]))
    }

    fn residual(&self, q: &[f64]) -> DVector<f64> {
        let mut r: Vec<f64> = self
            .system
            .equations
            .iter()
            .zip(&self.coeffs)
            .map(|(e, c)| e.eval_f64(q, c))
            .collect();
        if self.gauge == Gauge::UnitNorm {
            r.push(q.iter().map(|x| x * x).sum::<f64>() - 1.0);
        }
        DVector::from_vec(r)
    }

    fn jacobian(&self, q: &[f64]) -> DMatrix<f64> {
        let rows = self.system.equations.len() + usize::from(self.gauge == Gauge::UnitNorm);
        let mut col_of = vec![None; q.len()];
        for (k, &l) in self.free.iter().enumerate() {
            col_of[l] = Some(k);
        }
        let mut jac = DMatrix::zeros(rows, self.free.len());
        for (r, (e, cs)) in self.system.equations.iter().zip(&self.coeffs).enumerate() {
            for (&(i, j), c) in e.terms.keys().zip(cs) {
                if let Some(k) = col_of[i] {
                    jac[(r, k)] += c * q[j];
                }
                if let Some(k) = col_of[j] {
                    jac[(r, k)] += c * q[i];
                }
            }
        }
        if self.gauge == Gauge::UnitNorm {
            for (k, &l) in self.free.iter().enumerate() {
                jac[(rows - 1, k)] = 2.0 * q[l];
            }
        }
        jac
    }

    fn cost(&self, y: &DVector<f64>) -> f64 {
        self.residual(&self.full(y)).norm_squared()
    }

    /// Levenberg-Marquardt with Marquardt scaling, then Gauss-Newton
    /// polishing through the pseudo-inverse.
    fn descend(&self, mut y: DVector<f64>, max_iter: usize) -> DVector<f64> {
        let mut lambda = 1e-3;
        let mut cost = self.cost(&y);
        for _ in 0..max_iter {
            if cost < 1e-30 || !cost.is_finite() {
                break;
            }
            let q = self.full(&y);
            let r = self.residual(&q);
            let jac = self.jacobian(&q);
            let jtj = jac.transpose() * &jac;
            let grad = jac.transpose() * &r;
            let mut improved = false;
            for _ in 0..20 {
                let mut a = jtj.clone();
                for d in 0..a.nrows() {
                    a[(d, d)] += lambda * jtj[(d, d)].max(1e-12);
                }
                let Some(step) = a.lu().solve(&(-&grad)) else {
                    lambda *= 10.0;
                    continue;
                };
                let trial = &y + &step;
                let trial_cost = self.cost(&trial);
                if trial_cost < cost {
                    y = trial;
                    cost = trial_cost;
                    lambda = (lambda / 3.0).max(1e-15);
                    improved = true;
                    break;
                }
                lambda *= 4.0;
            }
            if !improved {
                break;
            }
        }
        for _ in 0..10 {
            let q = self.full(&y);
            let r = self.residual(&q);
            let Ok(step) = self.jacobian(&q).svd(true, true).solve(&r, 1e-14) else {
                break;
            };
            let trial = &y - step;
            let trial_cost = self.cost(&trial);
            if !(trial_cost < cost) {
                break;
            }
            y = trial;
            cost = trial_cost;
        }
        y
    }
}

/// Certified max-abs residual of the exact dyadic point `q` (gauge
/// equation included for the unit-norm gauge).
pub fn certify(system: &QuadraticSystem, q: &[f64], gauge: Gauge) -> Result<Rational> {
    let exact: Vec<Rational> = q
        .iter()
        .map(|&x| Rational::from_float(x).ok_or_else(|| Error::InvalidParams("non-finite coefficient".into())))
        .collect::<Result<_>>()?;
    let mut worst = system
        .residual(&exact)?
        .into_iter()
        .map(|r| r.abs())
        .max()
        .unwrap_or_else(Rational::zero);
    if gauge == Gauge::UnitNorm {
        let norm: Rational = exact.iter().map(|x| x * x).sum();
        worst = worst.max((norm - Rational::from_integer(1.into())).abs());
    }
    Ok(worst)
}

/// Best rational approximation with denominator at most `max_den`
/// (continued-fraction convergents).
pub fn rationalize(x: f64, max_den: u64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut v = x;
    for _ in 0..64 {
        let a = v.floor();
        if a.abs() > 1e15 {
            break;
        }
        let ai = a as i128;
        let (h2, k2) = (ai * h1 + h0, ai * k1 + k0);
        if k2 > max_den as i128 {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = v - a;
        if frac.abs() < 1e-15 {
            break;
        }
        v = 1.0 / frac;
    }
    (k1 != 0).then(|| Rational::new(BigInt::from(h1), BigInt::from(k1)))
}

/// Tries to read `q` as signed square roots of small rationals and checks
/// the result exactly against the system.
pub fn recognize_closed_form(system: &QuadraticSystem, q: &[f64]) -> Option<Vec<Radical>> {
    let mut out = Vec::with_capacity(q.len());
    for &x in q {
        let sq = rationalize(x * x, 100_000)?;
        let approx = sq.to_f64()?;
        if (approx - x * x).abs() > 1e-11 * (1.0 + x * x) {
            return None;
        }
        let root = sqrt_canonical(&sq).ok()?;
        out.push(if x < 0.0 { -root } else { root });
    }
    let exact = system.residual_radical(&out).ok()?;
    exact.iter().all(RadicalSum::is_zero).then_some(out)
}

/// Canonical representative under `q_{2l} -> (-1)^l q_{2l}` and (for the
/// unit-norm gauge) `q -> -q`: the first nonzero odd-slot entry is made
/// positive, then the first nonzero entry overall.
pub fn canonical_sign(q: &[f64]) -> Vec<f64> {
    const EPS: f64 = 1e-9;
    let mut v = q.to_vec();
    if let Some(x) = v.iter().skip(1).step_by(2).find(|x| x.abs() > EPS) {
        if *x < 0.0 {
            for (l, y) in v.iter_mut().enumerate() {
                if l % 2 == 1 {
                    *y = -*y;
                }
            }
        }
    }
    if let Some(x) = v.iter().find(|x| x.abs() > EPS) {
        if *x < 0.0 {
            v.iter_mut().for_each(|y| *y = -*y);
        }
    }
    v
}

/// Multi-start search. Each random start uses its own ChaCha stream derived
/// from `(seed, index)`, so the output does not depend on the execution
/// mode. Converged points are deduplicated by sign class and 1e-6
/// proximity, keeping the earliest start.
pub fn solve(system: &QuadraticSystem, cfg: &SolveConfig) -> Result<Vec<Solution>> {
    cfg.validate(system)?;
    let problem = Problem::new(system, cfg.gauge);
    let nv = system.num_vars();
    let mut starts: Vec<Vec<f64>> = cfg
        .extra_starts
        .iter()
        .map(|q| match cfg.gauge {
            Gauge::Pin(l) if q[l] != 0.0 => q.iter().map(|x| x / q[l]).collect(),
            _ => q.clone(),
        })
        .collect();
    for i in 0..cfg.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(i as u64);
        let mut q: Vec<f64> = (0..nv)
            .map(|_| rng.random_range(-cfg.init_scale..=cfg.init_scale))
            .collect();
        if let Gauge::Pin(l) = cfg.gauge {
            q[l] = 1.0;
        }
        starts.push(q);
    }
    let indexed: Vec<(usize, Vec<f64>)> = starts.into_iter().enumerate().collect();
    let outcomes = par::map(cfg.execution, &indexed, |(idx, q0)| {
        let y = problem.descend(problem.free_part(q0), cfg.max_iterations);
        let q = problem.full(&y);
        let residual = certify(system, &q, cfg.gauge).ok();
        (*idx, q, residual)
    });

    let mut best = f64::INFINITY;
    let mut found: Vec<Solution> = Vec::new();
    for (idx, q, residual) in outcomes {
        let Some(residual) = residual else { continue };
        let r = residual.to_f64().unwrap_or(f64::INFINITY);
        best = best.min(r);
        if !(r < cfg.tolerance) {
            continue;
        }
        let canon = canonical_sign(&q);
        let duplicate = found.iter().any(|s| {
            s.q.iter().zip(&canon).all(|(a, b)| (a - b).abs() < 1e-6)
        });
        if duplicate {
            continue;
        }
        let certified_residual = certify(system, &canon, cfg.gauge)?;
        found.push(Solution {
            closed_form: recognize_closed_form(system, &canon),
            q: canon,
            certified_residual,
            start: idx,
        });
    }
    if found.is_empty() {
        return Err(Error::NoSolution {
            restarts: indexed.len(),
            best_residual: best,
        });
    }
    Ok(found)
}

/// Unit-norm double-precision Dicke coefficient vectors of the code induced
/// by `q` (slot `l` holding `q_{2l}`).
pub fn pr_code_f64(n: usize, q: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    if n.is_multiple_of(2) || q.len() != n.div_ceil(2) {
        return Err(Error::InvalidParams(format!(
            "need odd n and (n+1)/2 coefficients, got n = {n}, {} values",
            q.len()
        )));
    }
    let root = |k: usize| binom_int(n as i64, k as i64).to_f64().unwrap_or(f64::NAN).sqrt();
    let mut alpha = vec![0.0; n + 1];
    let mut beta = vec![0.0; n + 1];
    for l in 0..q.len() {
        alpha[2 * l] = q[l] * root(2 * l);
        beta[2 * l + 1] = q[(n - 2 * l - 1) / 2] * root(2 * l + 1);
    }
    for v in [&mut alpha, &mut beta] {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidParams("coefficient vector q is zero".into()));
        }
        v.iter_mut().for_each(|x| *x /= norm);
    }
    Ok((alpha, beta))
}
