//! Dense state-vector reference implementation. Basis index bit `n - p`
//! (counting from the least significant bit) holds qubit `p`, so qubit 1 is
//! the leftmost symbol of a ket string.

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::code::PICode;
use crate::error::{Error, Result};
use crate::exact::binom_int;
use crate::par::{self, Execution};

/// Largest qubit count for state vectors.
pub const MAX_QUBITS: usize = 24;
/// Largest qubit count for dense density matrices (`4^n` entries).
pub const MAX_DENSITY_QUBITS: usize = 11;

pub type Density = DMatrix<Complex64>;

fn guard(n: usize, limit: usize) -> Result<()> {
    if n > limit {
        return Err(Error::TooManyQubits { n, limit });
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct DenseState {
    n: usize,
    amp: Vec<Complex64>,
}

impl DenseState {
    pub fn new(n: usize, amp: Vec<Complex64>) -> Result<Self> {
        guard(n, MAX_QUBITS)?;
        if amp.len() != 1 << n {
            return Err(Error::InvalidParams(format!(
                "{} amplitudes for {n} qubits",
                amp.len()
            )));
        }
        Ok(DenseState { n, amp })
    }

    pub fn zero(n: usize) -> Result<Self> {
        guard(n, MAX_QUBITS)?;
        Ok(DenseState {
            n,
            amp: vec![Complex64::new(0.0, 0.0); 1 << n],
        })
    }

    /// Computational basis state; `bits[0]` is qubit 1.
    pub fn basis(bits: &[u8]) -> Result<Self> {
        let mut s = Self::zero(bits.len())?;
        let idx = bits.iter().fold(0usize, |acc, &b| (acc << 1) | (b as usize & 1));
        s.amp[idx] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amp(&self) -> &[Complex64] {
        &self.amp
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amp.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `<self|other>`; zero when the qubit counts differ.
    pub fn inner(&self, other: &DenseState) -> Complex64 {
        if self.n != other.n {
            return Complex64::new(0.0, 0.0);
        }
        self.amp.iter().zip(&other.amp).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn scaled(&self, c: Complex64) -> DenseState {
        DenseState {
            n: self.n,
            amp: self.amp.iter().map(|a| a * c).collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &DenseState) -> f64 {
        assert_eq!(self.n, other.n);
        self.amp
            .iter()
            .zip(&other.amp)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `|psi><psi|`.
    pub fn density(&self) -> Result<Density> {
        guard(self.n, MAX_DENSITY_QUBITS)?;
        let dim = self.amp.len();
        Ok(Density::from_fn(dim, dim, |i, j| self.amp[i] * self.amp[j].conj()))
    }
}

fn bit_of(n: usize, pos: usize) -> usize {
    n - pos
}

fn check_positions(n: usize, positions: &[usize]) -> Result<()> {
    let mut seen = vec![false; n + 1];
    for &p in positions {
        if p == 0 || p > n {
            return Err(Error::InvalidParams(format!("position {p} outside 1..={n}")));
        }
        if seen[p] {
            return Err(Error::InvalidParams(format!("position {p} repeated")));
        }
        seen[p] = true;
    }
    Ok(())
}

/// `|D^n_w>`: amplitude `1/sqrt(C(n, w))` on every weight-`w` string.
pub fn expand_dicke(n: usize, w: usize) -> Result<DenseState> {
    let mut coeffs = vec![0.0; n + 1];
    if w > n {
        return Err(Error::InvalidParams(format!("weight {w} exceeds n = {n}")));
    }
    coeffs[w] = 1.0;
    expand_coeffs(n, &coeffs)
}

/// `sum_w coeffs[w] |D^n_w>`.
pub fn expand_coeffs(n: usize, coeffs: &[f64]) -> Result<DenseState> {
    guard(n, MAX_QUBITS)?;
    if coeffs.len() != n + 1 {
        return Err(Error::InvalidParams(format!(
            "{} Dicke coefficients for n = {n}",
            coeffs.len()
        )));
    }
    let per_string: Vec<f64> = coeffs
        .iter()
        .enumerate()
        .map(|(w, c)| {
            let count = binom_int(n as i64, w as i64).to_f64().unwrap_or(f64::INFINITY);
            c / count.sqrt()
        })
        .collect();
    let amp = (0..1usize << n)
        .map(|x| Complex64::new(per_string[x.count_ones() as usize], 0.0))
        .collect();
    Ok(DenseState { n, amp })
}

/// Dense `|c0>, |c1>` with radicals rounded to double precision.
pub fn expand_code(code: &PICode) -> Result<(DenseState, DenseState)> {
    Ok((
        expand_coeffs(code.n(), &code.alpha_f64())?,
        expand_coeffs(code.n(), &code.beta_f64())?,
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

/// Tensor-product Pauli with the listed placements (identity elsewhere).
pub fn apply_pauli(state: &DenseState, ops: &[(usize, Pauli)]) -> Result<DenseState> {
    let n = state.n;
    let positions: Vec<usize> = ops.iter().map(|&(p, _)| p).collect();
    check_positions(n, &positions)?;
    let mut flip = 0usize;
    let mut zmask = 0usize;
    let mut y_count = 0u32;
    for &(p, op) in ops {
        let bit = 1usize << bit_of(n, p);
        match op {
            Pauli::X => flip |= bit,
            Pauli::Z => zmask |= bit,
            Pauli::Y => {
                flip |= bit;
                zmask |= bit;
                y_count += 1;
            }
        }
    }
    // Y = i X Z, so each Y contributes a global i on top of the X Z action
    let phase = [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, -1.0),
    ][(y_count % 4) as usize];
    let mut amp = vec![Complex64::new(0.0, 0.0); state.amp.len()];
    for (x, a) in state.amp.iter().enumerate() {
        let sign = if (x & zmask).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
        amp[x ^ flip] = a * phase * sign;
    }
    Ok(DenseState { n, amp })
}

/// `A_{E,<c|}`: contracts the qubits at `positions` with the bra string
/// `bits` and keeps the others in order.
pub fn apply_bra(state: &DenseState, positions: &[usize], bits: &[u8]) -> Result<DenseState> {
    let n = state.n;
    check_positions(n, positions)?;
    if bits.len() != positions.len() {
        return Err(Error::InvalidParams("bra string length differs from position count".into()));
    }
    let mut mask = 0usize;
    let mut want = 0usize;
    for (&p, &b) in positions.iter().zip(bits) {
        let bit = 1usize << bit_of(n, p);
        mask |= bit;
        if b & 1 == 1 {
            want |= bit;
        }
    }
    let kept: Vec<usize> = (0..n).filter(|k| mask & (1 << k) == 0).collect();
    let out_n = kept.len();
    let mut amp = vec![Complex64::new(0.0, 0.0); 1 << out_n];
    for (x, a) in state.amp.iter().enumerate() {
        if x & mask != want {
            continue;
        }
        let y = kept
            .iter()
            .enumerate()
            .fold(0usize, |acc, (i, &k)| acc | (((x >> k) & 1) << i));
        amp[y] = *a;
    }
    Ok(DenseState { n: out_n, amp })
}

/// `Tr_pos` of an `n`-qubit density matrix.
pub fn partial_trace(rho: &Density, n: usize, pos: usize) -> Result<Density> {
    check_positions(n, &[pos])?;
    let k = bit_of(n, pos);
    let dim = 1usize << (n - 1);
    let low = (1usize << k) - 1;
    let insert = |i: usize, b: usize| ((i & !low) << 1) | (b << k) | (i & low);
    Ok(Density::from_fn(dim, dim, |i, j| {
        rho[(insert(i, 0), insert(j, 0))] + rho[(insert(i, 1), insert(j, 1))]
    }))
}

/// `Tr_{e_1} o ... o Tr_{e_t}(|psi><psi|)`, tracing the largest position
/// first so that the remaining labels stay valid.
pub fn delete_partial_trace(state: &DenseState, positions: &[usize]) -> Result<Density> {
    check_positions(state.n, positions)?;
    let mut sorted = positions.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let mut rho = state.density()?;
    let mut n = state.n;
    for p in sorted {
        rho = partial_trace(&rho, n, p)?;
        n -= 1;
    }
    Ok(rho)
}

/// `sum_c A_{E,<c|} |psi><psi| A_{E,<c|}^dagger` over all bra strings `c`.
pub fn delete_kraus(state: &DenseState, positions: &[usize]) -> Result<Density> {
    check_positions(state.n, positions)?;
    let out_n = state.n - positions.len();
    guard(out_n, MAX_DENSITY_QUBITS)?;
    let dim = 1usize << out_n;
    let mut rho = Density::zeros(dim, dim);
    for bits in bra_strings(positions.len()) {
        let phi = apply_bra(state, positions, &bits)?;
        rho += Density::from_fn(dim, dim, |i, j| phi.amp[i] * phi.amp[j].conj());
    }
    Ok(rho)
}

fn bra_strings(t: usize) -> Vec<Vec<u8>> {
    (0..1usize << t)
        .map(|c| (0..t).map(|i| ((c >> (t - 1 - i)) & 1) as u8).collect())
        .collect()
}

/// Applies the amplitude-damping Kraus product with `A1 = sqrt(p)|0><1|`
/// on the `damped` positions and `A0 = diag(1, sqrt(1-p))` elsewhere.
pub fn apply_damping(state: &DenseState, damped: &[usize], p: f64) -> Result<DenseState> {
    let n = state.n;
    check_positions(n, damped)?;
    let dmask = damped.iter().fold(0usize, |m, &q| m | (1 << bit_of(n, q)));
    let (s1, s0) = (p.sqrt(), (1.0 - p).sqrt());
    let mut amp = vec![Complex64::new(0.0, 0.0); state.amp.len()];
    for (x, a) in state.amp.iter().enumerate() {
        if x & dmask != dmask {
            continue;
        }
        let undamped_ones = (x & !dmask).count_ones() as i32;
        let factor = s1.powi(damped.len() as i32) * s0.powi(undamped_ones);
        amp[x & !dmask] = a * factor;
    }
    Ok(DenseState { n, amp })
}

/// An operator the Gram check can apply to a pure state.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum DenseOperatorSpec {
    Pauli(Vec<(usize, Pauli)>),
    /// `A_{E,<c|}`; positions `E` paired with bra bits `c`.
    Bra { positions: Vec<usize>, bits: Vec<u8> },
}

impl DenseOperatorSpec {
    pub fn identity() -> Self {
        DenseOperatorSpec::Pauli(Vec::new())
    }

    pub fn apply(&self, state: &DenseState) -> Result<DenseState> {
        match self {
            DenseOperatorSpec::Pauli(ops) => apply_pauli(state, ops),
            DenseOperatorSpec::Bra { positions, bits } => apply_bra(state, positions, bits),
        }
    }
}

/// Identity plus every Pauli string of weight at most `t` on `n` qubits.
pub fn pauli_errors(n: usize, t: usize) -> Vec<DenseOperatorSpec> {
    fn rec(n: usize, start: usize, left: usize, cur: &mut Vec<(usize, Pauli)>, out: &mut Vec<DenseOperatorSpec>) {
        out.push(DenseOperatorSpec::Pauli(cur.clone()));
        if left == 0 {
            return;
        }
        for p in start..=n {
            for op in [Pauli::X, Pauli::Y, Pauli::Z] {
                cur.push((p, op));
                rec(n, p + 1, left - 1, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(n, 1, t, &mut Vec::new(), &mut out);
    out
}

/// All `2^|E|` bra-string operators `A_{E,<c|}` on the given positions.
/// For permutation-invariant codes one position set represents every
/// deletion pattern of the same size.
pub fn deletion_bra_ops(positions: &[usize]) -> Vec<DenseOperatorSpec> {
    bra_strings(positions.len())
        .into_iter()
        .map(|bits| DenseOperatorSpec::Bra {
            positions: positions.to_vec(),
            bits,
        })
        .collect()
}

/// Bra-string operators for deleting qubits `1..=s`.
pub fn deletion_errors(s: usize) -> Vec<DenseOperatorSpec> {
    let positions: Vec<usize> = (1..=s).collect();
    deletion_bra_ops(&positions)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GramReport {
    pub passed: bool,
    /// `max |<c_i|A^dagger B|c_j>|` over `i != j`.
    pub max_offdiag: f64,
    /// `max |<c_0|A^dagger B|c_0> - <c_1|A^dagger B|c_1>|`.
    pub max_diag_mismatch: f64,
}

/// Numerical Knill-Laflamme check of `code` against `errors`.
pub fn kl_gram_check(code: &PICode, errors: &[DenseOperatorSpec], tol: f64) -> Result<GramReport> {
    let (c0, c1) = expand_code(code)?;
    kl_gram_check_states(&c0, &c1, errors, tol, Execution::default())
}

/// Gram check on explicit dense codewords.
pub fn kl_gram_check_states(
    c0: &DenseState,
    c1: &DenseState,
    errors: &[DenseOperatorSpec],
    tol: f64,
    exec: Execution,
) -> Result<GramReport> {
    let images = par::map(exec, errors, |e| -> Result<(DenseState, DenseState)> {
        Ok((e.apply(c0)?, e.apply(c1)?))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let pairs: Vec<(usize, usize)> = (0..images.len())
        .flat_map(|a| (0..images.len()).map(move |b| (a, b)))
        .collect();
    let entries = par::map(exec, &pairs, |&(a, b)| {
        let (a0, a1) = &images[a];
        let (b0, b1) = &images[b];
        let off = a0.inner(b1).norm().max(a1.inner(b0).norm());
        let diag = (a0.inner(b0) - a1.inner(b1)).norm();
        (off, diag)
    });
    let (max_offdiag, max_diag_mismatch) = entries
        .into_iter()
        .fold((0.0f64, 0.0f64), |(o, d), (eo, ed)| (o.max(eo), d.max(ed)));
    Ok(GramReport {
        passed: max_offdiag < tol && max_diag_mismatch < tol,
        max_offdiag,
        max_diag_mismatch,
    })
}
