//! Permutation-invariant codes stored as exact Dicke-weight coefficient
//! vectors, plus the (g, m, delta) family and the odd-length
//! parity-split family used for code search.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{binom_gen, binom_int, sqrt_canonical, Radical, RadicalSum, Rational};

/// A two-dimensional permutation-invariant code on `n` qubits:
/// `|c0> = sum_j alpha_j |D^n_j>` and `|c1> = sum_j beta_j |D^n_j>`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CodeRepr")]
pub struct PICode {
    n: usize,
    label: String,
    alpha: Vec<Radical>,
    beta: Vec<Radical>,
}

#[derive(Deserialize)]
struct CodeRepr {
    n: usize,
    #[serde(default)]
    label: String,
    alpha: Vec<Radical>,
    beta: Vec<Radical>,
}

impl TryFrom<CodeRepr> for PICode {
    type Error = Error;
    fn try_from(r: CodeRepr) -> Result<Self> {
        PICode::new(r.n, r.alpha, r.beta, r.label)
    }
}

/// Exact `(sum alpha_j beta_j, sum alpha_j^2 - 1, sum beta_j^2 - 1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InnerProducts {
    pub overlap: RadicalSum,
    pub norm0_defect: RadicalSum,
    pub norm1_defect: RadicalSum,
}

impl InnerProducts {
    pub fn all_zero(&self) -> bool {
        self.overlap.is_zero() && self.norm0_defect.is_zero() && self.norm1_defect.is_zero()
    }
}

impl PICode {
    pub fn new(n: usize, alpha: Vec<Radical>, beta: Vec<Radical>, label: impl Into<String>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParams("code length must be positive".into()));
        }
        if alpha.len() != n + 1 || beta.len() != n + 1 {
            return Err(Error::InvalidParams(format!(
                "coefficient vectors must have n+1 = {} entries (got {} and {})",
                n + 1,
                alpha.len(),
                beta.len()
            )));
        }
        Ok(PICode {
            n,
            label: label.into(),
            alpha,
            beta,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn alpha(&self) -> &[Radical] {
        &self.alpha
    }

    pub fn beta(&self) -> &[Radical] {
        &self.beta
    }

    /// Coefficients of codeword `i` (0 or 1).
    pub fn codeword(&self, i: usize) -> &[Radical] {
        match i {
            0 => &self.alpha,
            _ => &self.beta,
        }
    }

    pub fn inner_products(&self) -> InnerProducts {
        let overlap = self.alpha.iter().zip(&self.beta).map(|(a, b)| a * b).collect();
        let defect = |v: &[Radical]| {
            let total: Rational = v.iter().map(Radical::square).sum();
            RadicalSum::from_rational(total - Rational::one())
        };
        InnerProducts {
            overlap,
            norm0_defect: defect(&self.alpha),
            norm1_defect: defect(&self.beta),
        }
    }

    /// Orthonormality of the two codewords, decided exactly.
    pub fn is_normalized(&self) -> bool {
        self.inner_products().all_zero()
    }

    pub fn alpha_f64(&self) -> Vec<f64> {
        self.alpha.iter().map(Radical::to_f64).collect()
    }

    pub fn beta_f64(&self) -> Vec<f64> {
        self.beta.iter().map(Radical::to_f64).collect()
    }

    /// Dicke weights carrying a nonzero coefficient in codeword `i`.
    pub fn support(&self, i: usize) -> Vec<usize> {
        self.codeword(i)
            .iter()
            .enumerate()
            .filter(|(_, r)| !r.is_zero())
            .map(|(j, _)| j)
            .collect()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }
}

/// Exact `code_inner_products`: overlap and the two normalization defects.
pub fn code_inner_products(code: &PICode) -> (RadicalSum, RadicalSum, RadicalSum) {
    let ip = code.inner_products();
    (ip.overlap, ip.norm0_defect, ip.norm1_defect)
}

/// Parameters of the (g, m, delta) family; the length `n = 2gm + delta + 1`
/// is always derived.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GmdParams {
    pub g: u32,
    pub m: u32,
    pub delta: u32,
}

impl GmdParams {
    pub fn new(g: u32, m: u32, delta: u32) -> Result<Self> {
        let p = GmdParams { g, m, delta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.g == 0 || self.m == 0 {
            return Err(Error::InvalidParams(format!(
                "(g, m, delta) = ({}, {}, {}) needs g >= 1 and m >= 1",
                self.g, self.m, self.delta
            )));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        (2 * self.g * self.m + self.delta + 1) as usize
    }

    pub fn label(&self) -> String {
        format!("Q({},{},{})", self.g, self.m, self.delta)
    }

    /// `n / g` as an exact rational.
    pub fn n_over_g(&self) -> Rational {
        Rational::new(BigInt::from(self.n()), BigInt::from(self.g))
    }

    /// Normalizing factor squared,
    /// `gamma^2 = C(n/(2g), m) (n - 2gm) / (g (m+1))`.
    pub fn gamma_squared(&self) -> Rational {
        let n = self.n() as i64;
        let (g, m) = (self.g as i64, self.m as i64);
        let half = Rational::new(BigInt::from(n), BigInt::from(2 * g));
        binom_gen(&half, m) * Rational::new(BigInt::from(n - 2 * g * m), BigInt::from(g * (m + 1)))
    }

    /// `b_l^2 = C(m, l) / C(n/g - l, m+1)` for `l = 0..=m`.
    pub fn b_squared(&self) -> Vec<Rational> {
        let m = self.m as i64;
        let x = self.n_over_g();
        (0..=m)
            .map(|l| {
                let den = binom_gen(&(&x - Rational::from_integer(BigInt::from(l))), m + 1);
                Rational::from_integer(binom_int(m, l)) / den
            })
            .collect()
    }

    /// Squared amplitudes `f(l)^2 = gamma^2 b_l^2`; they sum to one.
    pub fn amplitudes_squared(&self) -> Vec<Rational> {
        let gamma2 = self.gamma_squared();
        self.b_squared().into_iter().map(|b| &gamma2 * b).collect()
    }
}

/// Builds `Q_{g,m,delta}`: amplitude `f(l) = gamma b_l` sits on weight `gl`
/// of `|c0>` for even `l` and on weight `n - gl` for odd `l`; `|c1>` gets
/// `f(l)` on `gl` for odd `l` and `-f(l)` on `n - gl` for even `l`.
pub fn construct_gmdelta(params: GmdParams) -> Result<PICode> {
    params.validate()?;
    let n = params.n();
    let g = params.g as usize;
    let mut alpha = vec![Radical::zero(); n + 1];
    let mut beta = vec![Radical::zero(); n + 1];
    for (l, f2) in params.amplitudes_squared().iter().enumerate() {
        let f = sqrt_canonical(f2)?;
        let (low, high) = (g * l, n - g * l);
        if l % 2 == 0 {
            alpha[low] = f.clone();
            beta[high] = -f;
        } else {
            alpha[high] = f.clone();
            beta[low] = f;
        }
    }
    let code = PICode::new(n, alpha, beta, params.label())?;
    let ip = code.inner_products();
    if !ip.all_zero() {
        return Err(Error::NotNormalized(format!(
            "{}: overlap {}, defects {} / {}",
            code.label, ip.overlap, ip.norm0_defect, ip.norm1_defect
        )));
    }
    Ok(code)
}

/// Builds the odd-length code with `|c0> ~ sum_l q_{2l} sqrt(C(n,2l)) |D^n_{2l}>`
/// and `|c1> ~ sum_l q_{n-2l-1} sqrt(C(n,2l+1)) |D^n_{2l+1}>`, then rescales
/// both codewords to unit norm. `q[l]` holds `q_{2l}`.
///
/// Coefficients are radicals so that closed-form solutions such as
/// `q_2 = 1/sqrt(45)` can be represented exactly.
pub fn construct_pr_code(n: usize, q: &[Radical]) -> Result<PICode> {
    let code = pr_code_unnormalized(n, q)?;
    let norm0: Rational = code.alpha.iter().map(Radical::square).sum();
    let norm1: Rational = code.beta.iter().map(Radical::square).sum();
    if norm0.is_zero() || norm1.is_zero() {
        return Err(Error::InvalidParams("coefficient vector q is zero".into()));
    }
    let s0 = sqrt_canonical(&norm0.recip())?;
    let s1 = sqrt_canonical(&norm1.recip())?;
    let alpha = code.alpha.iter().map(|a| a * &s0).collect();
    let beta = code.beta.iter().map(|b| b * &s1).collect();
    PICode::new(n, alpha, beta, format!("PR(n={n})"))
}

/// Rational-coefficient convenience wrapper for [`construct_pr_code`].
pub fn construct_pr_code_rational(n: usize, q: &[Rational]) -> Result<PICode> {
    let q: Vec<Radical> = q.iter().cloned().map(Radical::rational).collect();
    construct_pr_code(n, &q)
}

/// The parity-split code before rescaling.
pub fn pr_code_unnormalized(n: usize, q: &[Radical]) -> Result<PICode> {
    if n.is_multiple_of(2) {
        return Err(Error::InvalidParams(format!("length n = {n} must be odd")));
    }
    let half = n.div_ceil(2);
    if q.len() != half {
        return Err(Error::InvalidParams(format!(
            "expected (n+1)/2 = {half} coefficients, got {}",
            q.len()
        )));
    }
    let root_binom = |k: usize| -> Result<Radical> {
        sqrt_canonical(&Rational::from_integer(binom_int(n as i64, k as i64)))
    };
    let mut alpha = vec![Radical::zero(); n + 1];
    let mut beta = vec![Radical::zero(); n + 1];
    for l in 0..half {
        alpha[2 * l] = &q[l] * &root_binom(2 * l)?;
        // q_{n-2l-1} lives at index (n-2l-1)/2
        beta[2 * l + 1] = &q[(n - 2 * l - 1) / 2] * &root_binom(2 * l + 1)?;
    }
    PICode::new(n, alpha, beta, format!("PR(n={n}, unnormalized)"))
}
