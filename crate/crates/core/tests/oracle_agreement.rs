//! Exact verdicts checked against dense simulation and an independent
//! high-precision evaluation.

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, ToPrimitive};

use piqec::code::{construct_gmdelta, GmdParams, PICode};
use piqec::damping::{ad_dicke_inner, cross_terms_vanish, trace_m_poly, ADClass};
use piqec::exact::{binom_int, rat, Rational};
use piqec::kl::{all_passed, verify_deletion, verify_pauli, ConditionReport};
use piqec::oracle::{
    apply_damping, deletion_errors, expand_code, expand_dicke, kl_gram_check, pauli_errors, DenseState,
};

const PLACES: u32 = 60;
const ZERO_THRESHOLD: u32 = 30;
const GRAM_TOL: f64 = 1e-10;

fn q(g: u32, m: u32, d: u32) -> PICode {
    construct_gmdelta(GmdParams::new(g, m, d).unwrap()).unwrap()
}

fn fixtures(n_max: usize) -> Vec<PICode> {
    let mut out = Vec::new();
    for g in 1..=6 {
        for m in 1..=3 {
            for d in 0..=6 {
                let p = GmdParams::new(g, m, d).unwrap();
                if p.n() <= n_max {
                    out.push(construct_gmdelta(p).unwrap());
                }
            }
        }
    }
    out
}

/// `floor(c * sqrt(d) * 10^PLACES)` via integer square roots only.
fn fixed(coef: &Rational, radicand: &BigUint) -> BigInt {
    let scale = BigInt::from(10).pow(PLACES);
    let c2 = coef * coef;
    let inner = BigInt::from(radicand.clone()) * c2.numer() * &scale * &scale / c2.denom();
    let mag = inner.sqrt();
    if coef.is_negative() {
        -mag
    } else {
        mag
    }
}

fn numerically_zero(r: &ConditionReport) -> bool {
    let total: BigInt = r.residual.terms().map(|t| fixed(t.coef(), t.radicand())).sum();
    total.abs() < BigInt::from(10).pow(PLACES - ZERO_THRESHOLD)
}

#[test]
fn exact_verdicts_match_high_precision() {
    let mut checked = 0;
    for code in fixtures(13) {
        let n = code.n();
        let mut reports = Vec::new();
        for t in 1..=2.min((n - 1) / 2) {
            reports.extend(verify_pauli(&code, t).unwrap());
        }
        for s in 1..=3.min(n - 1) {
            reports.extend(verify_deletion(&code, s).unwrap());
        }
        for r in &reports {
            assert_eq!(r.passed, numerically_zero(r), "{} {:?}", code.label(), r);
            checked += 1;
        }
    }
    assert!(checked > 500);
}

#[test]
fn pauli_t_matches_deletion_2t() {
    for code in fixtures(13) {
        for t in 1..=2 {
            if 2 * t > code.n() {
                continue;
            }
            let p = all_passed(&verify_pauli(&code, t).unwrap());
            let d = all_passed(&verify_deletion(&code, 2 * t).unwrap());
            assert_eq!(p, d, "{} t={t}", code.label());
        }
    }
}

#[test]
fn deletion_gram_agrees_with_exact() {
    for code in fixtures(12) {
        for s in 1..=3.min(code.n()) {
            let exact = all_passed(&verify_deletion(&code, s).unwrap());
            let dense = kl_gram_check(&code, &deletion_errors(s), GRAM_TOL).unwrap();
            assert_eq!(exact, dense.passed, "{} s={s}: {dense:?}", code.label());
        }
    }
}

#[test]
fn pauli_gram_agrees_with_exact() {
    for code in fixtures(9) {
        let exact = all_passed(&verify_pauli(&code, 1).unwrap());
        let dense = kl_gram_check(&code, &pauli_errors(code.n(), 1), GRAM_TOL).unwrap();
        assert_eq!(exact, dense.passed, "{}: {dense:?}", code.label());
    }
}

/// `<D|A^dagger B|D>` in the dense simulation for `A` damping `{1..a}` and
/// `B` damping `{c+1..c+a}`.
fn dense_ad_inner(d: &DenseState, cls: ADClass, p: f64) -> f64 {
    let a: Vec<usize> = (1..=cls.a).collect();
    let b: Vec<usize> = (cls.c + 1..=cls.c + cls.a).collect();
    let x = apply_damping(d, &a, p).unwrap();
    let y = apply_damping(d, &b, p).unwrap();
    x.inner(&y).re
}

#[test]
fn ad_dicke_inner_matches_dense() {
    for n in 1..=8 {
        for w in 0..=n {
            let d = expand_dicke(n, w).unwrap();
            for a in 0..=3 {
                for c in 0..=a {
                    if a + c > n {
                        continue;
                    }
                    let cls = ADClass::new(a, c).unwrap();
                    for p in [0.03, 0.2] {
                        let exact = ad_dicke_inner(n, w, cls).eval_f64(p);
                        let dense = dense_ad_inner(&d, cls, p);
                        assert!((exact - dense).abs() < 1e-12, "n={n} w={w} {cls:?}: {exact} vs {dense}");
                    }
                }
            }
        }
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n);
        out.push(s);
    }
    out
}

#[test]
fn trace_m_bound_and_cross_terms() {
    for (code, t) in [(q(2, 1, 2), 1), (q(3, 1, 3), 2), (q(2, 2, 1), 1)] {
        let n = code.n();
        let (c0, c1) = expand_code(&code).unwrap();
        let tr = trace_m_poly(&code, t);
        for (p, pf) in [(rat(1, 100), 0.01), (rat(1, 20), 0.05)] {
            let floor = rat(1, 1) - Rational::from_integer(binom_int(n as i64, t as i64 + 1)) * pow(&p, t + 1);
            assert!(tr.eval(&p) >= floor, "{} p={pf}", code.label());
            let mut dense = 0.0;
            let mut max_cross = 0.0f64;
            let ops: Vec<Vec<usize>> = (0..=t).flat_map(|k| subsets(n, k)).collect();
            let d0: Vec<DenseState> = ops.iter().map(|a| apply_damping(&c0, a, pf).unwrap()).collect();
            let d1: Vec<DenseState> = ops.iter().map(|a| apply_damping(&c1, a, pf).unwrap()).collect();
            for (x0, x1) in d0.iter().zip(&d1) {
                dense += (x0.norm_sqr() + x1.norm_sqr()) / 2.0;
                for y1 in &d1 {
                    max_cross = max_cross.max(x0.inner(y1).norm());
                }
            }
            assert!((dense - tr.eval(&p).to_f64().unwrap()).abs() < 1e-12);
            assert!(max_cross < 1e-14, "{} cross {max_cross}", code.label());
        }
        assert!(cross_terms_vanish(&code, t));
    }
}

fn pow(p: &Rational, e: usize) -> Rational {
    (0..e).fold(rat(1, 1), |acc, _| acc * p)
}
