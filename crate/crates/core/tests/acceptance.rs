//! Acceptance criteria 1-8. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails. Each criterion also has a wall-clock limit.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use piqec::code::{construct_gmdelta, construct_pr_code, GmdParams, PICode};
use piqec::damping::{hadamard_cross_poly, ADClass, AdAnalysis};
use piqec::exact::{rat, sqrt_canonical, Radical, Rational};
use piqec::identities::{sweep, tally, GridSpec, Lemma};
use piqec::kl::{all_passed, kraus_completeness, verify_deletion, verify_pauli};
use piqec::oracle::{
    delete_kraus, delete_partial_trace, deletion_errors, expand_code, expand_coeffs, expand_dicke,
    kl_gram_check, kl_gram_check_states, pauli_errors, Density,
};
use piqec::pr::{generate_system, pr_code_f64, solve, SolveConfig};
use piqec::Execution;

const TRACE_TOL: f64 = 1e-12;
const GRAM_TOL: f64 = 1e-10;
const PR7_RESIDUAL: f64 = 1e-12;
const PR19_RESIDUAL: f64 = 1e-10;
const REFERENCE_RELATIVE: f64 = 1e-4;
const PR19_GRAM_TOL: f64 = 1e-6;
const PERMUTATION_TOL: f64 = 1e-12;

/// The ((19,2,5)) coefficients q_0, q_2, ..., q_18 as published, to six significant digits.
const REFERENCE_Q19: [&str; 10] = [
    "1", "0.0477572", "-0.0267249", "-0.00506367", "0.00332914", "0.00527235", "-0.000947223",
    "0.0152707", "0.00888631", "0.32678",
];

type Check = std::result::Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn q(g: u32, m: u32, d: u32) -> PICode {
    construct_gmdelta(GmdParams::new(g, m, d).unwrap()).unwrap()
}

fn squares(v: &[Radical]) -> Vec<(usize, Rational, i32)> {
    v.iter()
        .enumerate()
        .filter(|(_, r)| !r.is_zero())
        .map(|(j, r)| (j, r.square(), r.signum()))
        .collect()
}

fn max_entry_diff(a: &Density, b: &Density) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn criterion_1() -> Check {
    let q212 = q(2, 1, 2);
    ensure(
        squares(q212.alpha()) == vec![(0, rat(3, 10), 1), (5, rat(7, 10), 1)]
            && squares(q212.beta()) == vec![(2, rat(7, 10), 1), (7, rat(3, 10), -1)],
        "Q(2,1,2) amplitudes",
    )?;
    let q424 = q(4, 2, 4);
    ensure(
        squares(q424.alpha()) == vec![(0, rat(5, 68), 1), (8, rat(7, 12), 1), (17, rat(35, 102), 1)],
        "Q(4,2,4) amplitudes",
    )?;
    let q111 = q(1, 1, 1);
    ensure(
        squares(q111.alpha()) == vec![(0, rat(1, 3), 1), (3, rat(2, 3), 1)]
            && squares(q111.beta()) == vec![(1, rat(2, 3), 1), (4, rat(1, 3), -1)],
        "Q(1,1,1) amplitudes",
    )?;
    let q332 = q(3, 3, 2);
    let got: Vec<Rational> = squares(q332.alpha()).into_iter().map(|(_, s, _)| s).collect();
    ensure(
        got == vec![rat(1, 64), rat(21, 64), rat(35, 64), rat(7, 64)],
        "Q(3,3,2) amplitudes",
    )?;
    Ok("Q(2,1,2), Q(4,2,4), Q(1,1,1), Q(3,3,2) exact".into())
}

fn criterion_2() -> Check {
    for (code, t) in [(q(2, 1, 2), 1), (q(4, 2, 4), 2), (q(3, 3, 2), 1)] {
        let reports = verify_pauli(&code, t).map_err(|e| e.to_string())?;
        ensure(all_passed(&reports), format!("{} t={t} should pass", code.label()))?;
        ensure(reports.iter().all(|r| r.residual.is_empty()), "nonempty residual")?;
    }
    for (code, t) in [(q(2, 1, 2), 2), (q(1, 1, 1), 1)] {
        let reports = verify_pauli(&code, t).map_err(|e| e.to_string())?;
        ensure(!all_passed(&reports), format!("{} t={t} should fail", code.label()))?;
    }
    Ok("3 passing and 2 failing verdicts as expected".into())
}

fn criterion_3() -> Check {
    for (code, s) in [(q(1, 1, 1), 1), (q(2, 1, 2), 2), (q(4, 2, 4), 4)] {
        let reports = verify_deletion(&code, s).map_err(|e| e.to_string())?;
        ensure(all_passed(&reports), format!("{} s={s} should pass", code.label()))?;
    }
    let s = 2usize;
    let shortest = (s + 1) * (s + 1) - s;
    let params = GmdParams::new(s as u32, s.div_ceil(2) as u32, s as u32).unwrap();
    ensure(shortest == 7 && params.n() == 7, "(s+1)^2 - s = 7 for s = 2")?;
    // no admissible (g, m, delta) for s = 2 is shorter
    let min_len = (2..=4u32)
        .flat_map(|g| (1..=3u32).flat_map(move |m| (2..=4u32).map(move |d| GmdParams { g, m, delta: d })))
        .map(|p| p.n())
        .min()
        .unwrap();
    ensure(min_len == 7, format!("minimum admissible length {min_len}"))?;
    Ok("s = 1, 2, 4 pass; shortest s = 2 length is 7".into())
}

fn fixtures_up_to(n_max: usize) -> Vec<PICode> {
    let mut out = Vec::new();
    for g in 1..=8 {
        for m in 1..=4 {
            for d in 0..=8 {
                let p = GmdParams::new(g, m, d).unwrap();
                if p.n() <= n_max {
                    out.push(construct_gmdelta(p).unwrap());
                }
            }
        }
    }
    out
}

fn criterion_4() -> Check {
    let fixtures = fixtures_up_to(8);
    let mut trace_checks = 0;
    let mut worst = 0.0f64;
    for code in &fixtures {
        let n = code.n();
        let (c0, c1) = expand_code(code).map_err(|e| e.to_string())?;
        let sets: Vec<Vec<usize>> = vec![vec![1], vec![n], vec![1, 2], vec![2, n], vec![1, 2, 3], vec![1, n - 1, n]];
        for state in [&c0, &c1] {
            for e in sets.iter().filter(|e| e.len() <= n) {
                let a = delete_kraus(state, e).map_err(|e| e.to_string())?;
                let b = delete_partial_trace(state, e).map_err(|e| e.to_string())?;
                worst = worst.max(max_entry_diff(&a, &b));
                trace_checks += 1;
            }
        }
        for s in 1..=4.min(n) {
            let exact = all_passed(&verify_deletion(code, s).map_err(|e| e.to_string())?);
            let dense = kl_gram_check(code, &deletion_errors(s), GRAM_TOL).map_err(|e| e.to_string())?;
            ensure(
                exact == dense.passed,
                format!("{} s={s}: exact {exact} vs oracle {}", code.label(), dense.passed),
            )?;
        }
    }
    ensure(worst <= TRACE_TOL, format!("Kraus vs trace differ by {worst:e}"))?;
    let errs = pauli_errors(7, 1);
    ensure(errs.len() == 22, "22 Pauli operators")?;
    let gram = kl_gram_check(&q(2, 1, 2), &errs, GRAM_TOL).map_err(|e| e.to_string())?;
    ensure(gram.passed, format!("Q(2,1,2) Pauli Gram {gram:?}"))?;
    Ok(format!(
        "{} fixtures, {trace_checks} trace comparisons (max diff {worst:.1e}), deletion verdicts agree, Q(2,1,2) Gram off-diag {:.1e}",
        fixtures.len(),
        gram.max_offdiag
    ))
}

fn criterion_5() -> Check {
    let sys7 = generate_system(7, 1).map_err(|e| e.to_string())?;
    let prim: Vec<Vec<i64>> = sys7
        .equations
        .iter()
        .map(|e| e.primitive_coefficients().iter().map(|c| c.to_i64().unwrap()).collect())
        .collect();
    for want in [vec![3, 5], vec![1, 15], vec![1, 9, -5, -5]] {
        ensure(prim.contains(&want), format!("missing equation {want:?} in {prim:?}"))?;
    }
    ensure(prim.len() == 3, "three equations for n = 7")?;

    let cfg = SolveConfig {
        restarts: 32,
        tolerance: PR7_RESIDUAL,
        ..SolveConfig::default()
    };
    let sols = solve(&sys7, &cfg).map_err(|e| e.to_string())?;
    let sol = sols.iter().find(|s| s.closed_form.is_some()).ok_or("no closed form for n = 7")?;
    ensure(sol.residual_f64() < PR7_RESIDUAL, "n = 7 residual")?;
    let code = construct_pr_code(7, sol.closed_form.as_ref().unwrap()).map_err(|e| e.to_string())?;
    ensure(all_passed(&verify_pauli(&code, 1).map_err(|e| e.to_string())?), "n = 7 code fails t = 1")?;

    let sys19 = generate_system(19, 2).map_err(|e| e.to_string())?;
    ensure(sys19.equations.len() == 9, "9 equations for n = 19")?;
    let reference: Vec<Rational> = REFERENCE_Q19.iter().map(|s| piqec::exact::parse_rational(s).unwrap()).collect();
    let rel = sys19.relative_residual(&reference).map_err(|e| e.to_string())?;
    let worst_rel = rel.iter().map(|r| r.abs().to_f64().unwrap()).fold(0.0, f64::max);
    ensure(worst_rel < REFERENCE_RELATIVE, format!("reference point relative residual {worst_rel:e}"))?;

    let cfg = SolveConfig {
        restarts: 64,
        tolerance: PR19_RESIDUAL,
        ..SolveConfig::default()
    };
    let sols = solve(&sys19, &cfg).map_err(|e| e.to_string())?;
    let reference_f: Vec<f64> = reference.iter().map(|x| x.to_f64().unwrap()).collect();
    let dist = |s: &[f64]| s.iter().zip(&reference_f).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let nearest = sols
        .iter()
        .min_by(|a, b| dist(&a.q).total_cmp(&dist(&b.q)))
        .ok_or("no n = 19 solution")?;
    for s in &sols {
        ensure(s.residual_f64() < PR19_RESIDUAL, "n = 19 residual")?;
        let (alpha, beta) = pr_code_f64(19, &s.q).map_err(|e| e.to_string())?;
        let c0 = expand_coeffs(19, &alpha).map_err(|e| e.to_string())?;
        let c1 = expand_coeffs(19, &beta).map_err(|e| e.to_string())?;
        let gram = kl_gram_check_states(&c0, &c1, &deletion_errors(4), PR19_GRAM_TOL, Execution::default())
            .map_err(|e| e.to_string())?;
        ensure(gram.passed, format!("n = 19 Gram {gram:?}"))?;
    }
    Ok(format!(
        "n=7 residual {:.1e} with closed form; reference point rel. residual {worst_rel:.1e}; {} n=19 solutions, nearest to reference at distance {:.1e} with residual {:.1e}",
        sol.residual_f64(),
        sols.len(),
        dist(&nearest.q),
        nearest.residual_f64()
    ))
}

fn pow10(k: i32) -> Rational {
    let ten = Rational::from_integer(BigInt::from(10));
    if k >= 0 {
        (0..k).fold(rat(1, 1), |acc, _| acc * &ten)
    } else {
        (0..-k).fold(rat(1, 1), |acc, _| acc / &ten)
    }
}

fn criterion_6() -> Check {
    let params = GmdParams::new(3, 3, 2).unwrap();
    let t = 2;
    for cls in ADClass::all(t) {
        let poly = hadamard_cross_poly(&params, t, cls).map_err(|e| e.to_string())?;
        ensure((0..=4).all(|k| poly.coeff(k).is_zero()), format!("class {cls:?} has a low-order term"))?;
    }
    let analysis = AdAnalysis::new(params, t).map_err(|e| e.to_string())?;
    let limit = analysis.limit_ratio();
    let ratio = |k: i32| {
        let p = pow10(-k);
        analysis.bound_formula(&p) / (&p * &p * &p)
    };
    let r: Vec<Rational> = [2, 3, 4].iter().map(|&k| ratio(k)).collect();
    ensure(r[0] <= r[1] && r[1] <= r[2], "bound/p^3 must not increase with p")?;
    ensure(r[2] <= limit, "bound/p^3 exceeds its p -> 0 limit")?;
    let r8 = ratio(8);
    ensure(r8 <= limit && r8 * rat(100, 99) >= limit, "ratio does not approach the limit")?;

    // m = 2 < ceil(3t/2) = 3
    let counter = AdAnalysis::new(GmdParams::new(3, 2, 2).unwrap(), t).map_err(|e| e.to_string())?;
    let mut prev: Option<Rational> = None;
    let mut growth = Vec::new();
    for k in [7, 8, 9] {
        let p = pow10(-k);
        let b = counter.infidelity_bound(&p).map_err(|e| e.to_string())? / (&p * &p * &p);
        if let Some(prev) = &prev {
            let factor = (&b / prev).to_f64().unwrap();
            ensure(factor > 50.0, format!("counter ratio grew only x{factor}"))?;
            growth.push(factor);
        }
        prev = Some(b);
    }
    Ok(format!(
        "orders >= 5 for all {} classes; bound/p^3 = {:.3e}, {:.3e}, {:.3e} <= limit {:.3e}; Q(3,2,2) ratio grows x{:.0}, x{:.0} per decade",
        ADClass::all(t).len(),
        r[0].to_f64().unwrap(),
        r[1].to_f64().unwrap(),
        r[2].to_f64().unwrap(),
        limit.to_f64().unwrap(),
        growth[0],
        growth[1]
    ))
}

fn criterion_7() -> Check {
    let spec = GridSpec::default();
    let mut parts = Vec::new();
    let mut total_all = 0;
    for lemma in Lemma::ALL {
        let entries = sweep(lemma, &spec, Execution::default()).map_err(|e| e.to_string())?;
        let (total, failed) = tally(&entries);
        ensure(failed == 0, format!("{lemma:?}: {failed} of {total} failed"))?;
        total_all += total;
        parts.push(format!("{lemma:?} {total}"));
    }
    ensure(total_all > 5000, "grid too small")?;
    Ok(format!("{total_all} tuples ({})", parts.join(", ")))
}

fn criterion_8() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let rand_rat = |rng: &mut ChaCha8Rng| rat(rng.random_range(-50..=50), rng.random_range(1..=40));
    for (n, t) in [(7, 1), (11, 2), (19, 2)] {
        let sys = generate_system(n, t).map_err(|e| e.to_string())?;
        for _ in 0..20 {
            let qv: Vec<Rational> = (0..sys.num_vars()).map(|_| rand_rat(&mut rng)).collect();
            let mut lambda = rand_rat(&mut rng);
            if lambda.is_zero() {
                lambda = rat(3, 7);
            }
            let scaled: Vec<Rational> = qv.iter().map(|x| x * &lambda).collect();
            let base = sys.residual(&qv).unwrap();
            let lam2 = &lambda * &lambda;
            ensure(
                sys.residual(&scaled).unwrap().iter().zip(&base).all(|(a, b)| *a == b * &lam2),
                "homogeneity",
            )?;
        }
    }
    let mut worst = 0.0f64;
    for n in 2..=7 {
        for w in 0..=n {
            let d = expand_dicke(n, w).unwrap();
            let reference = delete_partial_trace(&d, &[1]).unwrap();
            for pos in 2..=n {
                worst = worst.max(max_entry_diff(&reference, &delete_partial_trace(&d, &[pos]).unwrap()));
            }
            if n >= 3 {
                let pair = delete_partial_trace(&d, &[1, 2]).unwrap();
                worst = worst.max(max_entry_diff(&pair, &delete_partial_trace(&d, &[2, n]).unwrap()));
            }
        }
    }
    ensure(worst <= PERMUTATION_TOL, format!("partial traces differ by {worst:e}"))?;
    for code in [q(1, 1, 1), q(2, 1, 2), q(4, 2, 4), q(3, 3, 2)] {
        for s in 0..=3 {
            for i in 0..2 {
                ensure(kraus_completeness(&code, s, i).unwrap() == rat(1, 1), "Kraus completeness")?;
            }
        }
    }
    let mut roundtrips = 0;
    for _ in 0..200 {
        let v = rat(rng.random_range(0..=5000), rng.random_range(1..=5000));
        let r = sqrt_canonical(&v).unwrap();
        let back: Radical = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        ensure(back == r && r.square() == v, format!("round-trip of {v}"))?;
        roundtrips += 1;
    }
    Ok(format!(
        "homogeneity exact; Dicke partial traces agree to {worst:.1e}; completeness exact; {roundtrips} radical round-trips"
    ))
}

fn main() {
    let criteria: [(&str, u64, fn() -> Check); 8] = [
        ("construction fixtures", 1, criterion_1),
        ("Pauli correction", 5, criterion_2),
        ("deletion correction", 5, criterion_3),
        ("oracle agreement", 30, criterion_4),
        ("PR systems", 300, criterion_5),
        ("amplitude damping", 60, criterion_6),
        ("identity sweeps", 120, criterion_7),
        ("property suites", 60, criterion_8),
    ];
    let mut failures = 0;
    for (i, (name, limit, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let limit = Duration::from_secs(*limit);
        let (ok, detail) = match result {
            Ok(d) if elapsed <= limit => (true, d),
            Ok(d) => (false, format!("{d}; over time limit")),
            Err(e) => (false, e),
        };
        failures += usize::from(!ok);
        println!(
            "criterion {} ({name}): {} in {:.2}s (limit {}s): {detail}",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
    }
    if failures > 0 {
        println!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all 8 acceptance criteria passed");
}
