//! Square / squarefree splitting of positive integers.
//!
//! Trial division over primes up to a bound handles everything this crate
//! produces in practice (radicands are products of binomials). Whatever is
//! left has only prime factors above the bound; it is classified without
//! factoring when possible (`R < B^2`, perfect square, `R < B^3`) and split
//! with Miller-Rabin plus Pollard-Brent otherwise.

use std::sync::OnceLock;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Default trial-division bound for squarefree decomposition.
pub const DEFAULT_TRIAL_BOUND: u64 = 1_000_000;

const RHO_MAX_STEPS: u64 = 1 << 20;

fn default_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| sieve(DEFAULT_TRIAL_BOUND))
}

fn sieve(limit: u64) -> Vec<u64> {
    let limit = limit as usize;
    let mut composite = vec![false; limit + 1];
    let mut primes = Vec::new();
    for i in 2..=limit {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= limit {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

/// Writes `value = root^2 * core` with `core` squarefree and returns
/// `(root, core)`. Zero maps to `(0, 1)`.
pub fn squarefree_decompose(value: &BigUint, bound: u64) -> Result<(BigUint, BigUint)> {
    if value.is_zero() {
        return Ok((BigUint::zero(), BigUint::one()));
    }
    let owned;
    let primes: &[u64] = if bound == DEFAULT_TRIAL_BOUND {
        default_primes()
    } else {
        owned = sieve(bound.max(2));
        &owned
    };

    let mut rest = value.clone();
    let mut root = BigUint::one();
    let mut core = BigUint::one();
    let mut exhausted = true;
    for &p in primes {
        if let Some(r) = rest.to_u128() {
            if (p as u128) * (p as u128) > r {
                exhausted = false;
                break;
            }
        }
        let mut count = 0u32;
        loop {
            let (q, r) = rest.div_rem(&BigUint::from(p));
            if !r.is_zero() {
                break;
            }
            rest = q;
            count += 1;
        }
        if count > 0 {
            root *= BigUint::from(p).pow(count / 2);
            if count % 2 == 1 {
                core *= p;
            }
        }
    }
    if rest.is_one() {
        return Ok((root, core));
    }
    // Loop stopped at p^2 > rest: rest is prime.
    if !exhausted {
        core *= &rest;
        return Ok((root, core));
    }

    // Every prime factor of `rest` now exceeds `bound`.
    let b = BigUint::from(bound);
    if rest < &b * &b {
        core *= &rest;
        return Ok((root, core));
    }
    let s = rest.sqrt();
    if &s * &s == rest {
        root *= s;
        return Ok((root, core));
    }
    if rest < &b * &b * &b {
        core *= &rest;
        return Ok((root, core));
    }

    let mut factors = Vec::new();
    split_large(&rest, &mut factors).ok_or_else(|| Error::Factorization {
        value: value.to_string(),
        bound,
    })?;
    factors.sort();
    let mut i = 0;
    while i < factors.len() {
        let mut j = i;
        while j < factors.len() && factors[j] == factors[i] {
            j += 1;
        }
        let count = (j - i) as u32;
        root *= factors[i].pow(count / 2);
        if count % 2 == 1 {
            core *= &factors[i];
        }
        i = j;
    }
    Ok((root, core))
}

fn split_large(n: &BigUint, out: &mut Vec<BigUint>) -> Option<()> {
    if n.is_one() {
        return Some(());
    }
    if is_probable_prime(n) {
        out.push(n.clone());
        return Some(());
    }
    let s = n.sqrt();
    if &s * &s == *n {
        split_large(&s, out)?;
        return split_large(&s, out);
    }
    let d = pollard_brent(n)?;
    split_large(&d, out)?;
    split_large(&(n / &d), out)
}

/// Miller-Rabin with the first twelve prime bases; deterministic below
/// 3.3e24 and overwhelmingly reliable above.
fn is_probable_prime(n: &BigUint) -> bool {
    const BASES: [u32; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    let one = BigUint::one();
    let two = BigUint::from(2u32);
    if n < &two {
        return false;
    }
    for &b in &BASES {
        let b = BigUint::from(b);
        if *n == b {
            return true;
        }
        if (n % &b).is_zero() {
            return false;
        }
    }
    let n_minus_one = n - &one;
    let mut d = n_minus_one.clone();
    let mut s = 0u32;
    while d.is_even() {
        d >>= 1;
        s += 1;
    }
    'witness: for &b in &BASES {
        let mut x = BigUint::from(b).modpow(&d, n);
        if x == one || x == n_minus_one {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == n_minus_one {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_brent(n: &BigUint) -> Option<BigUint> {
    if n.is_even() {
        return Some(BigUint::from(2u32));
    }
    let one = BigUint::one();
    for c in 1u32..16 {
        let c = BigUint::from(c);
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut y = BigUint::from(2u32);
        let mut r: u64 = 1;
        let mut q = BigUint::one();
        let mut g = BigUint::one();
        let mut x = y.clone();
        let mut ys = y.clone();
        let m: u64 = 128;
        let mut steps = 0u64;
        while g == one && steps < RHO_MAX_STEPS {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g == one {
                ys = y.clone();
                for _ in 0..m.min(r - k) {
                    y = f(&y);
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = (q * diff) % n;
                }
                g = q.gcd(n);
                k += m;
            }
            steps += r;
            r *= 2;
        }
        if g == *n {
            loop {
                ys = f(&ys);
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                g = diff.gcd(n);
                if g != one {
                    break;
                }
            }
        }
        if g != one && g != *n {
            return Some(g);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decompose(v: u64) -> (u64, u64) {
        let (r, c) = squarefree_decompose(&BigUint::from(v), DEFAULT_TRIAL_BOUND).unwrap();
        (r.to_u64().unwrap(), c.to_u64().unwrap())
    }

    #[test]
    fn small_values() {
        assert_eq!(decompose(1), (1, 1));
        assert_eq!(decompose(60), (2, 15));
        assert_eq!(decompose(72), (6, 2));
        assert_eq!(decompose(49), (7, 1));
        assert_eq!(decompose(30), (1, 30));
        assert_eq!(decompose(0), (0, 1));
    }

    #[test]
    fn large_prime_square_above_bound() {
        // 1_000_003 is prime and above the default bound.
        let p = BigUint::from(1_000_003u64);
        let v = &p * &p * 6u32;
        let (r, c) = squarefree_decompose(&v, DEFAULT_TRIAL_BOUND).unwrap();
        assert_eq!(r, p);
        assert_eq!(c, BigUint::from(6u32));
    }

    #[test]
    fn needs_rho_split() {
        // product of three primes above a small trial bound, one squared
        let (p, q) = (BigUint::from(1_009u32), BigUint::from(1_013u32));
        let r = BigUint::from(1_019u32);
        let v = &p * &p * &q * &r;
        let (root, core) = squarefree_decompose(&v, 100).unwrap();
        assert_eq!(root, p);
        assert_eq!(core, q * r);
    }

    #[test]
    fn small_bound_matches_default() {
        for v in [2u64 * 2 * 3 * 101 * 101, 97 * 97 * 89, 123_456_789, 999_999_937 * 4] {
            let a = squarefree_decompose(&BigUint::from(v), 50).unwrap();
            let b = squarefree_decompose(&BigUint::from(v), DEFAULT_TRIAL_BOUND).unwrap();
            assert_eq!(a, b, "{v}");
        }
    }

    #[test]
    fn miller_rabin() {
        assert!(is_probable_prime(&BigUint::from(1_000_003u64)));
        assert!(!is_probable_prime(&BigUint::from(1_000_003u64 * 1_000_033)));
        assert!(is_probable_prime(&BigUint::from(2u32)));
        assert!(!is_probable_prime(&BigUint::from(561u32)));
    }
}
