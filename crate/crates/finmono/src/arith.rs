//! Exact integer and rational kernels everything else builds on.
//!
//! The one function with a sharp contract is [`floor_two_log_plus`]: it is
//! the outermost operation of every bound formula, and the published bound
//! values sit right on flooring boundaries (319 is decided by comparing
//! exact ~60-bit squares), so it works entirely by big-integer comparison —
//! no floating point anywhere in this module.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type BigRat = BigRational;

/// ⌊2·log⁺_q(y)⌋: the unique k ≥ 0 with q^k ≤ y² < q^{k+1}, clamped to 0
/// when y ≤ 1. Computed as a comparison loop on q^k·den(y)² vs num(y)².
pub fn floor_two_log_plus(q: &BigInt, y: &BigRat) -> Result<u64> {
    if q < &BigInt::from(2) {
        return Err(Error::Param {
            name: "q",
            reason: format!("log base must be an integer >= 2, got {q}"),
        });
    }
    if !y.is_positive() {
        return Err(Error::Param {
            name: "y",
            reason: format!("log argument must be positive, got {y}"),
        });
    }
    let num2 = y.numer() * y.numer();
    let mut qk_den2 = y.denom() * y.denom(); // invariant: q^k · den(y)²
    if qk_den2 > num2 {
        return Ok(0); // y < 1: log⁺ clamps
    }
    let mut k = 0u64;
    loop {
        let next = &qk_den2 * q;
        if next <= num2 {
            qk_den2 = next;
            k += 1;
        } else {
            return Ok(k);
        }
    }
}

/// C(n, k), zero outside 0 ≤ k ≤ n. Running product over the small side of
/// the triangle with exact division at every step, so n may be huge (the
/// Adams ranks use n = r+M−i−1 with M in the millions) as long as
/// min(k, n−k) stays desk-scale.
pub fn binomial(n: &BigInt, k: &BigInt) -> BigInt {
    if n.is_negative() || k.is_negative() || k > n {
        return BigInt::zero();
    }
    let small = (n - k).min(k.clone());
    let iters = small
        .to_u64()
        .expect("binomial: min(k, n-k) exceeds the supported range");
    let mut acc = BigInt::one();
    for i in 1..=iters {
        // exact: after i steps acc = C(n, i)
        acc = acc * (n - BigInt::from(i) + 1u32) / BigInt::from(i);
    }
    acc
}

/// Prime factorization by trial division; fine for the desk-scale inputs
/// here (conductors, character orders, level sizes).
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    assert!(n >= 1, "factorize(0)");
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            let mut e = 0u32;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n) == [(n, 1)]
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .iter()
        .map(|&(p, e)| (p - 1) * p.pow(e - 1))
        .product::<u64>()
        .max(1) // n = 1 has the empty product
}

/// All divisors of n, ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (p, e) in factorize(n) {
        let prev = out.clone();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            out.extend(prev.iter().map(|d| d * pk));
        }
    }
    out.sort_unstable();
    out
}

/// Largest a with p^a | n.
pub fn valuation_u64(mut n: u64, p: u64) -> u32 {
    assert!(n >= 1 && p >= 2);
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// Sieve of Eratosthenes, ascending primes ≤ b.
pub fn primes_up_to(b: u64) -> Vec<u64> {
    if b < 2 {
        return Vec::new();
    }
    let b = b as usize;
    let mut sieve = vec![true; b + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut p = 2usize;
    while p * p <= b {
        if sieve[p] {
            let mut m = p * p;
            while m <= b {
                sieve[m] = false;
                m += p;
            }
        }
        p += 1;
    }
    (2..=b).filter(|&i| sieve[i]).map(|i| i as u64).collect()
}

/// Coefficients of the n-th cyclotomic polynomial Φ_n, ascending degree,
/// length euler_phi(n)+1. Computed as (x^n − 1) / ∏_{d|n, d<n} Φ_d; every
/// division is exact and every divisor is monic.
pub fn cyclotomic_poly(n: u64) -> Vec<BigInt> {
    assert!(n >= 1, "cyclotomic_poly(0)");
    let mut f = vec![BigInt::zero(); n as usize + 1];
    f[0] = BigInt::from(-1);
    f[n as usize] = BigInt::one();
    for d in divisors(n) {
        if d < n {
            f = int_poly_div_exact(&f, &cyclotomic_poly(d));
        }
    }
    f
}

/// Long division of integer polynomials (ascending coefficients) by a monic
/// divisor, asserting zero remainder. Internal helper for `cyclotomic_poly`.
fn int_poly_div_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let dn = num.len() - 1;
    let dd = den.len() - 1;
    assert!(den[dd].is_one(), "divisor must be monic");
    assert!(dn >= dd);
    let mut rem = num.to_vec();
    let mut quot = vec![BigInt::zero(); dn - dd + 1];
    for i in (0..=dn - dd).rev() {
        let c = rem[i + dd].clone();
        if c.is_zero() {
            continue;
        }
        for j in 0..=dd {
            rem[i + j] -= &c * &den[j];
        }
        quot[i] = c;
    }
    assert!(rem.iter().all(Zero::is_zero), "division was not exact");
    quot
}

/// p^e as a big integer.
pub fn big_pow(p: u64, e: u64) -> BigInt {
    BigInt::from(p).pow(e as u32)
}

pub fn rat(n: i64, d: i64) -> BigRat {
    BigRat::new(BigInt::from(n), BigInt::from(d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn f2lp(q: u64, num: i64, den: i64) -> u64 {
        floor_two_log_plus(&BigInt::from(q), &rat(num, den)).unwrap()
    }

    #[test]
    fn test_floor_two_log_plus_examples() {
        assert_eq!(f2lp(2, 169, 1), 14); // 2^14 = 16384 <= 169^2 = 28561 < 2^15
        assert_eq!(f2lp(7, 1, 1), 0);
        assert_eq!(f2lp(10, 10, 1), 2); // boundary inclusive: 10^2 = 10^2
        assert_eq!(f2lp(3, 1, 2), 0); // y < 1 clamps
        assert_eq!(f2lp(4, 2, 1), 1); // 4^1 = 2^2
    }

    #[test]
    fn test_floor_two_log_plus_rejects_bad_base() {
        assert!(floor_two_log_plus(&BigInt::from(1), &rat(3, 1)).is_err());
        assert!(floor_two_log_plus(&BigInt::from(2), &rat(0, 1)).is_err());
    }

    #[test]
    fn test_floor_two_log_plus_posthoc_and_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x1091);
        let mut prev: Option<(BigRat, u64)> = None;
        for _ in 0..1000 {
            let q = BigInt::from(rng.gen_range(2u64..50));
            let y = rat(rng.gen_range(1i64..100_000), rng.gen_range(1i64..1000));
            let k = floor_two_log_plus(&q, &y).unwrap();
            // re-verify q^k <= y^2 < q^(k+1), modulo the y <= 1 clamp
            let y2 = &y * &y;
            let qk = BigRat::from(q.pow(k as u32));
            if y > BigRat::one() || k > 0 {
                assert!(qk <= y2, "q={q} y={y} k={k}");
            }
            assert!(y2 < qk * BigRat::from(q.clone()), "q={q} y={y} k={k}");
            // monotone in y for fixed q: redo with the previous sample's q
            if let Some((py, pk)) = prev.take() {
                let k2 = floor_two_log_plus(&BigInt::from(13), &py).unwrap();
                let k3 = floor_two_log_plus(&BigInt::from(13), &(py + rat(1, 7))).unwrap();
                assert!(k3 >= k2);
                let _ = pk;
            }
            prev = Some((y, k));
        }
    }

    #[test]
    fn test_binomial_examples() {
        let b = |n: i64, k: i64| binomial(&BigInt::from(n), &BigInt::from(k));
        assert_eq!(b(13, 12), BigInt::from(13));
        assert_eq!(b(14, 12), BigInt::from(91));
        assert_eq!(b(5, 7), BigInt::zero());
        assert_eq!(b(5, -1), BigInt::zero());
        assert_eq!(b(0, 0), BigInt::one());
        // huge n, small complementary side
        let n = BigInt::from(1_000_003u64);
        assert_eq!(
            binomial(&n, &(&n - 2)),
            BigInt::from(1_000_003u64) * 1_000_002u64 / 2u64
        );
    }

    #[test]
    fn test_euler_phi() {
        assert_eq!(euler_phi(12), 4);
        assert_eq!(euler_phi(1), 1);
        assert_eq!(euler_phi(30), 8);
        for n in 1..=1000u64 {
            let s: u64 = divisors(n).into_iter().map(euler_phi).sum();
            assert_eq!(s, n);
        }
    }

    #[test]
    fn test_primes_up_to() {
        assert!(primes_up_to(1).is_empty());
        assert_eq!(primes_up_to(10), vec![2, 3, 5, 7]);
        assert_eq!(*primes_up_to(31).last().unwrap(), 31);
    }

    #[test]
    fn test_cyclotomic_poly_examples() {
        let as_i64 = |v: Vec<BigInt>| -> Vec<i64> { v.iter().map(|c| c.to_i64().unwrap()).collect() };
        assert_eq!(as_i64(cyclotomic_poly(1)), vec![-1, 1]);
        assert_eq!(as_i64(cyclotomic_poly(12)), vec![1, 0, -1, 0, 1]);
        assert_eq!(as_i64(cyclotomic_poly(7)), vec![1; 7]);
        assert_eq!(cyclotomic_poly(30).len() - 1, euler_phi(30) as usize);
    }

    #[test]
    fn test_cyclotomic_product_identity() {
        // ∏_{d|n} Φ_d = x^n − 1 exactly
        for n in 1..=200u64 {
            let mut prod = vec![BigInt::one()];
            for d in divisors(n) {
                let phi = cyclotomic_poly(d);
                let mut next = vec![BigInt::zero(); prod.len() + phi.len() - 1];
                for (i, a) in prod.iter().enumerate() {
                    for (j, b) in phi.iter().enumerate() {
                        next[i + j] += a * b;
                    }
                }
                prod = next;
            }
            let mut expect = vec![BigInt::zero(); n as usize + 1];
            expect[0] = BigInt::from(-1);
            expect[n as usize] = BigInt::one();
            assert_eq!(prod, expect, "n = {n}");
        }
    }

    #[test]
    fn test_is_prime_and_valuation() {
        assert!(is_prime(2) && is_prime(23) && !is_prime(1) && !is_prime(91));
        assert_eq!(valuation_u64(720720, 2), 4);
        assert_eq!(valuation_u64(7, 2), 0);
    }
}
