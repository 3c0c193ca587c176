//! Exact integer primitives.
//!
//! Point queries (`is_prime`, `smallest_prime_factor`) use a deterministic
//! Miller-Rabin test valid on all of `u64` plus a mod-30 wheel for trial
//! division. Range queries go through [`PrimeTable`], a bit-packed odd-only
//! sieve.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Largest limit [`PrimeTable`] accepts.
pub const MAX_TABLE_LIMIT: u64 = u32::MAX as u64;

const SMALL_PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

// Sinclair's base set; deterministic for every n < 2^64.
const MR_BASES: [u64; 7] = [2, 325, 9375, 28178, 450775, 9780504, 1795265022];

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic primality test for any `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &SMALL_PRIMES {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    if n < 41 * 41 {
        return true;
    }

    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &MR_BASES {
        let a = a % n;
        if a == 0 {
            continue;
        }
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Least prime divisor of `n >= 2`.
pub fn smallest_prime_factor(n: u64) -> Result<u64> {
    if n < 2 {
        return Err(Error::domain(format!("smallest_prime_factor needs n >= 2, got {n}")));
    }
    for p in [2, 3, 5] {
        if n % p == 0 {
            return Ok(p);
        }
    }
    if is_prime(n) {
        return Ok(n);
    }
    // mod-30 wheel: candidates coprime to 2*3*5 starting at 7
    const STEPS: [u64; 8] = [4, 2, 4, 2, 4, 6, 2, 6];
    let mut d = 7u64;
    let mut i = 0;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return Ok(d);
        }
        d += STEPS[i];
        i = (i + 1) & 7;
    }
    // unreachable for composite n, but keeps the function total
    Ok(n)
}

/// Integer nearest to `x`. Half-integers are rejected rather than rounded.
pub fn nearest_int(x: &BigRational) -> Result<BigInt> {
    let two = BigInt::from(2);
    let twice = x * BigRational::from_integer(two.clone());
    if twice.is_integer() && twice.to_integer().is_odd() {
        return Err(Error::HalfInteger(format!("{}/{}", x.numer(), x.denom())));
    }
    let half = BigRational::new(BigInt::one(), two);
    Ok((x + half).floor().to_integer())
}

/// `N(p/6)`: `(p - 1)/6` for `p ≡ 1 (mod 6)`, `(p + 1)/6` for `p ≡ 5 (mod 6)`.
pub fn nsix(p: u64) -> Result<u64> {
    if p < 5 || !is_prime(p) {
        return Err(Error::domain(format!("N(p/6) is defined for primes p >= 5, got {p}")));
    }
    Ok(if p % 6 == 1 { (p - 1) / 6 } else { (p + 1) / 6 })
}

/// `L(p)`, the product of all primes `5 <= p' <= p`.
pub fn primorial_from_5(p: u64) -> Result<BigUint> {
    if p < 5 || !is_prime(p) {
        return Err(Error::domain(format!("primorial_from_5 needs a prime p >= 5, got {p}")));
    }
    Ok(primes_between(4, p).into_iter().fold(BigUint::one(), |acc, q| acc * q))
}

/// All primes `p` with `lo < p <= hi`, ascending.
pub fn primes_between(lo: u64, hi: u64) -> Vec<u64> {
    if hi <= lo {
        return Vec::new();
    }
    if hi <= MAX_TABLE_LIMIT && hi - lo >= hi / 64 {
        return PrimeTable::new(hi).between(lo, hi).to_vec();
    }
    // narrow window high up: point tests are cheaper than a full table
    (lo + 1..=hi).filter(|&n| is_prime(n)).collect()
}

/// Bit-packed table of the primes up to `limit`, odd numbers only.
#[derive(Debug, Clone)]
pub struct PrimeTable {
    limit: u64,
    // bit i set <=> 2i + 1 is composite (or 1)
    composite: Vec<u64>,
    primes: Vec<u64>,
}

impl PrimeTable {
    /// Sieve `[2, limit]`. Panics above [`MAX_TABLE_LIMIT`].
    pub fn new(limit: u64) -> Self {
        assert!(limit <= MAX_TABLE_LIMIT, "PrimeTable limit {limit} exceeds {MAX_TABLE_LIMIT}");
        let odd_count = limit.div_ceil(2) as usize;
        let mut composite = vec![0u64; odd_count.div_ceil(64).max(1)];
        composite[0] |= 1; // the number 1
        let mut p = 3u64;
        while p * p <= limit {
            let idx = (p / 2) as usize;
            if composite[idx / 64] >> (idx % 64) & 1 == 0 {
                let mut m = p * p;
                while m <= limit {
                    let j = (m / 2) as usize;
                    composite[j / 64] |= 1 << (j % 64);
                    m += 2 * p;
                }
            }
            p += 2;
        }

        let mut primes = Vec::new();
        if limit >= 2 {
            primes.push(2);
        }
        for (w, &word) in composite.iter().enumerate() {
            let mut free = !word;
            while free != 0 {
                let bit = free.trailing_zeros() as usize;
                free &= free - 1;
                let n = 2 * (w * 64 + bit) as u64 + 1;
                if n > limit {
                    break;
                }
                primes.push(n);
            }
        }
        PrimeTable { limit, composite, primes }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Membership test; `n` must not exceed the table limit.
    pub fn contains(&self, n: u64) -> bool {
        assert!(n <= self.limit, "{n} is beyond the table limit {}", self.limit);
        match n {
            0 | 1 => false,
            2 => true,
            _ if n % 2 == 0 => false,
            _ => {
                let idx = (n / 2) as usize;
                self.composite[idx / 64] >> (idx % 64) & 1 == 0
            }
        }
    }

    /// The `j`-th prime, 1-based (`nth(1) = 2`, `nth(3) = 5`).
    pub fn nth(&self, j: usize) -> Option<u64> {
        j.checked_sub(1).and_then(|i| self.primes.get(i).copied())
    }

    /// 1-based index of prime `p` in the table.
    pub fn index_of(&self, p: u64) -> Option<usize> {
        self.primes.binary_search(&p).ok().map(|i| i + 1)
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// Primes in `(lo, hi]`.
    pub fn between(&self, lo: u64, hi: u64) -> &[u64] {
        let a = self.primes.partition_point(|&p| p <= lo);
        let b = self.primes.partition_point(|&p| p <= hi);
        &self.primes[a..b.max(a)]
    }
}

/// Smallest prime strictly greater than `n`.
pub fn next_prime(n: u64) -> Option<u64> {
    let mut c = n.checked_add(1)?;
    loop {
        if is_prime(c) {
            return Some(c);
        }
        c = c.checked_add(1)?;
    }
}

/// A squarefree product of generating primes, with its Möbius data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SquarefreeTerm {
    pub n: u64,
    /// `μ(n) = (-1)^ν(n)`
    pub mu: i8,
    /// number of distinct prime factors
    pub nu: u32,
}

impl SquarefreeTerm {
    fn new(n: u64, nu: u32) -> Self {
        SquarefreeTerm { n, mu: if nu % 2 == 0 { 1 } else { -1 }, nu }
    }
}

fn normalized(primes: &[u64]) -> Vec<u64> {
    let mut v = primes.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

/// Every squarefree product `1 < n <= cap` of the generating primes, sorted by `n`.
/// Duplicate generators are ignored.
pub fn squarefree_terms(primes: &[u64], cap: u64) -> Vec<SquarefreeTerm> {
    let primes = normalized(primes);
    let mut out = Vec::new();
    for_each_squarefree(&primes, cap, |n, nu| out.push(SquarefreeTerm::new(n, nu)));
    out.sort_unstable_by_key(|t| t.n);
    out
}

/// Visit every squarefree product `1 < n <= cap` of `primes` (ascending,
/// distinct) as `(n, ν(n))`, in depth-first order.
pub fn for_each_squarefree(primes: &[u64], cap: u64, mut visit: impl FnMut(u64, u32)) {
    fn walk(primes: &[u64], start: usize, n: u64, nu: u32, cap: u64, visit: &mut impl FnMut(u64, u32)) {
        for i in start..primes.len() {
            let Some(next) = n.checked_mul(primes[i]).filter(|&v| v <= cap) else {
                break;
            };
            visit(next, nu + 1);
            walk(primes, i + 1, next, nu + 1, cap, visit);
        }
    }
    debug_assert!(primes.windows(2).all(|w| w[0] < w[1]));
    walk(primes, 0, 1, 0, cap, &mut visit);
}

/// `Σ f(n, ν(n))` over the same index set as [`for_each_squarefree`], split
/// across the rayon pool by smallest prime factor. Exact for integer `T`
/// regardless of worker count.
pub fn squarefree_sum<T, F>(primes: &[u64], cap: u64, f: F) -> T
where
    T: Send + Zero + std::ops::Add<Output = T>,
    F: Fn(u64, u32) -> T + Sync,
{
    debug_assert!(primes.windows(2).all(|w| w[0] < w[1]));
    let heads = primes.partition_point(|&p| p <= cap);
    (0..heads)
        .into_par_iter()
        .map(|i| {
            let p = primes[i];
            let mut acc = f(p, 1);
            let rest = &primes[i + 1..];
            let sub_cap = cap / p;
            for_each_squarefree(rest, sub_cap, |n, nu| {
                let term = f(n * p, nu + 1);
                acc = std::mem::replace(&mut acc, T::zero()) + term;
            });
            acc
        })
        .reduce(T::zero, |a, b| a + b)
}
