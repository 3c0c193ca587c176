//! Exact per-period counts and the Legendre-type twin-rank formula.
//!
//! For a sieve level `p_j` with `L = L(p_j)`:
//!
//! - `G(p_j) = 2∏_{5<=p'<p_j}(p' - 2)` non-ranks per period have parent `p_j`;
//! - `S = L - R` residues per period are non-ranks of some `p <= p_j`;
//! - `R = ∏_{5<=p<=p_j}(p - 2)` residues per period survive (the remnants).
//!
//! [`legendre_pi2`] evaluates
//! `R0 + Σ μ(n) 2^ν(n) ⌊x/n⌋` with `x = L - M(j+1)`, the sum running over
//! squarefree `n <= x` built from primes in `(p_j, x]`, and compares it with
//! the sieve oracle. [`main_term`] drops the floors in two different ways.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, next_prime, primes_between, primorial_from_5, squarefree_sum, PrimeTable};
use crate::oracle::Oracle;
use crate::{serde_big, Error, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Largest `x` accepted by [`legendre_pi2`]: beyond this the squarefree
/// enumeration and its prime table no longer fit a desk-scale run.
pub const MAX_FORMULA_X: u64 = 200_000_000;

/// Largest `x` accepted by [`main_term`]; the exact rationals carry a
/// denominator of roughly `x / ln x` primes.
pub const MAX_MAIN_TERM_X: u64 = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountsRow {
    pub p_j: u64,
    #[serde(rename = "L", with = "serde_big::uint")]
    pub l: BigUint,
    #[serde(rename = "G", with = "serde_big::uint")]
    pub g: BigUint,
    #[serde(with = "serde_big::ratio")]
    pub q: BigRational,
    #[serde(rename = "S", with = "serde_big::uint")]
    pub s: BigUint,
    #[serde(rename = "Q", with = "serde_big::ratio")]
    pub big_q: BigRational,
    #[serde(rename = "R", with = "serde_big::uint")]
    pub r: BigUint,
    #[serde(rename = "x", with = "serde_big::ratio")]
    pub x_frac: BigRational,
}

fn require_level(p: u64) -> Result<()> {
    if p < 5 || !is_prime(p) {
        return Err(Error::domain(format!("level must be a prime >= 5, got {p}")));
    }
    Ok(())
}

fn ratio(n: &BigUint, d: &BigUint) -> BigRational {
    BigRational::new(BigInt::from(n.clone()), BigInt::from(d.clone()))
}

/// `∏_{5<=p<=level}(p - 2)`.
pub fn remnant_count(level: u64) -> Result<BigUint> {
    require_level(level)?;
    Ok(primes_between(4, level).into_iter().map(|p| BigUint::from(p - 2)).product())
}

pub fn counts_row(p_j: u64) -> Result<CountsRow> {
    require_level(p_j)?;
    let l = primorial_from_5(p_j)?;
    let g: BigUint = primes_between(4, p_j - 1).into_iter().map(|p| BigUint::from(p - 2)).product::<BigUint>() * 2u32;
    let r = remnant_count(p_j)?;
    let s = &l - &r;
    Ok(CountsRow { p_j, q: ratio(&g, &l), big_q: ratio(&s, &l), x_frac: ratio(&r, &l), l, g, s, r })
}

/// `S(p_j) = L(p_j)(1 - ∏(p - 2)/p)`.
pub fn supergroup_size(p_j: u64) -> Result<BigUint> {
    require_level(p_j)?;
    let l = primorial_from_5(p_j)?;
    let frac: BigRational = primes_between(4, p_j)
        .into_iter()
        .map(|p| BigRational::new(BigInt::from(p - 2), BigInt::from(p)))
        .product();
    let s = BigRational::from_integer(BigInt::from(l)) * (BigRational::one() - frac);
    Ok(s.to_integer().to_biguint().expect("S is a non-negative integer"))
}

/// `M(j+1) = (p_{j+1}^2 - 1)/6`.
pub fn m_bound(p_next: u64) -> Result<BigUint> {
    require_level(p_next)?;
    Ok(BigUint::from((p_next as u128 * p_next as u128 - 1) / 6))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LegendreReport {
    pub p_j: u64,
    pub p_next: u64,
    #[serde(rename = "M", with = "serde_big::uint")]
    pub m: BigUint,
    #[serde(with = "serde_big::uint")]
    pub x: BigUint,
    #[serde(rename = "R0", with = "serde_big::uint")]
    pub r0: BigUint,
    #[serde(with = "serde_big::int")]
    pub ie_sum: BigInt,
    #[serde(with = "serde_big::int")]
    pub estimate: BigInt,
    /// twin ranks in `[1, L(p_j)]`
    pub oracle_window: Option<u64>,
    /// `π₂(6x + 1)`
    pub oracle_pi2: Option<u64>,
    #[serde(with = "serde_big::opt_int")]
    pub residual_window: Option<BigInt>,
    #[serde(with = "serde_big::opt_int")]
    pub residual_pi2: Option<BigInt>,
}

struct Formula {
    p_next: u64,
    m: u64,
    l: u64,
    x: u64,
    r0: BigUint,
    /// primes in `(p_j, x]`
    primes: Vec<u64>,
}

fn formula_setup(p_j: u64, cap: u64) -> Result<Formula> {
    if p_j < 7 || !is_prime(p_j) {
        return Err(Error::domain(format!("level must be a prime >= 7, got {p_j}")));
    }
    let p_next = next_prime(p_j).expect("next prime of a small level");
    let m = (p_next * p_next - 1) / 6;
    let l = primorial_from_5(p_j)?;
    let x = l.to_u64().and_then(|l| l.checked_sub(m)).filter(|&x| x <= cap).ok_or_else(|| {
        Error::capacity(format!("x = L({p_j}) - {m} exceeds the enumeration limit {cap}"))
    })?;
    let l = x + m;
    let primes = PrimeTable::new(x).between(p_j, x).to_vec();
    Ok(Formula { p_next, m, l, x, r0: remnant_count(p_j)?, primes })
}

/// `Σ μ(n) 2^ν(n) ⌊x/n⌋` over squarefree `n <= x` from `primes`.
pub fn inclusion_exclusion_sum(primes: &[u64], x: u64) -> BigInt {
    let s: i128 = squarefree_sum(primes, x, |n, nu| {
        let sign = if nu % 2 == 0 { 1 } else { -1 };
        sign * (1i128 << nu) * (x / n) as i128
    });
    BigInt::from(s)
}

pub fn legendre_pi2(p_j: u64, oracle: &Oracle) -> Result<LegendreReport> {
    let f = formula_setup(p_j, MAX_FORMULA_X)?;
    let ie_sum = inclusion_exclusion_sum(&f.primes, f.x);
    let estimate = BigInt::from(f.r0.clone()) + &ie_sum;

    let oracle_pi2 = match oracle.pi2_exact(6 * f.x + 1) {
        Ok(v) => Some(v),
        Err(Error::Capacity(_)) => None,
        Err(e) => return Err(e),
    };
    let oracle_window = match oracle.count_twin_ranks(f.l) {
        Ok(v) => Some(v),
        Err(Error::Capacity(_)) => None,
        Err(e) => return Err(e),
    };
    let residual = |truth: Option<u64>| truth.map(|t| &estimate - BigInt::from(t));
    Ok(LegendreReport {
        p_j,
        p_next: f.p_next,
        m: BigUint::from(f.m),
        x: BigUint::from(f.x),
        r0: f.r0,
        residual_window: residual(oracle_window),
        residual_pi2: residual(oracle_pi2),
        ie_sum,
        estimate,
        oracle_window,
        oracle_pi2,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MainTermReport {
    pub p_j: u64,
    #[serde(with = "serde_big::uint")]
    pub x: BigUint,
    /// `R0 + Σ μ(n) 2^ν(n) x/n`
    #[serde(rename = "R_M_sum", with = "serde_big::ratio")]
    pub r_m_sum: BigRational,
    /// `L∏_{5<=p<=x}(1 - 2/p) + M(1 - ∏_{p_j<p<=x}(1 - 2/p))`
    #[serde(rename = "R_M_product", with = "serde_big::ratio")]
    pub r_m_product: BigRational,
    /// `estimate - R_M_sum`
    #[serde(rename = "R_E", with = "serde_big::ratio")]
    pub r_e: BigRational,
    /// `R_M_sum - R_M_product`
    #[serde(with = "serde_big::ratio")]
    pub gap: BigRational,
    pub asymptote: f64,
}

pub fn main_term(p_j: u64) -> Result<MainTermReport> {
    let f = formula_setup(p_j, MAX_MAIN_TERM_X)?;

    // Σ μ 2^ν x/n = x·(Σ μ 2^ν D/n)/D with D the product of all generating primes
    let d: BigUint = f.primes.iter().map(|&p| BigUint::from(p)).product();
    let numerator: BigInt = squarefree_sum(&f.primes, f.x, |n, nu| {
        let sign = if nu % 2 == 0 { 1 } else { -1 };
        BigInt::from(&d / n) * (sign << nu)
    });
    let r0 = BigRational::from_integer(BigInt::from(f.r0.clone()));
    let r_m_sum = &r0 + BigRational::new(numerator * f.x, BigInt::from(d));

    // L∏_{5<=p<=p_j}(1 - 2/p) is R0, so the product form is R0·P + M(1 - P)
    let (num, den) = f
        .primes
        .par_iter()
        .map(|&p| (BigUint::from(p - 2), BigUint::from(p)))
        .reduce(|| (BigUint::one(), BigUint::one()), |a, b| (a.0 * b.0, a.1 * b.1));
    let tail = ratio(&num, &den);
    let m = BigRational::from_integer(BigInt::from(f.m));
    let r_m_product = &r0 * &tail + m * (BigRational::one() - &tail);

    let estimate = BigRational::from_integer(BigInt::from(f.r0) + inclusion_exclusion_sum(&f.primes, f.x));
    Ok(MainTermReport {
        p_j,
        x: BigUint::from(f.x),
        r_e: estimate - &r_m_sum,
        gap: &r_m_sum - &r_m_product,
        r_m_sum,
        r_m_product,
        asymptote: asymptotic_density(f.x)?,
    })
}

// Euler–Maclaurin for ζ(s) - 1 = Σ_{n>=2} n^{-s}, s >= 2
fn zeta_minus_one(s: f64) -> f64 {
    const N: u32 = 16;
    // B_2k / (2k)!
    const B: [f64; 6] = [
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30_240.0,
        -1.0 / 1_209_600.0,
        1.0 / 47_900_160.0,
        -691.0 / 1_307_674_368_000.0,
    ];
    let n = N as f64;
    let head: f64 = (2..N).map(|k| (k as f64).powf(-s)).sum();
    let mut tail = n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s);
    // rising factorial s(s+1)...(s+2k-2) times N^{-s-2k+1}
    let mut rising = s;
    let mut power = n.powf(-s - 1.0);
    for (k, b) in B.iter().enumerate() {
        tail += b * rising * power;
        let j = 2.0 * k as f64;
        rising *= (s + j + 1.0) * (s + j + 2.0);
        power /= n * n;
    }
    head + tail
}

fn mobius(mut n: u64) -> i64 {
    let mut mu = 1;
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            n /= d;
            if n % d == 0 {
                return 0;
            }
            mu = -mu;
        }
        d += 1;
    }
    if n > 1 {
        -mu
    } else {
        mu
    }
}

/// Prime zeta `P(s) = Σ_p p^{-s} = Σ_j μ(j)/j · ln ζ(js)`.
fn prime_zeta(s: f64) -> f64 {
    (1..)
        .take_while(|&j| j as f64 * s <= 80.0)
        .map(|j| mobius(j) as f64 / j as f64 * zeta_minus_one(j as f64 * s).ln_1p())
        .sum()
}

/// Primes up to which [`twin_prime_constant`] multiplies directly.
const C2_HEAD: u64 = 1000;

/// Twin-prime constant `c₂ = ∏_{p>2}(1 - 1/(p - 1)^2)`.
///
/// Multiplies the factors for `p <= 1000` and sums the logarithm of the rest
/// as `-Σ_k (2^k - 2)/k · (P(k) - Σ_{p<=1000} p^{-k})`, stopping once a term
/// falls below `tolerance / 1000`.
pub fn twin_prime_constant(tolerance: f64) -> Result<f64> {
    if !(tolerance >= 1e-12) {
        return Err(Error::domain(format!("tolerance must be >= 1e-12, got {tolerance}")));
    }
    let head = primes_between(2, C2_HEAD);
    let log_head: f64 = head.iter().map(|&p| (-1.0 / ((p - 1) as f64).powi(2)).ln_1p()).sum();
    let mut log_tail = 0.0;
    for k in 2..=64 {
        let kf = k as f64;
        let finite: f64 = std::iter::once(2u64).chain(head.iter().copied()).map(|p| (p as f64).powf(-kf)).sum();
        let rest = (prime_zeta(kf) - finite).max(0.0);
        let term = (2f64.powi(k) - 2.0) / kf * rest;
        log_tail -= term;
        if term < tolerance * 1e-3 {
            break;
        }
    }
    Ok((log_head + log_tail).exp())
}

/// Coefficient `2c₂e^{-2γ}` of the main-term asymptote.
pub fn asymptote_coefficient() -> f64 {
    2.0 * twin_prime_constant(1e-9).expect("valid tolerance") * (-2.0 * EULER_GAMMA).exp()
}

/// `2c₂e^{-2γ} · 6x / ln²(6x + 1)`.
pub fn asymptotic_density(x: u64) -> Result<f64> {
    if x < 2 {
        return Err(Error::domain(format!("asymptotic density needs x >= 2, got {x}")));
    }
    let y = 6.0 * x as f64;
    Ok(asymptote_coefficient() * y / (y + 1.0).ln().powi(2))
}
