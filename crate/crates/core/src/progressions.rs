//! Residue structure of twin ranks modulo primorials.
//!
//! `C_p` is the set of residues `c (mod L(p))` that avoid `±N(p'/6) (mod p')`
//! for every prime `5 <= p' <= p`; the progressions `6(L(p)n + c) ± 1` then
//! contain every twin pair beyond (3, 5) and (5, 7). It is built two ways:
//! by direct filtering ([`residue_set`]) and by lifting `C_p` through the next
//! prime ([`inductive_step`]).
//!
//! Simultaneous non-ranks of several primes are the CRT solutions of
//! `x ≡ ±N(p_i/6) (mod p_i)`: [`crt_family`] lists all `2^m` of them and
//! [`nested_form`] rewrites one as `p(p'(...) + r') ± N(p/6)`.

use std::fmt;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, next_prime, nsix, primes_between};
use crate::classify::{classify, nonranks_of};
use crate::{serde_big, Error, Result, Sign};

/// Largest `|C_p|` that [`residue_set`] materializes.
pub const MAX_RESIDUE_SET: u64 = 100_000_000;

/// Largest number of primes accepted by [`crt_family`].
pub const MAX_FAMILY_PRIMES: usize = 20;

const CHUNK: u64 = 1 << 16;

/// `(p, N(p/6))` for every prime `5 <= p <= level`.
fn generators(level: u64) -> Vec<(u64, u64)> {
    primes_between(4, level).into_iter().map(|p| (p, nsix(p).expect("prime >= 5"))).collect()
}

#[inline]
fn avoids(c: u64, gens: &[(u64, u64)]) -> bool {
    gens.iter().all(|&(p, ns)| {
        let r = c % p;
        r != ns && r != p - ns
    })
}

fn require_level(p: u64) -> Result<()> {
    if p < 5 || !is_prime(p) {
        return Err(Error::domain(format!("sieve level must be a prime >= 5, got {p}")));
    }
    Ok(())
}

/// `|C_p| = ∏(p' - 2)` and `L(p)` as machine integers, or a capacity error.
fn residue_set_size(level: u64) -> Result<(u64, u64)> {
    let mut count: u64 = 1;
    let mut modulus: u64 = 1;
    for (p, _) in generators(level) {
        count = count.saturating_mul(p - 2);
        modulus = modulus.saturating_mul(p);
    }
    if count > MAX_RESIDUE_SET {
        return Err(Error::capacity(format!(
            "C_{level} has {count} residues (limit {MAX_RESIDUE_SET}); use remnants_below for interval queries"
        )));
    }
    Ok((count, modulus))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueSet {
    /// sieve level
    pub p: u64,
    /// `L(p)`
    #[serde(with = "serde_big::uint")]
    pub modulus: BigUint,
    /// ascending residues in `[0, L(p))`
    pub constants: Vec<u64>,
}

impl ResidueSet {
    pub fn len(&self) -> usize {
        self.constants.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constants.is_empty()
    }

    pub fn contains(&self, c: u64) -> bool {
        self.constants.binary_search(&c).is_ok()
    }

    fn modulus_u64(&self) -> u64 {
        self.modulus.to_u64().expect("materialized residue sets have a u64 modulus")
    }

    /// File name used for this level inside a cache directory.
    pub fn cache_path(dir: &Path, p: u64) -> PathBuf {
        dir.join(format!("residues-{p}.txt"))
    }

    /// Write `# level=<p> modulus=<L>` followed by one decimal constant per line.
    pub fn write_cache(&self, dir: &Path) -> Result<PathBuf> {
        std::fs::create_dir_all(dir)?;
        let path = Self::cache_path(dir, self.p);
        let tmp = path.with_extension("txt.tmp");
        {
            let mut w = BufWriter::new(std::fs::File::create(&tmp)?);
            writeln!(w, "# level={} modulus={}", self.p, self.modulus)?;
            for c in &self.constants {
                writeln!(w, "{c}")?;
            }
            w.flush()?;
        }
        std::fs::rename(&tmp, &path)?;
        Ok(path)
    }

    /// Read a cache file written by [`ResidueSet::write_cache`]. Returns
    /// `Ok(None)` when no file exists for the level.
    pub fn read_cache(dir: &Path, p: u64) -> Result<Option<ResidueSet>> {
        let path = Self::cache_path(dir, p);
        let file = match std::fs::File::open(&path) {
            Ok(f) => f,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        let bad = |reason: String| Error::Cache { path: path.display().to_string(), reason };
        let mut lines = BufReader::new(file).lines();
        let header = lines.next().transpose()?.ok_or_else(|| bad("empty file".into()))?;
        let fields = header
            .strip_prefix("# ")
            .ok_or_else(|| bad(format!("bad header {header:?}")))?;
        let mut level = None;
        let mut modulus = None;
        for kv in fields.split_whitespace() {
            match kv.split_once('=') {
                Some(("level", v)) => level = v.parse::<u64>().ok(),
                Some(("modulus", v)) => modulus = v.parse::<BigUint>().ok(),
                _ => return Err(bad(format!("unknown header field {kv:?}"))),
            }
        }
        let (Some(level), Some(modulus)) = (level, modulus) else {
            return Err(bad("header needs level and modulus".into()));
        };
        if level != p {
            return Err(bad(format!("header level {level} does not match requested {p}")));
        }
        let mut constants = Vec::new();
        for line in lines {
            let line = line?;
            let c: u64 = line.trim().parse().map_err(|_| bad(format!("bad constant {line:?}")))?;
            constants.push(c);
        }
        if !constants.windows(2).all(|w| w[0] < w[1]) {
            return Err(bad("constants not strictly ascending".into()));
        }
        Ok(Some(ResidueSet { p, modulus, constants }))
    }
}

/// `C_p` by direct modular filtering of `[0, L(p))`.
pub fn residue_set(p: u64) -> Result<ResidueSet> {
    require_level(p)?;
    let (_, modulus) = residue_set_size(p)?;
    let gens = generators(p);
    let chunks = modulus.div_ceil(CHUNK);
    let constants: Vec<u64> = (0..chunks)
        .into_par_iter()
        .flat_map_iter(|i| {
            let lo = i * CHUNK;
            let hi = (lo + CHUNK).min(modulus);
            let gens = &gens;
            (lo..hi).filter(move |&c| avoids(c, gens))
        })
        .collect();
    Ok(ResidueSet { p, modulus: BigUint::from(modulus), constants })
}

/// Lift `C_p` to `C_{p_next}`: each `c` becomes `L(p)*l + c` for
/// `l = 0..p_next`, dropping lifts `≡ ±N(p_next/6) (mod p_next)`.
pub fn inductive_step(current: &ResidueSet, p_next: u64) -> Result<ResidueSet> {
    if next_prime(current.p) != Some(p_next) {
        return Err(Error::domain(format!("{p_next} is not the prime following {}", current.p)));
    }
    residue_set_size(p_next)?;
    let ns = nsix(p_next)?;
    let modulus = current.modulus_u64();
    let constants: Vec<u64> = (0..p_next)
        .into_par_iter()
        .flat_map_iter(|l| {
            current.constants.iter().filter_map(move |&c| {
                let v = modulus * l + c;
                let r = v % p_next;
                (r != ns && r != p_next - ns).then_some(v)
            })
        })
        .collect();
    Ok(ResidueSet { p: p_next, modulus: BigUint::from(modulus * p_next), constants })
}

/// One period of the non-ranks with parent `p`: the terms `n*p ± N(p/6)`,
/// `1 <= n <= L(p)/p`, that avoid `±N(p'/6) (mod p')` for every prime `5 <= p' < p`.
pub fn initial_nonranks(p: u64) -> Result<Vec<u64>> {
    require_level(p)?;
    let (_, modulus) = residue_set_size(p)?;
    let smaller = generators(p - 1);
    let ns = nsix(p)?;
    Ok(nonranks_of(p, modulus + ns)?.into_iter().map(|t| t.value).filter(|&v| avoids(v, &smaller)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Intruder {
    pub value: u64,
    pub parent: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RemnantReport {
    pub p: u64,
    pub bound: u64,
    /// `M(j+1) = (p_{j+1}^2 - 1)/6` for the prime following `p`
    pub front_limit: u64,
    pub remnants: Vec<u64>,
    pub front_twin_ranks: Vec<u64>,
    pub intruders: Vec<Intruder>,
}

/// Whether `m >= 1` survives every generator in `gens`: it is not
/// `n*p ± N(p/6)` for any `n >= 1`. The bare offset `N(p/6)` (the `n = 0`
/// term) is kept.
#[inline]
fn is_remnant(m: u64, gens: &[(u64, u64)]) -> bool {
    gens.iter().all(|&(p, ns)| {
        let r = m % p;
        r != p - ns && (r != ns || m == ns)
    })
}

/// Remnants in `[1, bound)` after striking every non-rank generated by primes
/// `5..=p_sieve`, split at `M(j+1)` into front twin ranks and intruders.
pub fn remnants_below(p_sieve: u64, bound: u64) -> Result<RemnantReport> {
    require_level(p_sieve)?;
    let gens = generators(p_sieve);
    let p_next = next_prime(p_sieve).ok_or_else(|| Error::domain("no next prime in u64"))?;
    let front_limit = ((p_next as u128 * p_next as u128 - 1) / 6) as u64;

    let chunks = bound.div_ceil(CHUNK);
    let remnants: Vec<u64> = (0..chunks)
        .into_par_iter()
        .flat_map_iter(|i| {
            let lo = (i * CHUNK).max(1);
            let hi = ((i + 1) * CHUNK).min(bound);
            let gens = &gens;
            (lo..hi).filter(move |&m| is_remnant(m, gens))
        })
        .collect();

    let split = remnants.partition_point(|&m| m < front_limit);
    let front_twin_ranks = remnants[..split].to_vec();
    let intruders = remnants[split..]
        .par_iter()
        .map(|&m| classify(m).map(|c| c.parent.map(|parent| Intruder { value: m, parent })))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();

    Ok(RemnantReport { p: p_sieve, bound, front_limit, remnants, front_twin_ranks, intruders })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyMember {
    /// one sign per prime, aligned with [`ProgressionFamily::primes`]
    pub signs: Vec<Sign>,
    #[serde(with = "serde_big::uint")]
    pub residue: BigUint,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProgressionFamily {
    /// ascending
    pub primes: Vec<u64>,
    #[serde(with = "serde_big::uint")]
    pub modulus: BigUint,
    /// sorted by residue
    pub members: Vec<FamilyMember>,
}

impl ProgressionFamily {
    pub fn member(&self, signs: &[Sign]) -> Option<&FamilyMember> {
        self.members.iter().find(|m| m.signs == signs)
    }

    /// Member whose progression contains `value`.
    pub fn member_containing(&self, value: &BigUint) -> Option<&FamilyMember> {
        let r = value % &self.modulus;
        self.members.iter().find(|m| m.residue == r)
    }
}

fn inverse_mod_prime(a: u64, p: u64) -> u64 {
    // Fermat; p is prime and a is coprime to it
    let mut acc = 1u128;
    let mut base = (a % p) as u128;
    let mut e = p - 2;
    let m = p as u128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        e >>= 1;
    }
    acc as u64
}

/// All `2^m` residue classes that are simultaneous non-ranks of `primes`.
pub fn crt_family(primes: &[u64]) -> Result<ProgressionFamily> {
    if primes.is_empty() || primes.len() > MAX_FAMILY_PRIMES {
        return Err(Error::domain(format!(
            "crt_family takes 1..={MAX_FAMILY_PRIMES} primes, got {}",
            primes.len()
        )));
    }
    let mut sorted = primes.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::domain(format!("duplicate primes in {primes:?}")));
    }
    let offsets = sorted.iter().map(|&p| nsix(p)).collect::<Result<Vec<_>>>()?;

    let mut modulus = BigUint::one();
    let mut members = vec![FamilyMember { signs: Vec::new(), residue: BigUint::zero() }];
    for (&p, &ns) in sorted.iter().zip(&offsets) {
        let inv = inverse_mod_prime((&modulus % p).to_u64().expect("< p"), p);
        let modulus_ref = &modulus;
        members = members
            .into_par_iter()
            .flat_map_iter(|m| {
                Sign::BOTH.into_iter().map(move |s| {
                    let target = if s == Sign::Plus { ns } else { p - ns };
                    let r = (&m.residue % p).to_u64().expect("< p");
                    // x = r_old + M*t with t ≡ (target - r_old) * M^{-1} (mod p)
                    let t = ((target + p - r) % p) as u128 * inv as u128 % p as u128;
                    let mut signs = m.signs.clone();
                    signs.push(s);
                    FamilyMember { signs, residue: &m.residue + modulus_ref * BigUint::from(t as u64) }
                })
            })
            .collect();
        modulus *= p;
    }
    members.sort_by(|a, b| a.residue.cmp(&b.residue));
    Ok(ProgressionFamily { primes: sorted, modulus, members })
}

/// A progression written as `outer*(q1*(q2*(...(qk*n + rk)...) + r2) + r1) ± N(outer/6)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NestedForm {
    pub outer: u64,
    pub sign: Sign,
    pub offset: u64,
    /// `(q_i, r_i)` from the outermost bracket inwards
    pub chain: Vec<(u64, u64)>,
}

impl NestedForm {
    /// Value of the progression at `n`.
    pub fn evaluate(&self, n: u64) -> BigInt {
        let mut u = BigInt::from(n);
        for &(q, r) in self.chain.iter().rev() {
            u = u * q + r;
        }
        u * self.outer + BigInt::from(self.sign.as_i64()) * self.offset
    }

    /// `r'` of the two-prime form `p(p'n + r') ± N(p/6)`.
    pub fn first_coefficient(&self) -> Option<u64> {
        self.chain.first().map(|&(_, r)| r)
    }
}

impl fmt::Display for NestedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut inner = String::from("n");
        for &(q, r) in self.chain.iter().rev() {
            inner = if r == 0 { format!("{q}{inner}") } else { format!("{q}{inner}+{r}") };
            inner = format!("({inner})");
        }
        if self.chain.is_empty() {
            write!(f, "{}n{}{}", self.outer, self.sign, self.offset)
        } else {
            write!(f, "{}{}{}{}", self.outer, inner, self.sign, self.offset)
        }
    }
}

/// Rewrite the family member `(primes, signs, residue)` with
/// `primes[outer_index]` outermost; the other primes nest in the order given.
///
/// Evaluating the result at `n = 0` gives `residue` up to a multiple of the
/// family modulus.
pub fn nested_form(primes: &[u64], signs: &[Sign], residue: &BigUint, outer_index: usize) -> Result<NestedForm> {
    if primes.len() != signs.len() || outer_index >= primes.len() {
        return Err(Error::domain("nested_form needs one sign per prime and a valid outer index"));
    }
    let modulus: BigUint = primes.iter().fold(BigUint::one(), |acc, &p| acc * p);
    for (&p, &s) in primes.iter().zip(signs) {
        let ns = nsix(p)?;
        let want = if s == Sign::Plus { ns } else { p - ns };
        if (residue % p).to_u64() != Some(want) {
            return Err(Error::domain(format!("residue {residue} is not ≡ {s}N({p}/6) (mod {p})")));
        }
    }
    let outer = primes[outer_index];
    let sign = signs[outer_index];
    let offset = nsix(outer)?;

    // u = (residue ∓ offset)/outer, taken mod modulus/outer
    let residue = BigInt::from(residue.clone() % &modulus);
    let shifted = residue - BigInt::from(sign.as_i64()) * offset;
    let modulus = BigInt::from(modulus);
    let shifted = shifted.mod_floor(&modulus);
    let mut u = (shifted / outer).to_biguint().expect("non-negative");

    let mut chain = Vec::with_capacity(primes.len() - 1);
    for (i, &q) in primes.iter().enumerate() {
        if i == outer_index {
            continue;
        }
        let (rest, r) = u.div_rem(&BigUint::from(q));
        chain.push((q, r.to_u64().expect("< q")));
        u = rest;
    }
    debug_assert!(u.is_zero());
    Ok(NestedForm { outer, sign, offset, chain })
}

/// The two alternating gaps `(2N(p/6), p - 2N(p/6))` between consecutive non-ranks of `p`.
pub fn gap_pattern(p: u64) -> Result<(u64, u64)> {
    let ns = nsix(p)?;
    Ok((2 * ns, p - 2 * ns))
}
