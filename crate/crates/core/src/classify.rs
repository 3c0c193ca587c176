//! Twin ranks and non-ranks.
//!
//! For a prime `p >= 5` every `k = n*p ± N(p/6)` with `n >= 1` is a non-rank:
//! one of `6k ± 1` is a proper multiple of `p`. Conversely every non-rank
//! arises this way from the smallest prime factor of a composite `6m ± 1`,
//! which is what [`classify`] uses to name the parent prime.

use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, nsix, smallest_prime_factor};
use crate::{Error, Result, Sign};

/// Largest `m` whose pair `6m ± 1` fits in `u64` (and so in the
/// deterministic primality range).
pub const MAX_RANK: u64 = (u64::MAX - 1) / 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    TwinRank,
    NonRank,
}

/// `k(n, p)^± = n*p ± N(p/6)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonRankTerm {
    pub p: u64,
    pub n: u64,
    pub sign: Sign,
    pub value: u64,
}

impl NonRankTerm {
    /// The pair `(6k - 1, 6k + 1)` surrounding this term's twin index.
    pub fn pair(&self) -> (u64, u64) {
        (6 * self.value - 1, 6 * self.value + 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub m: u64,
    pub verdict: Verdict,
    /// Least prime `>= 5` dividing a composite member of `6m ± 1`.
    pub parent: Option<u64>,
    /// Which of `6m - 1` (`-`) and `6m + 1` (`+`) are composite.
    pub composite_sides: Vec<Sign>,
}

impl Classification {
    pub fn is_twin_rank(&self) -> bool {
        self.verdict == Verdict::TwinRank
    }

    /// The generator `m = κ*parent ± N(parent/6)` witnessing a non-rank.
    pub fn witness(&self) -> Option<NonRankTerm> {
        let p = self.parent?;
        let ns = nsix(p).ok()?;
        let r = self.m % p;
        if r == ns {
            Some(NonRankTerm { p, n: (self.m - ns) / p, sign: Sign::Plus, value: self.m })
        } else if r == p - ns {
            Some(NonRankTerm { p, n: (self.m + ns) / p, sign: Sign::Minus, value: self.m })
        } else {
            None
        }
    }
}

fn require_generator(p: u64) -> Result<u64> {
    nsix(p)
}

/// All `k(n, p)^± <= limit` with `n >= 1`, ascending.
///
/// The `n = 0` term `N(p/6)` is not generated: it is a twin rank whenever
/// `p ∓ 2` is prime (see [`rank_from_prime`]).
pub fn nonranks_of(p: u64, limit: u64) -> Result<Vec<NonRankTerm>> {
    let ns = require_generator(p)?;
    let mut out = Vec::new();
    for n in 1u64.. {
        let base = match n.checked_mul(p) {
            Some(b) if b - ns <= limit => b,
            _ => break,
        };
        out.push(NonRankTerm { p, n, sign: Sign::Minus, value: base - ns });
        if let Some(v) = base.checked_add(ns).filter(|&v| v <= limit) {
            out.push(NonRankTerm { p, n, sign: Sign::Plus, value: v });
        }
    }
    Ok(out)
}

/// Decide whether `m` is a twin rank; for non-ranks name the parent prime.
pub fn classify(m: u64) -> Result<Classification> {
    if m == 0 {
        return Err(Error::domain("classify needs m >= 1"));
    }
    if m > MAX_RANK {
        return Err(Error::domain(format!("6m + 1 exceeds the deterministic primality range for m = {m}")));
    }
    let mut parent: Option<u64> = None;
    let mut composite_sides = Vec::new();
    for (side, v) in [(Sign::Minus, 6 * m - 1), (Sign::Plus, 6 * m + 1)] {
        if !is_prime(v) {
            composite_sides.push(side);
            let q = smallest_prime_factor(v)?;
            parent = Some(parent.map_or(q, |p| p.min(q)));
        }
    }
    let verdict = if composite_sides.is_empty() { Verdict::TwinRank } else { Verdict::NonRank };
    Ok(Classification { m, verdict, parent, composite_sides })
}

/// Twin index `6m` of a twin rank.
pub fn twin_index(m: u64) -> Result<u64> {
    if classify(m)?.is_twin_rank() {
        Ok(6 * m)
    } else {
        Err(Error::domain(format!("{m} is not a twin rank")))
    }
}

/// The twin rank `N(p/6)` when `p` and `p ∓ 2` form a twin pair.
pub fn rank_from_prime(p: u64) -> Result<Option<u64>> {
    let ns = require_generator(p)?;
    let partner = if p % 6 == 1 { p - 2 } else { p + 2 };
    Ok(is_prime(partner).then_some(ns))
}
