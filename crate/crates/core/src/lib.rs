//! Twin-rank sieve.
//!
//! A positive integer `m` is a *twin rank* when `6m - 1` and `6m + 1` are both
//! prime, and a *non-rank* otherwise. Every non-rank is generated by some prime
//! `p >= 5` as `n*p ± N(p/6)`, where `N(p/6)` is the integer nearest `p/6`.
//! This crate builds on that observation:
//!
//! - [`arith`]: primality, prime tables, primorials, `N(p/6)`, squarefree terms.
//! - [`classify`]: non-rank generators, parent primes, rank classification.
//! - [`progressions`]: residue sets `C_p` modulo primorials, remnants, CRT
//!   families of simultaneous non-ranks.
//! - [`counting`]: exact per-period counts, the Legendre-type twin-rank
//!   formula, its main term and the twin-prime-constant asymptote.
//! - [`oracle`]: a segmented sieve used as ground truth for all of the above.
//! - [`cli`]: the `twin-sieve` command-line frontend.
//!
//! ```
//! use twin_sieve::classify::{classify, Verdict};
//!
//! let c = classify(28).unwrap();
//! assert_eq!(c.verdict, Verdict::NonRank);
//! assert_eq!(c.parent, Some(13)); // 6*28 + 1 = 169 = 13^2
//! ```

pub mod arith;
pub mod classify;
pub mod cli;
pub mod counting;
mod error;
pub mod oracle;
pub mod progressions;
pub(crate) mod serde_big;

pub use error::{Error, Result};

/// Sign of a `± N(p/6)` offset, or the side (`6m - 1` / `6m + 1`) of a rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
pub enum Sign {
    #[serde(rename = "-")]
    Minus,
    #[serde(rename = "+")]
    Plus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Minus, Sign::Plus];

    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Minus => -1,
            Sign::Plus => 1,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Minus => '-',
            Sign::Plus => '+',
        }
    }
}

impl std::fmt::Display for Sign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.symbol())
    }
}
