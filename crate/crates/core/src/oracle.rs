//! Ground truth from a segmented sieve of Eratosthenes.
//!
//! The sieve knows nothing about non-ranks: it marks composites in blocks of
//! odd numbers and then looks for primes on both sides of each multiple of 6.
//! Every other module is checked against it.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::{classify, Verdict};
use crate::{Error, Result};

pub const DEFAULT_CEILING: u64 = 1_000_000_000;
pub const DEFAULT_SEGMENT_SIZE: u64 = 1 << 18;

/// Non-ranks listed in a [`VerifyReport`]; the count is always complete.
pub const NON_RANK_LIST_MAX: usize = 1000;

/// Primes up to `limit` by a plain (unsegmented) sieve.
fn base_primes(limit: u64) -> Vec<u64> {
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Primality flags for the odd numbers of `[lo, hi)`.
#[derive(Debug, Clone)]
pub struct SieveSegment {
    pub lo: u64,
    pub hi: u64,
    /// bit `i` set <=> `lo' + 2i` is composite, where `lo'` is the first odd number `>= lo`
    pub composite_flags: Vec<u64>,
    first_odd: u64,
}

impl SieveSegment {
    /// Sieve `[lo, hi)` with `primes`, which must include every odd prime up to `sqrt(hi)`.
    pub fn new(lo: u64, hi: u64, primes: &[u64]) -> Self {
        let first_odd = lo | 1;
        let count = hi.saturating_sub(first_odd).div_ceil(2) as usize;
        let mut flags = vec![0u64; count.div_ceil(64)];
        let mut set = |i: usize| flags[i / 64] |= 1 << (i % 64);
        for &p in primes.iter().filter(|&&p| p > 2) {
            if p * p >= hi {
                break;
            }
            let mut m = (p * p).max(first_odd.div_ceil(p) * p);
            if m % 2 == 0 {
                m += p;
            }
            while m < hi {
                set(((m - first_odd) / 2) as usize);
                m += 2 * p;
            }
        }
        if first_odd == 1 && count > 0 {
            set(0);
        }
        SieveSegment { lo, hi, composite_flags: flags, first_odd }
    }

    pub fn is_prime(&self, n: u64) -> bool {
        assert!(n >= self.lo && n < self.hi, "{n} outside [{}, {})", self.lo, self.hi);
        if n % 2 == 0 {
            return n == 2;
        }
        let i = ((n - self.first_odd) / 2) as usize;
        self.composite_flags[i / 64] >> (i % 64) & 1 == 0
    }
}

/// Twin ranks `m <= limit`, ascending.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwinRankStream {
    pub limit: u64,
    pub ranks: Vec<u64>,
}

impl TwinRankStream {
    pub fn iter(&self) -> std::slice::Iter<'_, u64> {
        self.ranks.iter()
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }
}

impl IntoIterator for TwinRankStream {
    type Item = u64;
    type IntoIter = std::vec::IntoIter<u64>;

    fn into_iter(self) -> Self::IntoIter {
        self.ranks.into_iter()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub m: u64,
    pub classify: Verdict,
    pub sieve: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub limit: u64,
    pub mismatches: Vec<Mismatch>,
    pub twin_ranks: u64,
    pub non_ranks: u64,
    /// the first [`NON_RANK_LIST_MAX`] non-ranks
    pub non_rank_list: Vec<u64>,
    pub elapsed_secs: f64,
    pub ranks_per_sec: f64,
}

/// Sieve configuration. Every query must stay below `ceiling`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Oracle {
    pub ceiling: u64,
    /// integers covered by one segment
    pub segment_size: u64,
}

impl Default for Oracle {
    fn default() -> Self {
        Oracle { ceiling: DEFAULT_CEILING, segment_size: DEFAULT_SEGMENT_SIZE }
    }
}

impl Oracle {
    pub fn new(ceiling: u64) -> Self {
        Oracle { ceiling, ..Oracle::default() }
    }

    pub fn with_segment_size(self, segment_size: u64) -> Self {
        Oracle { segment_size, ..self }
    }

    /// Whether the oracle can answer questions about numbers up to `y`.
    pub fn covers(&self, y: u64) -> bool {
        y <= self.ceiling
    }

    fn check(&self, y: u64) -> Result<()> {
        if self.covers(y) {
            Ok(())
        } else {
            Err(Error::capacity(format!("{y} exceeds the oracle ceiling {}", self.ceiling)))
        }
    }

    fn check_rank(&self, limit_rank: u64) -> Result<()> {
        match limit_rank.checked_mul(6).and_then(|v| v.checked_add(1)) {
            Some(y) => self.check(y),
            None => Err(Error::capacity(format!("rank {limit_rank} overflows u64"))),
        }
    }

    /// Run `visit(m, is_twin)` for every rank in `[1, limit_rank]`, one
    /// segment at a time, in parallel; collect the per-segment outputs in order.
    fn map_segments<T, F>(&self, limit_rank: u64, per_segment: F) -> Vec<T>
    where
        T: Send,
        F: Fn(&mut dyn Iterator<Item = (u64, bool)>) -> T + Sync,
    {
        if limit_rank == 0 {
            return Vec::new();
        }
        let base = base_primes(isqrt(6 * limit_rank + 1));
        let ranks_per_segment = (self.segment_size / 6).max(1);
        let segments = limit_rank.div_ceil(ranks_per_segment);
        (0..segments)
            .into_par_iter()
            .map(|s| {
                let ma = 1 + s * ranks_per_segment;
                let mb = (ma + ranks_per_segment).min(limit_rank + 1);
                let seg = SieveSegment::new(6 * ma - 1, 6 * (mb - 1) + 2, &base);
                let mut it = (ma..mb).map(|m| (m, seg.is_prime(6 * m - 1) && seg.is_prime(6 * m + 1)));
                per_segment(&mut it)
            })
            .collect()
    }

    /// Number of twin ranks in `[1, limit_rank]`.
    pub fn count_twin_ranks(&self, limit_rank: u64) -> Result<u64> {
        self.check_rank(limit_rank)?;
        Ok(self.map_segments(limit_rank, |it| it.filter(|&(_, t)| t).count() as u64).into_iter().sum())
    }

    /// `π₂(y)`: twin pairs `(6m - 1, 6m + 1)` with `m >= 1` and `6m + 1 <= y`.
    pub fn pi2_exact(&self, y: u64) -> Result<u64> {
        self.check(y)?;
        self.count_twin_ranks(y.saturating_sub(1) / 6)
    }

    pub fn twin_ranks_up_to(&self, limit_rank: u64) -> Result<TwinRankStream> {
        self.check_rank(limit_rank)?;
        let chunks = self.map_segments(limit_rank, |it| it.filter(|&(_, t)| t).map(|(m, _)| m).collect::<Vec<_>>());
        Ok(TwinRankStream { limit: limit_rank, ranks: chunks.concat() })
    }

    /// Compare [`classify`] with the sieve for every `m` in `[1, limit]`.
    pub fn verify_classify(&self, limit: u64) -> Result<VerifyReport> {
        self.check_rank(limit)?;
        let start = Instant::now();
        let verdict = |twin: bool| if twin { Verdict::TwinRank } else { Verdict::NonRank };
        let chunks = self.map_segments(limit, |it| {
            let mut mismatches = Vec::new();
            let mut twins = 0u64;
            let mut non = Vec::new();
            let mut non_count = 0u64;
            for (m, twin) in it {
                let by_sieve = verdict(twin);
                match classify(m) {
                    Ok(c) if c.verdict == by_sieve => {}
                    Ok(c) => mismatches.push(Mismatch { m, classify: c.verdict, sieve: by_sieve }),
                    Err(_) => mismatches.push(Mismatch { m, classify: verdict(!twin), sieve: by_sieve }),
                }
                if twin {
                    twins += 1;
                } else {
                    non_count += 1;
                    if non.len() < NON_RANK_LIST_MAX {
                        non.push(m);
                    }
                }
            }
            (mismatches, twins, non_count, non)
        });
        let mut report = VerifyReport {
            limit,
            mismatches: Vec::new(),
            twin_ranks: 0,
            non_ranks: 0,
            non_rank_list: Vec::new(),
            elapsed_secs: 0.0,
            ranks_per_sec: 0.0,
        };
        for (mismatches, twins, non_count, non) in chunks {
            report.mismatches.extend(mismatches);
            report.twin_ranks += twins;
            report.non_ranks += non_count;
            let room = NON_RANK_LIST_MAX - report.non_rank_list.len();
            report.non_rank_list.extend(non.into_iter().take(room));
        }
        report.elapsed_secs = start.elapsed().as_secs_f64();
        report.ranks_per_sec = limit as f64 / report.elapsed_secs.max(1e-9);
        Ok(report)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{is_prime, nsix, PrimeTable};
    use crate::progressions::remnants_below;

    const FIRST_RANKS: [u64; 9] = [1, 2, 3, 5, 7, 10, 12, 17, 18];

    #[test]
    fn pi2_examples() {
        let o = Oracle::default();
        assert_eq!(o.pi2_exact(91).unwrap(), 7);
        assert_eq!(o.pi2_exact(13).unwrap(), 2);
        assert_eq!(o.pi2_exact(6).unwrap(), 0);
        assert_eq!(o.pi2_exact(0).unwrap(), 0);
        assert!(matches!(Oracle::new(100).pi2_exact(101), Err(Error::Capacity(_))));
    }

    #[test]
    fn twin_rank_examples() {
        let o = Oracle::default();
        assert_eq!(o.twin_ranks_up_to(18).unwrap().ranks, FIRST_RANKS);
        assert!(o.twin_ranks_up_to(0).unwrap().is_empty());
        assert_eq!(o.twin_ranks_up_to(747).unwrap().len(), 116);
        assert!(Oracle::new(100).twin_ranks_up_to(17).is_err());
    }

    #[test]
    fn verify_examples() {
        let o = Oracle::default();
        let r = o.verify_classify(19).unwrap();
        assert!(r.mismatches.is_empty());
        assert_eq!(r.non_rank_list, [4, 6, 8, 9, 11, 13, 14, 15, 16, 19]);
        assert_eq!((r.twin_ranks, r.non_ranks), (9, 10));

        let r = o.verify_classify(1).unwrap();
        assert!(r.mismatches.is_empty());
        assert_eq!(r.twin_ranks, 1);
    }

    #[test]
    fn segment_primality_matches_table() {
        let table = PrimeTable::new(20_000);
        let base = base_primes(200);
        for (lo, hi) in [(1, 1000), (999, 5000), (12_345, 20_000), (2, 3)] {
            let seg = SieveSegment::new(lo, hi, &base);
            for n in lo..hi {
                assert_eq!(seg.is_prime(n), table.contains(n), "{n} in [{lo}, {hi})");
            }
        }
    }

    #[test]
    fn segment_size_does_not_change_results() {
        let y = 3_000_000;
        let sizes = [1 << 10, 1 << 16, 1 << 20];
        let counts: Vec<u64> =
            sizes.iter().map(|&s| Oracle::default().with_segment_size(s).pi2_exact(y).unwrap()).collect();
        assert!(counts.windows(2).all(|w| w[0] == w[1]), "{counts:?}");
        let streams: Vec<Vec<u64>> =
            sizes.iter().map(|&s| Oracle::default().with_segment_size(s).twin_ranks_up_to(50_000).unwrap().ranks).collect();
        assert!(streams.windows(2).all(|w| w[0] == w[1]));
        // awkward sizes, including one rank per segment
        for s in [1, 7, 6 * 37 + 5] {
            assert_eq!(Oracle::default().with_segment_size(s).twin_ranks_up_to(2_000).unwrap().ranks, streams[0][..streams[0].partition_point(|&m| m <= 2_000)]);
        }
    }

    #[test]
    fn stream_matches_primality_test() {
        let s = Oracle::default().twin_ranks_up_to(100_000).unwrap();
        let expected: Vec<u64> = (1..=100_000).filter(|&m| is_prime(6 * m - 1) && is_prime(6 * m + 1)).collect();
        assert_eq!(s.ranks, expected);
    }

    #[test]
    fn twins_and_non_ranks_partition_the_ranks() {
        let r = Oracle::default().verify_classify(1_000_000).unwrap();
        assert!(r.mismatches.is_empty(), "{:?}", &r.mismatches[..r.mismatches.len().min(5)]);
        assert_eq!(r.twin_ranks + r.non_ranks, 1_000_000);
        assert_eq!(r.non_rank_list.len(), NON_RANK_LIST_MAX);
    }

    #[test]
    fn front_remnants_are_exactly_the_twin_ranks() {
        let o = Oracle::default();
        for level in [7, 11, 13, 61] {
            let p_next = crate::arith::next_prime(level).unwrap();
            let front = (p_next * p_next - 1) / 6;
            let report = remnants_below(level, front).unwrap();
            let truth = o.twin_ranks_up_to(front - 1).unwrap().ranks;
            assert_eq!(report.remnants, truth, "level {level}");
            assert_eq!(report.front_twin_ranks, truth);
            // the kept n = 0 offsets are the only reason this holds at level 61
            if level == 61 {
                assert!(truth.contains(&nsix(61).unwrap()));
            }
        }
    }
}
