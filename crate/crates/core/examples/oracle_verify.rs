//! Check the classifier against the segmented sieve.
//!
//!     cargo run --release --example oracle_verify -- 1000000

use twin_sieve::oracle::Oracle;

fn main() -> twin_sieve::Result<()> {
    let limit: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1_000_000);
    let oracle = Oracle::default();
    let r = oracle.verify_classify(limit)?;
    println!(
        "m <= {limit}: {} twin ranks, {} non-ranks, {} mismatches ({:.2}s, {:.0} ranks/s)",
        r.twin_ranks,
        r.non_ranks,
        r.mismatches.len(),
        r.elapsed_secs,
        r.ranks_per_sec
    );
    println!("pi2(10^9) = {}", oracle.pi2_exact(1_000_000_000)?);
    Ok(())
}
