//! Classify the first few ranks and show the generator behind each non-rank.
//!
//!     cargo run --example classify_ranks -- 40

use twin_sieve::classify::{classify, rank_from_prime};

fn main() -> twin_sieve::Result<()> {
    let limit: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(30);

    for m in 1..=limit {
        let c = classify(m)?;
        match c.witness() {
            None => println!("{m:>4}  twin rank   ({}, {})", 6 * m - 1, 6 * m + 1),
            Some(w) => println!(
                "{m:>4}  non-rank    {}*{} {} N({}/6)   parent {}",
                w.n, w.p, w.sign, w.p, w.p
            ),
        }
    }

    // the n = 0 offsets: N(p/6) is a twin rank exactly when p has a twin partner
    println!();
    for p in [5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        match rank_from_prime(p)? {
            Some(m) => println!("p = {p:>2}: N(p/6) = {m} is a twin rank"),
            None => println!("p = {p:>2}: no twin partner"),
        }
    }
    Ok(())
}
