//! Non-ranks generated by a single prime, and the two gaps that alternate
//! between them.

use twin_sieve::classify::nonranks_of;
use twin_sieve::progressions::gap_pattern;

fn main() -> twin_sieve::Result<()> {
    for p in [5u64, 7, 11, 13] {
        let terms = nonranks_of(p, 80)?;
        let values: Vec<String> = terms.iter().map(|t| t.value.to_string()).collect();
        let (a, b) = gap_pattern(p)?;
        println!("p = {p:>2}  gaps {a},{b}  non-ranks <= 80: {}", values.join(" "));
    }

    // each term sits next to a multiple of p
    for t in nonranks_of(7, 30)? {
        let (lo, hi) = t.pair();
        println!("k({}, 7){} = {:>2}: ({lo}, {hi})", t.n, t.sign, t.value);
    }
    Ok(())
}
