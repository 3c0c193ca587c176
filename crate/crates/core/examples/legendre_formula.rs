//! The Legendre-type twin-rank count against the sieve oracle.
//!
//!     cargo run --release --example legendre_formula

use twin_sieve::counting::legendre_pi2;
use twin_sieve::oracle::Oracle;

fn main() -> twin_sieve::Result<()> {
    let oracle = Oracle::default();
    println!("{:>3} {:>9} {:>9} {:>10} {:>10} {:>9} {:>9}", "p", "x", "R0", "ie_sum", "estimate", "pi2(6x+1)", "window");
    for p in [7, 11, 13, 17, 19] {
        let r = legendre_pi2(p, &oracle)?;
        let show = |v: Option<u64>| v.map_or("-".to_string(), |v| v.to_string());
        println!(
            "{p:>3} {:>9} {:>9} {:>10} {:>10} {:>9} {:>9}",
            r.x,
            r.r0,
            r.ie_sum,
            r.estimate,
            show(r.oracle_pi2),
            show(r.oracle_window)
        );
    }
    Ok(())
}
