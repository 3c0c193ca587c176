//! Exact per-period counts for the first sieve levels.

use num_rational::BigRational;
use num_traits::Zero;
use twin_sieve::arith::primes_between;
use twin_sieve::counting::counts_row;

fn main() -> twin_sieve::Result<()> {
    println!("{:>4} {:>14} {:>10} {:>12} {:>10}  Q", "p", "L", "G", "R", "S");
    let mut telescoped = BigRational::zero();
    for p in primes_between(4, 50) {
        let row = counts_row(p)?;
        telescoped += &row.q;
        assert_eq!(telescoped, row.big_q);
        let q: f64 = num_traits::ToPrimitive::to_f64(&row.big_q).unwrap_or(f64::NAN);
        println!("{p:>4} {:>14} {:>10} {:>12} {:>10}  {q:.6}", row.l, row.g, row.r, row.s);
    }
    Ok(())
}
