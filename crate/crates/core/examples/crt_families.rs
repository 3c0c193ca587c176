//! Simultaneous non-ranks of several primes as CRT residue classes, each
//! rewritten in nested form.

use num_bigint::BigUint;
use twin_sieve::progressions::{crt_family, nested_form};

fn main() -> twin_sieve::Result<()> {
    for primes in [vec![5, 7], vec![5, 11], vec![5, 7, 11]] {
        let family = crt_family(&primes)?;
        println!("primes {:?}, modulus {}", family.primes, family.modulus);
        for m in &family.members {
            let signs: String = m.signs.iter().map(|s| s.symbol()).collect();
            let form = nested_form(&family.primes, &m.signs, &m.residue, 0)?;
            println!("  {signs:<4} {:>4}   {form}", m.residue);
        }
    }

    // 5(11(7n+1)+2)-1 and 11(5(7n+1)+1)-2 describe the same class
    let family = crt_family(&[5, 7, 11])?;
    let member = family.member_containing(&BigUint::from(64u32)).expect("64 is a triple non-rank");
    for order in [[5, 11, 7], [11, 5, 7]] {
        let signs: Vec<_> = order
            .iter()
            .map(|p| member.signs[family.primes.iter().position(|q| q == p).unwrap()])
            .collect();
        println!("{}", nested_form(&order, &signs, &member.residue, 0)?);
    }
    Ok(())
}
