//! Residue sets C_p modulo L(p), built directly and by lifting, plus the
//! remnants left below M(j+1) after sieving through a level.
//!
//!     cargo run --release --example residue_sets -- 61 748

use twin_sieve::progressions::{inductive_step, initial_nonranks, remnants_below, residue_set};

fn main() -> twin_sieve::Result<()> {
    let mut args = std::env::args().skip(1).map(|s| s.parse::<u64>());
    let level = args.next().and_then(|r| r.ok()).unwrap_or(61);
    let bound = args.next().and_then(|r| r.ok()).unwrap_or(748);

    let c5 = residue_set(5)?;
    println!("C_5  = {:?}", c5.constants);
    let c7 = inductive_step(&c5, 7)?;
    println!("C_7  = {:?}", c7.constants);
    println!("A_7^(0) = {:?}", initial_nonranks(7)?);

    let mut c = c7;
    for next in [11, 13, 17] {
        c = inductive_step(&c, next)?;
        assert_eq!(c, residue_set(next)?);
        println!("|C_{next}| = {} residues mod {}", c.len(), c.modulus);
    }

    let report = remnants_below(level, bound)?;
    println!(
        "\nlevel {level}: {} remnants below {bound}, M = {}, {} intruders",
        report.remnants.len(),
        report.front_limit,
        report.intruders.len()
    );
    for i in report.intruders.iter().take(10) {
        println!("  intruder {} (parent {})", i.value, i.parent);
    }
    Ok(())
}
