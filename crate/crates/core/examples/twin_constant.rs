//! The twin-prime constant and the asymptote it feeds.

use twin_sieve::counting::{asymptote_coefficient, asymptotic_density, twin_prime_constant, EULER_GAMMA};
use twin_sieve::oracle::Oracle;

fn main() -> twin_sieve::Result<()> {
    for tol in [1e-3, 1e-6, 1e-9, 1e-12] {
        println!("tol {tol:e}: c2 = {:.16}", twin_prime_constant(tol)?);
    }
    let c2 = twin_prime_constant(1e-12)?;
    println!("2 c2            = {:.6}", 2.0 * c2);
    println!("c2 e^(-2 gamma) = {:.6}", c2 * (-2.0 * EULER_GAMMA).exp());
    println!("asymptote coefficient 2 c2 e^(-2 gamma) = {:.6}", asymptote_coefficient());

    let oracle = Oracle::default();
    for x in [1_000u64, 10_000, 100_000, 1_000_000] {
        let truth = oracle.pi2_exact(6 * x + 1)?;
        let model = asymptotic_density(x)?;
        println!("x = {x:>8}: pi2(6x+1) = {truth:>6}  asymptote = {model:>10.1}  ratio {:.4}", truth as f64 / model);
    }
    Ok(())
}
