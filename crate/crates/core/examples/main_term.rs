//! The main term with floors dropped, in sum and product form.

use num_traits::ToPrimitive;
use twin_sieve::counting::main_term;

fn main() -> twin_sieve::Result<()> {
    for p in [7, 11, 13] {
        let m = main_term(p)?;
        let f = |r: &num_rational::BigRational| r.to_f64().unwrap_or(f64::NAN);
        println!(
            "p = {p:>2}  x = {:>5}  sum {:>10.3}  product {:>9.3}  gap {:>10.3}  R_E {:>8.3}  asymptote {:>8.3}",
            m.x,
            f(&m.r_m_sum),
            f(&m.r_m_product),
            f(&m.gap),
            f(&m.r_e),
            m.asymptote
        );
    }
    let m = main_term(7)?;
    println!("\nexact at p = 7: sum = {}, product = {}", m.r_m_sum, m.r_m_product);
    Ok(())
}
