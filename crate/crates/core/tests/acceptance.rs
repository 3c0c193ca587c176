//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test --test acceptance`. Tables that back criteria 6 and 8
//! are written to `reproduction/` at the workspace root.
//!
//! Criterion 7 asks for `c₂·e^{-2γ} = 0.416213`, but `c₂ = 0.6601618...` gives
//! `c₂·e^{-2γ} = 0.2081...`; the quoted value is `2c₂·e^{-2γ}`. The literal
//! check is evaluated as written, prints FAIL, and is listed in [`KNOWN_RED`]
//! so it does not fail the test run. Any other FAIL does.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use twin_sieve::arith::{nsix, primes_between, PrimeTable};
use twin_sieve::classify::{classify, twin_index};
use twin_sieve::counting::{
    asymptotic_density, counts_row, legendre_pi2, main_term, remnant_count, supergroup_size, twin_prime_constant,
    CountsRow, EULER_GAMMA,
};
use twin_sieve::oracle::Oracle;
use twin_sieve::progressions::{crt_family, initial_nonranks, remnants_below, residue_set};
use twin_sieve::Sign;

const VERIFY_LIMIT: u64 = 1_000_000;
const VERIFY_BUDGET: Duration = Duration::from_secs(60);
const PAIR_LIMIT: u64 = 100_000;
const PAIR_BUDGET: Duration = Duration::from_secs(10);
const CONSTANT_TOL: f64 = 1e-5;
const CONSISTENCY_TOL: f64 = 2e-3;
const TARGET_C2_DAMPED: f64 = 0.416_213;
const TARGET_TWO_C2: f64 = 1.320_320;
const WORKER_COUNTS: [usize; 3] = [1, 4, 16];

/// Criteria whose literal check cannot hold; see the module docs.
const KNOWN_RED: &[u32] = &[7];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn reproduction_dir() -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../reproduction");
    std::fs::create_dir_all(&dir).expect("create reproduction dir");
    dir
}

fn fixture(name: &str) -> Vec<u64> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name);
    std::fs::read_to_string(path)
        .expect("fixture")
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(':').next().unwrap().parse().unwrap())
        .collect()
}

fn in_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(workers).build().expect("thread pool").install(f)
}

fn verify_output() -> String {
    let r = Oracle::default().verify_classify(VERIFY_LIMIT).expect("verify");
    format!("{:?} {} {} {:?}", r.mismatches, r.twin_ranks, r.non_ranks, r.non_rank_list)
}

fn family_output() -> String {
    let mut s = String::new();
    for mask in 1u32..16 {
        let primes: Vec<u64> = [5, 7, 11, 13].iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &p)| p).collect();
        s += &serde_json::to_string(&crt_family(&primes).unwrap()).unwrap();
    }
    s
}

fn legendre_output() -> String {
    let o = Oracle::default();
    [7, 11, 13].iter().map(|&p| serde_json::to_string(&legendre_pi2(p, &o).unwrap()).unwrap()).collect()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let r = Oracle::default().verify_classify(VERIFY_LIMIT).expect("verify");
    let elapsed = start.elapsed();
    outcome(
        r.mismatches.is_empty() && elapsed < VERIFY_BUDGET && r.twin_ranks + r.non_ranks == VERIFY_LIMIT,
        format!(
            "m <= {VERIFY_LIMIT}: {} mismatches, {} twin ranks, {} non-ranks, {:.2}s (budget {}s)",
            r.mismatches.len(),
            r.twin_ranks,
            r.non_ranks,
            elapsed.as_secs_f64(),
            VERIFY_BUDGET.as_secs()
        ),
    )
}

fn criterion_2() -> Outcome {
    let mut failures = Vec::new();
    let mut check = |name: &str, ok: bool| {
        if !ok {
            failures.push(name.to_string());
        }
    };
    check("C_5", residue_set(5).unwrap().constants == [0, 2, 3]);
    check("C_7", residue_set(7).unwrap().constants == [0, 2, 3, 5, 7, 10, 12, 17, 18, 23, 25, 28, 30, 32, 33]);

    // the stored C_11 list has 136 entries; by definition C_11 has 135, the
    // extra entry being 2 = N(11/6), which is ≡ N(11/6) (mod 11)
    let listed = fixture("c11.txt");
    let c11 = residue_set(11).unwrap();
    let extra: Vec<u64> = listed.iter().copied().filter(|&c| !c11.contains(c)).collect();
    let without_extra: Vec<u64> = listed.iter().copied().filter(|&c| c != 2).collect();
    check("C_11", c11.len() == 135 && without_extra == c11.constants && extra == [2]);

    check("A_7^(0)", initial_nonranks(7).unwrap() == [8, 13, 15, 20, 22, 27]);

    let ranks: Vec<u64> = (1..=18).filter(|&m| classify(m).unwrap().is_twin_rank()).collect();
    check("first twin ranks", ranks == [1, 2, 3, 5, 7, 10, 12, 17, 18]);
    let indices: Vec<u64> = ranks.iter().map(|&m| twin_index(m).unwrap()).collect();
    check("first twin indices", indices == [6, 12, 18, 30, 42, 60, 72, 102, 108]);
    let non: Vec<u64> = (1..=19).filter(|&m| !classify(m).unwrap().is_twin_rank()).collect();
    check("first non-ranks", non == [4, 6, 8, 9, 11, 13, 14, 15, 16, 19]);

    let level_61 = fixture("remnants_61_748.txt");
    let report = remnants_below(61, 748).unwrap();
    check("level 61 remnants", report.remnants == level_61 && report.intruders.is_empty());

    outcome(
        failures.is_empty(),
        if failures.is_empty() {
            format!(
                "C_5, C_7, C_11 (135 = 136 listed minus offset {extra:?}), A_7^(0), first ranks and non-ranks, {} remnants below 748 at level 61",
                level_61.len()
            )
        } else {
            format!("mismatched: {}", failures.join(", "))
        },
    )
}

fn criterion_3() -> Outcome {
    let table = PrimeTable::new(1000);
    let levels: Vec<u64> = table.primes()[2..30].to_vec();
    let rows: Vec<CountsRow> = levels.iter().map(|&p| counts_row(p).unwrap()).collect();
    let mut failures = Vec::new();
    let mut telescoped = BigRational::from_integer(BigInt::from(0));
    let mut running = BigRational::one();
    for (i, row) in rows.iter().enumerate() {
        let p = row.p_j;
        running *= BigRational::new(BigInt::from(p - 2), BigInt::from(p));
        let q_expected = if i == 0 {
            BigRational::new(BigInt::from(2), BigInt::from(5))
        } else {
            let prev = &rows[i - 1];
            BigRational::new(BigInt::from(prev.r.clone() * 2u32), BigInt::from(row.l.clone()))
        };
        telescoped += &row.q;
        let ok = row.s == &row.l - &row.r
            && row.s == supergroup_size(p).unwrap()
            && row.big_q == BigRational::one() - &running
            && row.x_frac == running
            && &row.big_q + &row.x_frac == BigRational::one()
            && row.q == q_expected
            && telescoped == row.big_q
            && (i == 0 || row.g == &rows[i - 1].r * 2u32);
        if !ok {
            failures.push(p);
        }
    }
    let sizes_ok = [5, 7, 11, 13].iter().all(|&p| BigUint::from(residue_set(p).unwrap().len()) == remnant_count(p).unwrap());
    let monotone = rows.windows(2).all(|w| w[1].big_q > w[0].big_q && w[1].x_frac < w[0].x_frac);
    outcome(
        failures.is_empty() && sizes_ok && monotone,
        format!(
            "levels 5..={}: identity failures {failures:?}; |C_p| = R(p) for p <= 13: {sizes_ok}; Q up, x down: {monotone}",
            levels.last().unwrap()
        ),
    )
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let primes: Vec<u64> = PrimeTable::new(PAIR_LIMIT).between(4, PAIR_LIMIT).to_vec();
    let offsets: Vec<u64> = primes.iter().map(|&p| nsix(p).unwrap()).collect();
    let mut violations = 0u64;
    let mut equal_pairs = 0u64;
    for i in 0..primes.len() {
        for j in i + 1..primes.len() {
            let equal = offsets[i] == offsets[j];
            let twins = primes[j] == primes[i] + 2;
            equal_pairs += equal as u64;
            violations += (equal != twins) as u64;
        }
    }
    let elapsed = start.elapsed();
    let pairs = primes.len() as u64 * (primes.len() as u64 - 1) / 2;
    outcome(
        violations == 0 && elapsed < PAIR_BUDGET,
        format!(
            "{pairs} prime pairs in [5, {PAIR_LIMIT}]: {equal_pairs} with equal N(p/6), {violations} violations, {:.2}s (budget {}s)",
            elapsed.as_secs_f64(),
            PAIR_BUDGET.as_secs()
        ),
    )
}

fn criterion_5() -> Outcome {
    let base = [5u64, 7, 11, 13];
    let mut failures = Vec::new();
    for mask in 1u32..16 {
        let primes: Vec<u64> = base.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &p)| p).collect();
        let family = crt_family(&primes).unwrap();
        let modulus: u64 = primes.iter().product();
        // one full period, shifted past n = 0 so every element is n*p ± N(p/6) with n >= 1
        let brute: BTreeSet<u64> = (modulus..2 * modulus)
            .filter(|&v| {
                primes.iter().all(|&p| {
                    let c = classify(v).unwrap();
                    let ns = nsix(p).unwrap();
                    let generated = v % p == ns || v % p == p - ns;
                    generated && !c.is_twin_rank()
                })
            })
            .map(|v| v % modulus)
            .collect();
        let got: BTreeSet<u64> = family.members.iter().map(|m| m.residue.to_u64().unwrap()).collect();
        if got != brute || family.members.len() != 1 << primes.len() {
            failures.push(primes);
        }
    }
    let f55 = crt_family(&[5, 11]).unwrap();
    let ex5 = f55.member_containing(&BigUint::from(9u32)).map(|m| m.signs.clone()) == Some(vec![Sign::Minus, Sign::Minus]);
    let f385 = crt_family(&[5, 7, 11]).unwrap();
    let ex6 = f385.member_containing(&BigUint::from(64u32)).map(|m| m.signs.clone())
        == Some(vec![Sign::Minus, Sign::Plus, Sign::Minus]);
    outcome(
        failures.is_empty() && ex5 && ex6,
        format!("15 subsets of {{5,7,11,13}}: failures {failures:?}; 9 mod 55 (-,-): {ex5}; 64 mod 385 (-,+,-): {ex6}"),
    )
}

fn criterion_6() -> Outcome {
    let oracle = Oracle::default();
    let r7 = legendre_pi2(7, &oracle).unwrap();
    let level_7 = r7.r0 == BigUint::from(15u32)
        && r7.ie_sum == BigInt::from(-4)
        && r7.estimate == BigInt::from(11)
        && r7.oracle_pi2 == Some(7)
        && r7.oracle_window == Some(14)
        && r7.residual_pi2.is_some()
        && r7.residual_window.is_some();

    let mut csv = String::from("p_j,x,R0,ie_sum,estimate,oracle_pi2,oracle_window,residual_pi2,residual_window\n");
    let mut complete = true;
    for p in [7, 11, 13, 17, 19] {
        let r = legendre_pi2(p, &oracle).unwrap();
        let show = |v: &Option<BigInt>| v.as_ref().map_or(String::new(), |v| v.to_string());
        if p <= 13 {
            complete &= r.oracle_pi2.is_some() && r.oracle_window.is_some();
        }
        writeln!(
            csv,
            "{p},{},{},{},{},{},{},{},{}",
            r.x,
            r.r0,
            r.ie_sum,
            r.estimate,
            r.oracle_pi2.map_or(String::new(), |v| v.to_string()),
            r.oracle_window.map_or(String::new(), |v| v.to_string()),
            show(&r.residual_pi2),
            show(&r.residual_window)
        )
        .unwrap();
    }
    let path = reproduction_dir().join("legendre_residuals.csv");
    std::fs::write(&path, &csv).unwrap();
    outcome(
        level_7 && complete,
        format!(
            "level 7: R0 15, ie_sum {}, estimate {}, pi2(91) {:?}, window {:?}; levels 7-19 written to reproduction/legendre_residuals.csv",
            r7.ie_sum, r7.estimate, r7.oracle_pi2, r7.oracle_window
        ),
    )
}

fn criterion_7() -> Outcome {
    let c2 = twin_prime_constant(1e-6).unwrap();
    let damp = (-2.0 * EULER_GAMMA).exp();
    let literal = (c2 * damp - TARGET_C2_DAMPED).abs() <= CONSTANT_TOL;
    let doubled = (2.0 * c2 * damp - TARGET_C2_DAMPED).abs() <= CONSTANT_TOL;
    let two_c2 = (2.0 * c2 - TARGET_TWO_C2).abs() <= CONSTANT_TOL;
    let coarse = twin_prime_constant(1e-3).unwrap();
    let consistent = (coarse - c2).abs() <= CONSISTENCY_TOL;
    outcome(
        literal && two_c2 && consistent,
        format!(
            "c2 = {c2:.10}; c2*e^-2g = {:.6} vs {TARGET_C2_DAMPED} ({}); 2c2*e^-2g = {:.6} ({}); 2c2 = {:.6} vs {TARGET_TWO_C2} ({}); tol 1e-3 vs 1e-6 differ by {:.1e} ({})",
            c2 * damp,
            verdict(literal),
            2.0 * c2 * damp,
            verdict(doubled),
            2.0 * c2,
            verdict(two_c2),
            (coarse - c2).abs(),
            verdict(consistent)
        ),
    )
}

fn criterion_8() -> Outcome {
    let mut exact = true;
    let mut lines = Vec::new();
    for p in [7, 11, 13] {
        let m = main_term(p).unwrap();
        exact &= m.gap == &m.r_m_sum - &m.r_m_product && m.asymptote.is_finite();
        lines.push(format!("p={p}: gap {:.3}, asymptote {:.3}", m.gap.to_f64().unwrap(), m.asymptote));
    }
    let level_7 = main_term(7).unwrap();
    exact &= level_7.r_m_sum == BigRational::new(1425.into(), 143.into())
        && level_7.r_m_product == BigRational::new(215.into(), 13.into());

    // the product column treats [1, x] as one sieve period: x·∏_{5<=p<=x}(1 - 2/p)
    let oracle = Oracle::default();
    let mut csv = String::from("x,pi2_6x_plus_1,asymptote,pi2_over_asymptote,period_product,pi2_over_period_product\n");
    for x in [1_000u64, 10_000, 100_000, 1_000_000] {
        let truth = oracle.pi2_exact(6 * x + 1).unwrap() as f64;
        let model = asymptotic_density(x).unwrap();
        let product: f64 = x as f64 * primes_between(4, x).iter().map(|&p| 1.0 - 2.0 / p as f64).product::<f64>();
        writeln!(csv, "{x},{truth},{model:.6},{:.6},{product:.6},{:.6}", truth / model, truth / product).unwrap();
    }
    std::fs::write(reproduction_dir().join("asymptotic_ratio.csv"), &csv).unwrap();
    outcome(exact, format!("{}; ratio table written to reproduction/asymptotic_ratio.csv", lines.join("; ")))
}

fn criterion_9() -> Outcome {
    let mut differing = Vec::new();
    for (name, run) in [("verify", verify_output as fn() -> String), ("families", family_output), ("legendre", legendre_output)] {
        let outputs: Vec<String> = WORKER_COUNTS.iter().map(|&w| in_pool(w, run)).collect();
        if outputs.windows(2).any(|w| w[0] != w[1]) {
            differing.push(name);
        }
    }
    outcome(
        differing.is_empty(),
        format!("criteria 1, 5, 6 under {WORKER_COUNTS:?} workers; differing: {differing:?}"),
    )
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "off"
    }
}

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome); 9] = [
        (1, "classification soundness", criterion_1),
        (2, "fixture lists exact", criterion_2),
        (3, "counting identities", criterion_3),
        (4, "equal N(p/6) iff twin pair", criterion_4),
        (5, "progression families", criterion_5),
        (6, "Legendre report", criterion_6),
        (7, "constants", criterion_7),
        (8, "main-term report", criterion_8),
        (9, "determinism under parallelism", criterion_9),
    ];
    let mut unexpected = Vec::new();
    for (id, name, run) in criteria {
        let o = run();
        let status = if o.pass { "PASS" } else { "FAIL" };
        let known = if !o.pass && KNOWN_RED.contains(&id) { " [known red]" } else { "" };
        println!("{status} {id} {name}{known}: {}", o.detail);
        if !o.pass && !KNOWN_RED.contains(&id) {
            unexpected.push(id);
        }
        if o.pass && KNOWN_RED.contains(&id) {
            println!("     criterion {id} is listed as known red but passed");
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
