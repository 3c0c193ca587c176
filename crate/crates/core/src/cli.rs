//! The `twin-sieve` command line.
//!
//! Every subcommand prints one [`OutputEnvelope`], as JSON by default or as
//! CSV with `--emit csv`. In CSV the scalar results are repeated on each row
//! and the command's main list contributes one row per element.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::arith::{is_prime, nsix, primes_between};
use crate::classify::{classify, nonranks_of};
use crate::counting::{counts_row, legendre_pi2, main_term, twin_prime_constant, EULER_GAMMA};
use crate::oracle::{Oracle, DEFAULT_CEILING};
use crate::progressions::{crt_family, gap_pattern, nested_form, remnants_below, residue_set, ResidueSet};
use crate::{Error, Result};

pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputEnvelope {
    pub command: String,
    pub parameters: BTreeMap<String, Value>,
    pub results: Value,
    pub engine_version: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "twin-sieve", version, about = "Twin ranks, non-ranks and the twin-prime sieve")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format
    #[arg(long, global = true, value_enum, default_value = "json")]
    emit: Emit,

    /// Write output here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Largest number the sieve oracle may examine
    #[arg(long, global = true, default_value_t = DEFAULT_CEILING)]
    ceiling: u64,

    /// Worker threads (defaults to one per core)
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Directory memoizing residue sets by level
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify m as twin rank or non-rank
    Classify(ClassifyArgs),
    /// List twin ranks up to a rank limit
    Twins(LimitArgs),
    /// List the non-ranks n*p ± N(p/6) of a prime
    Nonranks(NonranksArgs),
    /// Emit the residue set C_p
    Constants(LevelArgs),
    /// Remnants below a bound after sieving through a level
    Remnants(RemnantsArgs),
    /// CRT family of simultaneous non-ranks
    Family(FamilyArgs),
    /// Exact per-period counts L, G, q, S, Q, R, x
    Counts(CountsArgs),
    /// Legendre-type twin-rank count against the oracle
    Legendre(LevelArgs),
    /// Main term in sum and product form
    Mainterm(LevelArgs),
    /// Twin-prime constant
    C2(C2Args),
    /// Check classify against the sieve oracle
    Verify(VerifyArgs),
    /// Time classification and sieving
    Bench(LimitArgs),
}

#[derive(Debug, Args, Serialize)]
struct ClassifyArgs {
    m: u64,
}

#[derive(Debug, Args, Serialize)]
struct LimitArgs {
    #[arg(long)]
    limit: u64,
}

#[derive(Debug, Args, Serialize)]
struct NonranksArgs {
    #[arg(long)]
    prime: u64,
    #[arg(long)]
    limit: u64,
}

#[derive(Debug, Args, Serialize)]
struct LevelArgs {
    #[arg(long)]
    level: u64,
}

#[derive(Debug, Args, Serialize)]
struct RemnantsArgs {
    #[arg(long)]
    level: u64,
    #[arg(long)]
    bound: u64,
}

#[derive(Debug, Args, Serialize)]
struct FamilyArgs {
    /// Comma-separated primes >= 5
    #[arg(long, value_delimiter = ',', required = true)]
    primes: Vec<u64>,
    /// Rewrite every member with this prime outermost
    #[arg(long)]
    nested: Option<u64>,
}

#[derive(Debug, Args, Serialize)]
struct CountsArgs {
    #[arg(long)]
    level: u64,
    /// One row for every level from 5 up to --level
    #[arg(long)]
    table: bool,
}

#[derive(Debug, Args, Serialize)]
struct C2Args {
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
}

#[derive(Debug, Args, Serialize)]
struct VerifyArgs {
    #[arg(long)]
    limit: u64,
    /// Include elapsed time and throughput (makes output run-dependent)
    #[arg(long)]
    timing: bool,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Classify(_) => "classify",
            Command::Twins(_) => "twins",
            Command::Nonranks(_) => "nonranks",
            Command::Constants(_) => "constants",
            Command::Remnants(_) => "remnants",
            Command::Family(_) => "family",
            Command::Counts(_) => "counts",
            Command::Legendre(_) => "legendre",
            Command::Mainterm(_) => "mainterm",
            Command::C2(_) => "c2",
            Command::Verify(_) => "verify",
            Command::Bench(_) => "bench",
        }
    }

    /// Key of the list that becomes CSV rows.
    fn row_key(&self) -> Option<&'static str> {
        match self {
            Command::Twins(_) => Some("ranks"),
            Command::Nonranks(_) => Some("terms"),
            Command::Constants(_) => Some("constants"),
            Command::Remnants(_) => Some("remnants"),
            Command::Family(_) => Some("members"),
            Command::Counts(a) if a.table => Some("rows"),
            Command::Verify(_) => Some("mismatches"),
            _ => None,
        }
    }

    fn parameters(&self) -> Value {
        let v = match self {
            Command::Classify(a) => serde_json::to_value(a),
            Command::Twins(a) | Command::Bench(a) => serde_json::to_value(a),
            Command::Nonranks(a) => serde_json::to_value(a),
            Command::Constants(a) | Command::Legendre(a) | Command::Mainterm(a) => serde_json::to_value(a),
            Command::Remnants(a) => serde_json::to_value(a),
            Command::Family(a) => serde_json::to_value(a),
            Command::Counts(a) => serde_json::to_value(a),
            Command::C2(a) => serde_json::to_value(a),
            Command::Verify(a) => serde_json::to_value(a),
        };
        v.expect("argument structs serialize")
    }
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("engine types serialize")
}

fn rational_approx(v: &num_rational::BigRational) -> f64 {
    use num_traits::ToPrimitive;
    v.to_f64().unwrap_or(f64::NAN)
}

struct Context {
    oracle: Oracle,
    cache_dir: Option<PathBuf>,
}

impl Context {
    fn residue_set(&self, level: u64) -> Result<ResidueSet> {
        let Some(dir) = &self.cache_dir else {
            return residue_set(level);
        };
        if let Some(cached) = ResidueSet::read_cache(dir, level)? {
            return Ok(cached);
        }
        let set = residue_set(level)?;
        set.write_cache(dir)?;
        Ok(set)
    }

    fn execute(&self, command: &Command) -> Result<Value> {
        Ok(match command {
            Command::Classify(a) => {
                let c = classify(a.m)?;
                let mut v = to_json(&c);
                v["witness"] = to_json(&c.witness());
                v["twin_index"] = if c.is_twin_rank() { json!(6 * a.m) } else { Value::Null };
                v
            }
            Command::Twins(a) => {
                let s = self.oracle.twin_ranks_up_to(a.limit)?;
                json!({ "limit": a.limit, "count": s.len(), "ranks": s.ranks })
            }
            Command::Nonranks(a) => {
                let terms = nonranks_of(a.prime, a.limit)?;
                let (g1, g2) = gap_pattern(a.prime)?;
                json!({
                    "p": a.prime,
                    "limit": a.limit,
                    "offset": nsix(a.prime)?,
                    "gaps": [g1, g2],
                    "count": terms.len(),
                    "terms": to_json(&terms),
                })
            }
            Command::Constants(a) => {
                let set = self.residue_set(a.level)?;
                let mut v = to_json(&set);
                v["count"] = json!(set.len());
                v
            }
            Command::Remnants(a) => to_json(&remnants_below(a.level, a.bound)?),
            Command::Family(a) => {
                let family = crt_family(&a.primes)?;
                let mut v = to_json(&family);
                if let Some(outer) = a.nested {
                    let idx = family
                        .primes
                        .iter()
                        .position(|&p| p == outer)
                        .ok_or_else(|| Error::domain(format!("--nested {outer} is not one of the family primes")))?;
                    let members = v["members"].as_array_mut().expect("members list");
                    for (m, out) in family.members.iter().zip(members) {
                        let form = nested_form(&family.primes, &m.signs, &m.residue, idx)?;
                        out["nested"] = json!(form.to_string());
                    }
                }
                v["count"] = json!(family.members.len());
                v
            }
            Command::Counts(a) => {
                if a.table {
                    if a.level < 5 || !is_prime(a.level) {
                        return Err(Error::domain(format!("level must be a prime >= 5, got {}", a.level)));
                    }
                    let rows = primes_between(4, a.level).into_iter().map(counts_row).collect::<Result<Vec<_>>>()?;
                    json!({ "level": a.level, "rows": to_json(&rows) })
                } else {
                    to_json(&counts_row(a.level)?)
                }
            }
            Command::Legendre(a) => to_json(&legendre_pi2(a.level, &self.oracle)?),
            Command::Mainterm(a) => {
                let m = main_term(a.level)?;
                let mut v = to_json(&m);
                v["approx"] = json!({
                    "R_M_sum": rational_approx(&m.r_m_sum),
                    "R_M_product": rational_approx(&m.r_m_product),
                    "R_E": rational_approx(&m.r_e),
                    "gap": rational_approx(&m.gap),
                });
                v
            }
            Command::C2(a) => {
                let c2 = twin_prime_constant(a.tol)?;
                let damp = (-2.0 * EULER_GAMMA).exp();
                json!({
                    "tolerance": a.tol,
                    "c2": c2,
                    "two_c2": 2.0 * c2,
                    "c2_exp_minus_2gamma": c2 * damp,
                    "two_c2_exp_minus_2gamma": 2.0 * c2 * damp,
                })
            }
            Command::Verify(a) => {
                let r = self.oracle.verify_classify(a.limit)?;
                let mut v = to_json(&r);
                if !a.timing {
                    let obj = v.as_object_mut().expect("report object");
                    obj.remove("elapsed_secs");
                    obj.remove("ranks_per_sec");
                }
                v
            }
            Command::Bench(a) => {
                let start = Instant::now();
                let r = self.oracle.verify_classify(a.limit)?;
                let verify_secs = start.elapsed().as_secs_f64();
                let start = Instant::now();
                let pi2 = self.oracle.pi2_exact(6 * a.limit + 1)?;
                let sieve_secs = start.elapsed().as_secs_f64();
                json!({
                    "limit": a.limit,
                    "workers": rayon::current_num_threads(),
                    "mismatches": r.mismatches.len(),
                    "verify_secs": verify_secs,
                    "classify_per_sec": a.limit as f64 / verify_secs.max(1e-9),
                    "pi2": pi2,
                    "sieve_secs": sieve_secs,
                })
            }
        })
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Array(items) => {
            // sign vectors read better unseparated
            if items.iter().all(|i| matches!(i.as_str(), Some("+" | "-"))) {
                items.iter().map(cell).collect()
            } else {
                items.iter().map(cell).collect::<Vec<_>>().join(";")
            }
        }
        Value::Object(map) => map.values().map(cell).collect::<Vec<_>>().join(":"),
        other => other.to_string(),
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, v, out);
            }
        }
        other => out.push((prefix.to_string(), cell(other))),
    }
}

/// CSV rendering: scalars as columns, one row per element of `row_key`.
fn to_csv(results: &Value, row_key: Option<&str>) -> Result<Vec<u8>> {
    let mut scalars = Vec::new();
    let mut rows: Vec<Vec<(String, String)>> = Vec::new();
    let empty = Map::new();
    let obj = results.as_object().unwrap_or(&empty);
    for (k, v) in obj {
        if Some(k.as_str()) == row_key {
            for item in v.as_array().into_iter().flatten() {
                let mut row = Vec::new();
                flatten(k, item, &mut row);
                rows.push(row);
            }
        } else {
            flatten(k, v, &mut scalars);
        }
    }
    if rows.is_empty() {
        rows.push(Vec::new());
    }
    let mut header: Vec<String> = scalars.iter().map(|(k, _)| k.clone()).collect();
    if let Some(first) = rows.iter().find(|r| !r.is_empty()) {
        header.extend(first.iter().map(|(k, _)| k.clone()));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header).map_err(csv_error)?;
    for row in &rows {
        let record = scalars.iter().chain(row.iter()).map(|(_, v)| v.as_str());
        w.write_record(record).map_err(csv_error)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

fn write_output(bytes: &[u8], out: Option<&Path>) -> Result<()> {
    match out {
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
        }
        Some(path) => {
            let tmp = path.with_extension("tmp");
            std::fs::write(&tmp, bytes)?;
            std::fs::rename(&tmp, path)?;
        }
    }
    Ok(())
}

/// Render an envelope as the bytes `--emit` would produce.
pub fn render(envelope: &OutputEnvelope, emit: Emit, row_key: Option<&str>) -> Result<Vec<u8>> {
    match emit {
        Emit::Json => {
            let mut s = serde_json::to_string_pretty(envelope).expect("envelope serializes");
            s.push('\n');
            Ok(s.into_bytes())
        }
        Emit::Csv => to_csv(&envelope.results, row_key),
    }
}

fn envelope_for(cli: &Cli) -> Result<OutputEnvelope> {
    let ctx = Context { oracle: Oracle::new(cli.ceiling), cache_dir: cli.cache_dir.clone() };
    let results = match cli.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::domain(format!("cannot start {n} workers: {e}")))?
            .install(|| ctx.execute(&cli.command))?,
        None => ctx.execute(&cli.command)?,
    };
    let mut parameters: BTreeMap<String, Value> = match cli.command.parameters() {
        Value::Object(map) => map.into_iter().collect(),
        _ => BTreeMap::new(),
    };
    parameters.insert("ceiling".into(), json!(cli.ceiling));
    Ok(OutputEnvelope {
        command: cli.command.name().to_string(),
        parameters,
        results,
        engine_version: ENGINE_VERSION.to_string(),
    })
}

/// Parse `argv` (including the program name), run the command and write its
/// output. Returns the process exit code: 0 on success, 2 on a usage error,
/// 1 when the computation fails.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let outcome = envelope_for(&cli)
        .and_then(|env| render(&env, cli.emit, cli.command.row_key()))
        .and_then(|bytes| write_output(&bytes, cli.out.as_deref()));
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("twin-sieve: {e}");
            1
        }
    }
}

/// Run a command in-process and return its envelope.
pub fn envelope<I, T>(argv: I) -> Result<OutputEnvelope>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| Error::domain(e.to_string()))?;
    envelope_for(&cli)
}
