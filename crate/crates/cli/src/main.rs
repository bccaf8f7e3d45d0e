use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use theta_kernel::eisenstein::{a_coeff, rational_string, verify_theorem_even, verify_theorem_main1, VerificationReport};
use theta_kernel::exactnt::prime_divisors;
use theta_kernel::hermitian::{beta_p, key_lemma_h_witness, l_values, local_symbol_table, ImagQuadField};
use theta_kernel::quadform::HalfIntegralForm;
use theta_kernel::siegelseries::{compare_with_table, CacheRecord, FqCache};
use theta_kernel::witness::ternary_witness;
use theta_kernel::{Error, VERSION};

/// Siegel Eisenstein coefficients, local polynomials and theta-kernel checks.
#[derive(Parser, Debug)]
#[command(name = "thetak", version)]
struct Cli {
    /// Print JSON instead of plain text.
    #[arg(long, global = true)]
    json: bool,
    /// Directory for cached local polynomials.
    #[arg(long, global = true, value_name = "DIR")]
    cache_dir: Option<PathBuf>,
    /// Worker threads for parallel sums.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Theorem {
    Main1,
    Even,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Recompute the ternary table for D(T) ≤ 13 and compare.
    Table1,
    /// Local polynomial F_q(T, X) of a form.
    Fq {
        /// Form in text format: n, diagonal of 2T, then the strict upper triangle.
        #[arg(long, value_name = "PATH")]
        form: PathBuf,
        /// Prime; all primes dividing D(T) when omitted.
        #[arg(long)]
        q: Option<u64>,
    },
    /// Fourier coefficient a(T) of E_k^(n).
    Coeff {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: i64,
        #[arg(long, value_name = "PATH", conflicts_with = "t")]
        form: Option<PathBuf>,
        /// Shorthand for the unary form (t) when n = 1.
        #[arg(long, allow_negative_numbers = true)]
        t: Option<i64>,
    },
    /// Check a theta-kernel congruence on all forms up to a bound.
    Verify {
        #[arg(long, value_enum)]
        theorem: Theorem,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        t: u64,
        #[arg(long, default_value_t = 20)]
        bound: i64,
    },
    /// Ternary form with D(T) = p.
    Witness {
        #[arg(long)]
        p: u64,
    },
    /// ord_p of the Hermitian L-value product.
    HermitianBeta {
        #[arg(long = "DK")]
        dk: u64,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        t: i64,
    },
    /// Prime where the local character of K is -1 at gamma.
    HermitianWitness {
        #[arg(long, allow_negative_numbers = true)]
        gamma: i64,
        #[arg(long = "DK")]
        dk: u64,
    },
}

enum Outcome {
    Pass(Value, String),
    Fail(Value, String),
}

fn usage_error(e: &Error) -> bool {
    matches!(
        e,
        Error::InvalidArgument(_)
            | Error::Parse(_)
            | Error::Unsupported(_)
            | Error::WeightTooSmall { .. }
            | Error::Degenerate(_)
            | Error::Io(_)
    )
}

fn read_form(path: &PathBuf) -> Result<HalfIntegralForm, Error> {
    HalfIntegralForm::from_text(&fs::read_to_string(path)?)
}

fn with_version<T: Serialize>(value: &T) -> Value {
    let mut v = serde_json::to_value(value).expect("serializable");
    if let Value::Object(map) = &mut v {
        if !map.contains_key("version") {
            let mut out = serde_json::Map::new();
            out.insert("version".into(), json!(VERSION));
            out.extend(std::mem::take(map));
            *map = out;
        }
    }
    v
}

fn report_outcome(r: VerificationReport) -> Outcome {
    let failing: Vec<String> = r
        .evidence
        .iter()
        .chain(r.witness.iter())
        .filter(|e| e.residue.is_none() || (e.expected_zero && e.residue != Some(0)))
        .map(|e| format!("  counterexample {:?}: {}", e.form, e.coefficient))
        .collect();
    let text = format!(
        "theorem {} n={} p={} t={} k={} bound={} normalization={}\n{} coefficients; integral={} theta_vanishes={} essential={}\n{}{}",
        r.theorem,
        r.n,
        r.p,
        r.t,
        r.k,
        r.bound,
        r.normalization,
        r.evidence.len(),
        r.verdicts.integral,
        r.verdicts.theta_vanishes,
        r.verdicts.essential,
        failing.iter().map(|l| format!("{l}\n")).collect::<String>(),
        if r.pass { "PASS" } else { "FAIL" }
    );
    let pass = r.pass;
    let v = serde_json::to_value(&r).expect("serializable");
    if pass {
        Outcome::Pass(v, text)
    } else {
        Outcome::Fail(v, text)
    }
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    match &cli.command {
        Command::Table1 => {
            let cmp = compare_with_table()?;
            let mut text = String::new();
            for r in &cmp.records {
                text += &format!(
                    "D={:<3} {:<5} {:?} representatives={} {}\n",
                    r.entry.d,
                    r.entry.label,
                    r.entry.product,
                    r.representatives,
                    if r.matched { "ok" } else { "MISSING" }
                );
            }
            for (d, p) in &cmp.unexpected {
                text += &format!("D={d:<3} unexpected product {p:?}\n");
            }
            text += if cmp.pass { "PASS" } else { "FAIL" };
            let v = with_version(&cmp);
            Ok(if cmp.pass { Outcome::Pass(v, text) } else { Outcome::Fail(v, text) })
        }
        Command::Fq { form, q } => {
            let t = read_form(form)?;
            let primes = match q {
                Some(q) => vec![*q],
                None => prime_divisors(t.d_of()?.unsigned_abs()),
            };
            let records = primes
                .iter()
                .map(|&q| Ok(CacheRecord::from_polynomial(&FqCache::global().get_or_compute(&t, q)?)))
                .collect::<Result<Vec<_>, Error>>()?;
            let text = records
                .iter()
                .map(|r| format!("q={} F={:?} D={} ord={}", r.q, r.coeffs, r.d, r.ord))
                .collect::<Vec<_>>()
                .join("\n");
            let v = match (q, records.as_slice()) {
                (Some(_), [r]) => with_version(r),
                _ => json!({"version": VERSION, "form": t.doubled_rows(), "records": records}),
            };
            Ok(Outcome::Pass(v, text))
        }
        Command::Coeff { n, k, form, t } => {
            let f = match (form, t) {
                (Some(path), None) => read_form(path)?,
                (None, Some(t)) if *n == 1 => HalfIntegralForm::unary(*t),
                (None, Some(_)) => return Err(Error::InvalidArgument("--t needs --n 1".into())),
                _ => return Err(Error::InvalidArgument("give --form or --t".into())),
            };
            let a = a_coeff(&f, *n, *k)?;
            let s = rational_string(&a);
            Ok(Outcome::Pass(
                json!({"version": VERSION, "n": n, "k": k, "T": f.doubled_rows(), "a": s}),
                format!("a({}) = {}", f, s),
            ))
        }
        Command::Verify { theorem, p, t, bound } => {
            let report = match theorem {
                Theorem::Main1 => verify_theorem_main1(*p, *t, *bound)?,
                Theorem::Even => verify_theorem_even(*p, *t, *bound)?,
            };
            Ok(report_outcome(report))
        }
        Command::Witness { p } => {
            let w = ternary_witness(*p)?;
            let verified = w.verify();
            let d = w.form.d_of()?;
            let v = json!({
                "version": VERSION,
                "p": w.p,
                "branch": w.branch,
                "auxiliary": w.auxiliary.map(|(q, a)| json!({"q": q, "a": a})),
                "G": w.form.doubled_rows(),
                "D": d as i64,
                "positive_definite": w.form.is_positive_definite(),
                "verified": verified,
            });
            let text = format!("p={} branch={:?} G={:?} D={} verified={}", w.p, w.branch, w.form.doubled_rows(), d, verified);
            Ok(if verified { Outcome::Pass(v, text) } else { Outcome::Fail(v, text) })
        }
        Command::HermitianBeta { dk, m, p, t } => {
            let field = ImagQuadField::new(*dk)?;
            let k = *m as i64 + (*p as i64 - 1) * t;
            let beta = beta_p(*m, k, *p, field)?;
            let factors: Vec<String> = l_values(*m, k, field)?.iter().map(rational_string).collect();
            let text = format!("k={k} beta={beta} L-values={}", factors.join(" "));
            Ok(Outcome::Pass(
                json!({"version": VERSION, "DK": dk, "m": m, "p": p, "t": t, "k": k, "beta": beta, "factors": factors}),
                text,
            ))
        }
        Command::HermitianWitness { gamma, dk } => {
            let field = ImagQuadField::new(*dk)?;
            let q = key_lemma_h_witness(*gamma, field)?;
            let table = local_symbol_table(field, *gamma)?;
            let symbols: Vec<Value> = table
                .iter()
                .map(|(v, s)| json!({"place": v.to_string(), "value": s}))
                .collect();
            let text = format!(
                "q={q}\n{}",
                table.iter().map(|(v, s)| format!("{v}: {s:+}")).collect::<Vec<_>>().join("\n")
            );
            Ok(Outcome::Pass(
                json!({"version": VERSION, "gamma": gamma, "DK": dk, "q": q, "symbols": symbols}),
                text,
            ))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    if let Err(e) = FqCache::global().set_dir(cli.cache_dir.clone()) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let (value, text, code) = match run(&cli) {
        Ok(Outcome::Pass(v, t)) => (v, t, 0),
        Ok(Outcome::Fail(v, t)) => (v, t, 1),
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(if usage_error(&e) { 2 } else { 1 });
        }
    };
    let mut out = io::stdout().lock();
    let written = if cli.json {
        writeln!(out, "{}", serde_json::to_string_pretty(&value).expect("serializable"))
    } else {
        writeln!(out, "{text}")
    };
    if written.is_err() {
        return ExitCode::from(1);
    }
    ExitCode::from(code)
}
