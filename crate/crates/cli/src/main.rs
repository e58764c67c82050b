mod cache;
mod verify;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use modunits::bivar_poly::BivarPoly;
use modunits::divpoly::{DivPolyCache, FPoly};
use modunits::qseries::QSeries;
use modunits::siegel::h_star;
use modunits::unit_lattice::{basis_s, decompose_series, is_in_s, to_p_expression, ExpVector};
use serde_json::{json, Value};

use cache::{PolyCache, PolyKind};

/// `println!` that exits quietly when stdout is closed early.
macro_rules! say {
    ($($arg:tt)*) => {
        emit(&format!($($arg)*))
    };
}

#[derive(Parser)]
#[command(
    name = "modunits",
    version,
    about = "Division polynomials and modular units on X1(N)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    P,
    F,
    D,
}

#[derive(Subcommand)]
enum Command {
    /// Print P_n, F_n or the discriminant D
    Poly {
        #[arg(long, value_enum, ignore_case = true)]
        kind: Kind,
        #[arg(long, allow_negative_numbers = true)]
        n: Option<i64>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Directory for cached P_n and F_n
        #[arg(long)]
        cache: Option<PathBuf>,
    },
    /// Reduced q-expansion of h_(k/N,0)
    Series {
        #[arg(long)]
        k: i64,
        #[arg(long = "N")]
        level: u32,
        /// Number of known coefficients in q^(1/N); defaults to 15N
        #[arg(long)]
        prec: Option<i64>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Canonical basis of the exponent lattice S
    Basis {
        #[arg(long = "N")]
        level: u32,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Exponent vector and p-expression of a Siegel product
    Decompose {
        #[arg(long = "N")]
        level: u32,
        /// Comma-separated e(1),...,e(m)
        #[arg(
            long,
            allow_hyphen_values = true,
            conflicts_with = "series",
            required_unless_present = "series"
        )]
        exponents: Option<String>,
        /// JSON file holding a q-series
        #[arg(long)]
        series: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Check the curve identities and lattice round trips
    Verify {
        /// A level, an inclusive range like 4..12, or a comma list
        #[arg(long = "N")]
        levels: String,
        #[arg(long)]
        prec: Option<i64>,
        /// Largest n for the P_n consistency checks; defaults to N/2 + 2
        #[arg(long)]
        nmax: Option<i64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
}

enum Failure {
    Usage(String),
    Checks,
}

fn usage<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Usage(e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn emit(line: &str) {
    let mut out = std::io::stdout().lock();
    if writeln!(out, "{line}").is_err() {
        std::process::exit(0);
    }
}

fn print_json(v: &impl serde::Serialize) {
    say!(
        "{}",
        serde_json::to_string_pretty(v).expect("output serializes")
    );
}

fn run(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Poly {
            kind,
            n,
            format,
            cache,
        } => cmd_poly(kind, n, format, cache),
        Command::Series {
            k,
            level,
            prec,
            format,
        } => {
            let prec = prec.unwrap_or(15 * level as i64);
            if prec < 1 {
                return Err(usage("--prec must be positive"));
            }
            let s = h_star(k, level, prec).map_err(usage)?;
            match format {
                Format::Json => print_json(&s),
                Format::Text => say!("{s}"),
            }
            Ok(())
        }
        Command::Basis { level, format } => {
            let b = basis_s(level).map_err(usage)?;
            match format {
                Format::Json => print_json(&b),
                Format::Text => {
                    say!("N = {}, index = {}", b.level, b.index);
                    for v in &b.vectors {
                        say!("{v}");
                    }
                }
            }
            Ok(())
        }
        Command::Decompose {
            level,
            exponents,
            series,
            format,
        } => cmd_decompose(level, exponents, series, format),
        Command::Verify {
            levels,
            prec,
            nmax,
            seed,
            trials,
            jobs,
            format,
        } => {
            let levels = parse_levels(&levels)?;
            let opts = verify::VerifyOptions {
                prec,
                nmax,
                seed,
                trials,
                jobs,
            };
            let reports = verify::run(&levels, &opts).map_err(Failure::Usage)?;
            match format {
                Format::Json => print_json(&reports),
                Format::Text => {
                    for r in &reports {
                        let n = r.n.map(|n| format!(" n={n}")).unwrap_or_default();
                        let at = r
                            .first_failing_exponent
                            .as_ref()
                            .map(|e| format!(" first failure at q^({e})"))
                            .unwrap_or_default();
                        let verdict = if r.pass { "PASS" } else { "FAIL" };
                        say!(
                            "{verdict} {} N={}{n} precN={}{at}",
                            r.check,
                            r.level,
                            r.prec
                        );
                    }
                }
            }
            if reports.iter().all(|r| r.pass) {
                Ok(())
            } else {
                Err(Failure::Checks)
            }
        }
    }
}

fn parse_levels(s: &str) -> Result<Vec<u32>, Failure> {
    let bad = || usage(format!("cannot parse level list {s:?}"));
    let mut out = Vec::new();
    for part in s.split(',') {
        let part = part.trim();
        if let Some((a, b)) = part.split_once("..") {
            let a: u32 = a.trim().parse().map_err(|_| bad())?;
            let b: u32 = b
                .trim()
                .trim_start_matches('=')
                .parse()
                .map_err(|_| bad())?;
            if a > b {
                return Err(bad());
            }
            out.extend(a..=b);
        } else {
            out.push(part.parse().map_err(|_| bad())?);
        }
    }
    if let Some(&l) = out.iter().find(|&&l| l < 4) {
        return Err(usage(format!("level {l} is below 4")));
    }
    Ok(out)
}

fn cached_poly(
    cache: Option<&PolyCache>,
    kind: PolyKind,
    n: i64,
    compute: impl FnOnce() -> Result<BivarPoly, Failure>,
) -> Result<BivarPoly, Failure> {
    if let Some(hit) = cache.and_then(|c| c.get(kind, n)) {
        return Ok(hit);
    }
    let p = compute()?;
    if let Some(c) = cache {
        c.put(kind, n, &p)
            .map_err(|e| usage(format!("cannot write cache: {e}")))?;
    }
    Ok(p)
}

fn cmd_poly(
    kind: Kind,
    n: Option<i64>,
    format: Format,
    cache: Option<PathBuf>,
) -> Result<(), Failure> {
    let mut polys = DivPolyCache::new();
    let cache = cache
        .map(|d| PolyCache::open(&d).map_err(|e| usage(format!("cannot open cache: {e}"))))
        .transpose()?;
    let need_n = || n.ok_or_else(|| usage("--n is required for this kind"));
    let (label, n_field, poly_json, text) = match kind {
        Kind::D => {
            let d = polys.discriminant().clone();
            ("D", None, json!(d), d.render())
        }
        Kind::P => {
            let n = need_n()?;
            let p = cached_poly(cache.as_ref(), PolyKind::P, n, || polys.p(n).map_err(usage))?;
            ("P", Some(n), json!(p), p.render())
        }
        Kind::F => {
            let n = need_n()?;
            let f = if n >= 3 {
                FPoly::Poly(cached_poly(cache.as_ref(), PolyKind::F, n, || {
                    polys.f_poly(n).map_err(usage)
                })?)
            } else {
                polys.f(n).map_err(usage)?
            };
            let j = match &f {
                FPoly::Poly(p) => json!(p),
                FPoly::Rational(r) => json!(r),
            };
            ("F", Some(n), j, f.render())
        }
    };
    match format {
        Format::Text => say!("{text}"),
        Format::Json => {
            let mut obj = serde_json::Map::new();
            obj.insert("kind".into(), json!(label));
            if let Some(n) = n_field {
                obj.insert("n".into(), json!(n));
            }
            obj.insert("text".into(), json!(text));
            obj.insert("polynomial".into(), poly_json);
            print_json(&Value::Object(obj));
        }
    }
    Ok(())
}

fn cmd_decompose(
    level: u32,
    exponents: Option<String>,
    series: Option<PathBuf>,
    format: Format,
) -> Result<(), Failure> {
    let e = match (exponents, series) {
        (Some(list), _) => {
            let e = list
                .split(',')
                .map(|x| x.trim().parse::<i64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| usage(format!("cannot parse exponents {list:?}")))?;
            ExpVector::new(level, e).map_err(usage)?
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
            let s: QSeries = serde_json::from_str(&text).map_err(usage)?;
            let (_, _, fstar) = s.reduced_form().map_err(usage)?;
            decompose_series(&fstar, level).map_err(usage)?
        }
        (None, None) => return Err(usage("give --exponents or --series")),
    };
    let in_s = is_in_s(&e);
    let pexp = if in_s {
        Some(to_p_expression(&e).map_err(usage)?)
    } else {
        None
    };
    match format {
        Format::Json => print_json(&json!({
            "evec": e,
            "ledger": e.ledger(),
            "inS": in_s,
            "pExpression": pexp,
        })),
        Format::Text => {
            let (s1, s2) = e.ledger();
            say!("e = {e}");
            say!("ledger = ({s1}, {s2})");
            match pexp {
                Some(p) => say!(
                    "alpha = {}, beta = {}, pexp = {:?}",
                    p.alpha,
                    p.beta,
                    p.pexp
                ),
                None => say!("not in S"),
            }
        }
    }
    Ok(())
}
