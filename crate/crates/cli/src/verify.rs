//! Batch verification across levels.

use modunits::curve_series::{verify_level, CheckReport, CurveError};
use modunits::divpoly::DivPolyCache;
use modunits::siegel::product_series;
use modunits::unit_lattice::{
    d_to_h, decompose_series, is_in_s, p_to_h, random_member, second_modulus, t_to_h,
    to_p_expression, v_to_h, LatticeError,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub prec: Option<i64>,
    pub nmax: Option<i64>,
    pub seed: u64,
    pub trials: usize,
    pub jobs: usize,
}

fn report(check: &str, level: u32, prec: i64, pass: bool) -> CheckReport {
    CheckReport {
        check: check.into(),
        level,
        n: None,
        prec,
        pass,
        first_failing_exponent: None,
    }
}

/// Ledgers of `t`, `d`, `v` and `p_1..p_m`, exact from level 7 on and
/// modulo `(12, N gcd(N, 2))` below.
fn ledger_check(level: u32) -> Result<bool, LatticeError> {
    let md = second_modulus(level);
    let m = (level / 2) as i64;
    let same = |got: (i64, i64), want: (i64, i64)| {
        if level >= 7 {
            got == want
        } else {
            (got.0 - want.0).rem_euclid(12) == 0 && (got.1 - want.1).rem_euclid(md) == 0
        }
    };
    let mut ok = same(t_to_h(level)?.ledger(), (0, -1))
        && same(d_to_h(level)?.ledger(), (12, 0))
        && same(v_to_h(level)?.ledger(), (0, -md));
    for n in 1..=m {
        ok &= same(p_to_h(n, level)?.1.ledger(), (0, 0));
    }
    Ok(ok)
}

/// Random members of `S` survive both round trips.
fn round_trips(level: u32, seed: u64, trials: usize) -> Result<(bool, bool), LatticeError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (level as u64).wrapping_mul(0x9e37_79b9));
    let prec = 2 * level as i64;
    let (mut series_ok, mut dict_ok) = (true, true);
    for _ in 0..trials {
        let e = random_member(level, 5, &mut rng);
        debug_assert!(is_in_s(&e));
        let f = product_series(&e, prec)?;
        series_ok &= decompose_series(&f.fstar, level).ok().as_ref() == Some(&e);
        dict_ok &= to_p_expression(&e)?.expand()? == (1, e);
    }
    Ok((series_ok, dict_ok))
}

fn verify_one(level: u32, opts: &VerifyOptions) -> Result<Vec<CheckReport>, CurveError> {
    let prec = opts.prec.unwrap_or(15 * level as i64);
    let nmax = opts.nmax.unwrap_or(level as i64 / 2 + 2);
    let mut cache = DivPolyCache::new();
    let mut out = verify_level(level, prec, nmax, &mut cache)?;
    let (series_ok, dict_ok) = round_trips(level, opts.seed, opts.trials)?;
    out.push(report(
        "decompose_round_trip",
        level,
        2 * level as i64,
        series_ok,
    ));
    out.push(report("dictionary_round_trip", level, prec, dict_ok));
    out.push(report("ledger", level, prec, ledger_check(level)?));
    Ok(out)
}

/// Reports in level order regardless of scheduling.
pub fn run(levels: &[u32], opts: &VerifyOptions) -> Result<Vec<CheckReport>, String> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs.max(1))
        .build()
        .map_err(|e| e.to_string())?;
    let per_level: Vec<Result<Vec<CheckReport>, CurveError>> =
        pool.install(|| levels.par_iter().map(|&l| verify_one(l, opts)).collect());
    let mut out = Vec::new();
    for (level, r) in levels.iter().zip(per_level) {
        out.extend(r.map_err(|e| format!("level {level}: {e}"))?);
    }
    Ok(out)
}
