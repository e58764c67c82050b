//! `q`-expansions of `b`, `c`, `d` and `p_n` on `X1(N)` built from Siegel
//! products, and checks of the polynomial identities they must satisfy.

use std::collections::BTreeMap;

use num_rational::BigRational;
use serde::Serialize;
use thiserror::Error;

use crate::divpoly::{DivPolyCache, DivPolyError};
use crate::qseries::{format_rational, QSeries, QSeriesError};
use crate::siegel::{product_series, SiegelError};
use crate::unit_lattice::{d_to_h, leading_exponent, p_to_h, v_to_h, ExpVector, LatticeError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CurveError {
    #[error("level {0} is too small")]
    BadLevel(u32),
    #[error("{name} has negative valuation {ord}/{level}")]
    NegativeValuation { name: String, ord: i64, level: u32 },
    #[error("{name} is only known to q^({have}/{level}), needed {need}")]
    InsufficientPrecision {
        name: String,
        have: i64,
        need: i64,
        level: u32,
    },
    #[error(transparent)]
    Siegel(#[from] SiegelError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Series(#[from] QSeriesError),
    #[error(transparent)]
    DivPoly(#[from] DivPolyError),
}

/// Rational expansion of `sign * prod_k h_(k/N,0)^e(k)` whose reduced part is
/// known to `rel_prec` coefficients.
fn unit_series(sign: i8, e: &ExpVector, rel_prec: i64) -> Result<QSeries, CurveError> {
    let prod = product_series(e, rel_prec)?;
    let s = BigRational::from_integer(sign.into());
    Ok(prod.scaled(&s).to_rational_series()?)
}

/// `p_n` known modulo `q^(need/N)`, or zero when `N | n`.
fn p_series_to(n: i64, level: u32, need: i64) -> Result<QSeries, CurveError> {
    match p_to_h(n, level) {
        Err(LatticeError::ZeroFunction { .. }) => Ok(QSeries::zero(level, need)),
        Err(e) => Err(e.into()),
        Ok((sign, e)) => {
            let ord = lead_numerator(&e);
            let s = unit_series(sign, &e, need - ord.min(0))?;
            Ok(s.truncate(need))
        }
    }
}

/// `N` times the leading exponent.
fn lead_numerator(e: &ExpVector) -> i64 {
    let x = leading_exponent(e) * BigRational::from_integer(e.level().into());
    i64::try_from(x.to_integer()).expect("small exponent")
}

/// `b`, `c`, `d` and cached `p_n`, all known modulo `q^(prec/N)`.
#[derive(Clone, Debug)]
pub struct CurveExpansion {
    pub level: u32,
    pub prec: i64,
    pub b: QSeries,
    pub c: QSeries,
    pub d: QSeries,
    pcache: BTreeMap<i64, QSeries>,
}

/// `b = -p_2`, `c = p_4 / b^5` and `d = (t h_1)^12`.
pub fn expand_curve(level: u32, prec: i64) -> Result<CurveExpansion, CurveError> {
    if level < 4 {
        return Err(CurveError::BadLevel(level));
    }
    let b = p_series_to(2, level, prec)?.neg();
    check_valuation("b", &b, level)?;
    let c = if (4 % level) == 0 {
        QSeries::zero(level, prec)
    } else {
        // inverting b^5 costs 5 * ord(b) coefficients of precision
        let mut guard = 5 * b.ord() + 1;
        loop {
            let work = prec + guard;
            let bw = p_series_to(2, level, work)?.neg();
            let p4 = p_series_to(4, level, work)?;
            let c = p4.mul(&bw.pow_int(5)?.inv()?);
            if c.prec() >= prec {
                break c.truncate(prec);
            }
            guard += level as i64;
        }
    };
    check_valuation("c", &c, level)?;
    let de = d_to_h(level)?;
    let d = unit_series(1, &de, prec)?.truncate(prec);
    check_valuation("d", &d, level)?;
    Ok(CurveExpansion {
        level,
        prec,
        b,
        c,
        d,
        pcache: BTreeMap::new(),
    })
}

fn check_valuation(name: &str, s: &QSeries, level: u32) -> Result<(), CurveError> {
    if s.ord() < 0 {
        return Err(CurveError::NegativeValuation {
            name: name.into(),
            ord: s.ord(),
            level,
        });
    }
    Ok(())
}

impl CurveExpansion {
    /// The `p_n` series from its Siegel-product form.
    pub fn p(&mut self, n: i64) -> Result<QSeries, CurveError> {
        if let Some(s) = self.pcache.get(&n) {
            return Ok(s.clone());
        }
        let s = p_series_to(n, self.level, self.prec)?;
        self.pcache.insert(n, s.clone());
        Ok(s)
    }

    /// A polynomial in `B, C` evaluated at `(b, c)`.
    pub fn eval(&self, f: &crate::bivar_poly::BivarPoly) -> QSeries {
        f.substitute(&self.b, &self.c).truncate(self.prec)
    }

    /// One integer clearing every denominator of `b` and `c` in the window.
    pub fn denominator_bound(&self) -> num_bigint::BigInt {
        use num_integer::Integer;
        self.b
            .common_denominator()
            .lcm(&self.c.common_denominator())
    }
}

/// One line of a verification report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CheckReport {
    pub check: String,
    #[serde(rename = "N")]
    pub level: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<i64>,
    #[serde(rename = "precN")]
    pub prec: i64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failing_exponent: Option<String>,
}

impl CheckReport {
    fn compare(
        check: &str,
        level: u32,
        n: Option<i64>,
        prec: i64,
        lhs: &QSeries,
        rhs: &QSeries,
    ) -> CheckReport {
        let known = lhs.prec().min(rhs.prec());
        let diff = lhs.first_difference(rhs).filter(|&e| e < prec);
        let fail_at = match diff {
            Some(e) => Some(e),
            None if known < prec => Some(known),
            None => None,
        };
        CheckReport {
            check: check.into(),
            level,
            n,
            prec,
            pass: fail_at.is_none(),
            first_failing_exponent: fail_at
                .map(|e| format_rational(&BigRational::new(e.into(), level.into()))),
        }
    }
}

/// `F_N(b, c) = O(q^(prec/N))`.
pub fn check_defining_equation(
    exp: &CurveExpansion,
    cache: &mut DivPolyCache,
) -> Result<CheckReport, CurveError> {
    let f = cache.f_poly(exp.level as i64)?;
    let lhs = exp.eval(&f);
    let zero = QSeries::zero(exp.level, exp.prec);
    Ok(CheckReport::compare(
        "defining_equation",
        exp.level,
        None,
        exp.prec,
        &lhs,
        &zero,
    ))
}

/// `P_n(b, c)` equals the Siegel-product expansion of `p_n`.
pub fn check_p_consistency(
    exp: &mut CurveExpansion,
    cache: &mut DivPolyCache,
    n: i64,
) -> Result<CheckReport, CurveError> {
    let lhs = exp.eval(&cache.p(n)?);
    let rhs = exp.p(n)?;
    Ok(CheckReport::compare(
        "p_consistency",
        exp.level,
        Some(n),
        exp.prec,
        &lhs,
        &rhs,
    ))
}

/// `D(b, c)` equals the expansion of `(t h_1)^12`.
pub fn check_d_consistency(
    exp: &CurveExpansion,
    cache: &DivPolyCache,
) -> Result<CheckReport, CurveError> {
    let lhs = exp.eval(cache.discriminant());
    Ok(CheckReport::compare(
        "d_consistency",
        exp.level,
        None,
        exp.prec,
        &lhs,
        &exp.d,
    ))
}

/// `p_(m+1) = v p_m` for odd `N` and `p_(m+1) = v p_(m-1)` for even `N`.
pub fn check_v_relation(level: u32, prec: i64) -> Result<CheckReport, CurveError> {
    if level < 4 {
        return Err(CurveError::BadLevel(level));
    }
    let m = (level / 2) as i64;
    let partner = if level % 2 == 1 { m } else { m - 1 };
    let ve = v_to_h(level)?;
    let v_ord = lead_numerator(&ve);
    // v may have a pole; the partner series carries the slack
    let work = prec + (-v_ord).max(0);
    let v = unit_series(1, &ve, work)?;
    let rhs = v.mul(&p_series_to(partner, level, work)?);
    let lhs = p_series_to(m + 1, level, prec)?;
    Ok(CheckReport::compare(
        "v_relation",
        level,
        Some(m + 1),
        prec,
        &lhs,
        &rhs,
    ))
}

/// Defining equation, `d`, the `v` relation and `p_n` for `n = 1..=nmax`.
pub fn verify_level(
    level: u32,
    prec: i64,
    nmax: i64,
    cache: &mut DivPolyCache,
) -> Result<Vec<CheckReport>, CurveError> {
    let mut exp = expand_curve(level, prec)?;
    let mut out = vec![
        check_defining_equation(&exp, cache)?,
        check_d_consistency(&exp, cache)?,
        check_v_relation(level, prec)?,
    ];
    for n in 1..=nmax {
        out.push(check_p_consistency(&mut exp, cache, n)?);
    }
    Ok(out)
}

/// `true` when the series vanishes below its precision and that precision
/// reaches `prec`.
pub fn vanishes_to(s: &QSeries, prec: i64) -> bool {
    s.prec() >= prec && s.ord() >= prec
}
