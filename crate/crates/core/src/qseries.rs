//! Truncated Puiseux series in `q^(1/N)` with exact rational coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::bivar_poly::Substitute;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QSeriesError {
    #[error("series is zero to its known precision")]
    ZeroSeries,
    #[error("exponent denominators differ: {0} vs {1}")]
    LevelMismatch(u32, u32),
    #[error("cannot rescale denominator {from} to {to}")]
    BadRescale { from: u32, to: u32 },
    #[error("invalid series: {0}")]
    Invalid(String),
}

/// `sum_j coeffs[j] q^((ord + j)/denom) + O(q^(prec/denom))`.
///
/// Always `ord + coeffs.len() == prec`, and `coeffs[0] != 0` unless the
/// series is zero to its precision, in which case `coeffs` is empty.
#[derive(Clone, PartialEq, Eq)]
pub struct QSeries {
    denom: u32,
    ord: i64,
    coeffs: Vec<BigRational>,
    prec: i64,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl QSeries {
    /// Builds a series from coefficients starting at `q^(start/denom)`.
    /// Coefficients at or beyond `prec` are dropped; missing ones are zero.
    pub fn new(denom: u32, start: i64, coeffs: Vec<BigRational>, prec: i64) -> Self {
        assert!(denom > 0, "exponent denominator must be positive");
        let mut s = QSeries {
            denom,
            ord: start,
            coeffs,
            prec,
        };
        s.normalize();
        s
    }

    pub fn from_ints(denom: u32, start: i64, coeffs: &[i64], prec: i64) -> Self {
        Self::new(denom, start, coeffs.iter().map(|&c| rat(c)).collect(), prec)
    }

    pub fn from_bigints(denom: u32, start: i64, coeffs: Vec<BigInt>, prec: i64) -> Self {
        Self::new(
            denom,
            start,
            coeffs.into_iter().map(BigRational::from_integer).collect(),
            prec,
        )
    }

    pub fn zero(denom: u32, prec: i64) -> Self {
        Self::new(denom, prec, Vec::new(), prec)
    }

    pub fn one(denom: u32, prec: i64) -> Self {
        Self::monomial(denom, BigRational::one(), 0, prec)
    }

    /// `c q^(exp/denom) + O(q^(prec/denom))`.
    pub fn monomial(denom: u32, c: BigRational, exp: i64, prec: i64) -> Self {
        Self::new(denom, exp, vec![c], prec)
    }

    fn normalize(&mut self) {
        let lead_zeros = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead_zeros == self.coeffs.len() {
            self.coeffs.clear();
            self.ord = self.prec;
            return;
        }
        if lead_zeros > 0 {
            self.coeffs.drain(..lead_zeros);
            self.ord += lead_zeros as i64;
        }
        if self.ord >= self.prec {
            self.coeffs.clear();
            self.ord = self.prec;
            return;
        }
        let len = (self.prec - self.ord) as usize;
        self.coeffs.resize(len, BigRational::zero());
    }

    pub fn denom(&self) -> u32 {
        self.denom
    }

    /// Numerator of the lowest known exponent (equals `prec` for a zero series).
    pub fn ord(&self) -> i64 {
        self.ord
    }

    pub fn prec(&self) -> i64 {
        self.prec
    }

    /// Number of known coefficients from the leading term on.
    pub fn relative_prec(&self) -> i64 {
        self.prec - self.ord
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `q^(e/denom)`, or `None` past the precision.
    pub fn coeff(&self, e: i64) -> Option<BigRational> {
        if e >= self.prec {
            return None;
        }
        if e < self.ord {
            return Some(BigRational::zero());
        }
        Some(self.coeffs[(e - self.ord) as usize].clone())
    }

    pub fn lead(&self) -> Option<&BigRational> {
        self.coeffs.first()
    }

    /// Lowest exponent as a rational number.
    pub fn lead_exp(&self) -> BigRational {
        BigRational::new(self.ord.into(), self.denom.into())
    }

    fn check_level(&self, other: &QSeries) {
        assert_eq!(
            self.denom, other.denom,
            "series at different levels must be rescaled first"
        );
    }

    pub fn neg(&self) -> QSeries {
        QSeries {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
            ..self.clone()
        }
    }

    /// Panics if the levels differ.
    pub fn add(&self, other: &QSeries) -> QSeries {
        self.check_level(other);
        let prec = self.prec.min(other.prec);
        let start = self.ord.min(other.ord).min(prec);
        let len = (prec - start) as usize;
        let mut out = vec![BigRational::zero(); len];
        for s in [self, other] {
            for (j, c) in s.coeffs.iter().enumerate() {
                let e = s.ord + j as i64;
                if e >= prec {
                    break;
                }
                out[(e - start) as usize] += c;
            }
        }
        QSeries::new(self.denom, start, out, prec)
    }

    pub fn sub(&self, other: &QSeries) -> QSeries {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &BigRational) -> QSeries {
        QSeries::new(
            self.denom,
            self.ord,
            self.coeffs.iter().map(|c| c * k).collect(),
            self.prec,
        )
    }

    /// Multiplies by `q^(k/denom)`.
    pub fn shift(&self, k: i64) -> QSeries {
        QSeries {
            ord: self.ord + k,
            prec: self.prec + k,
            ..self.clone()
        }
    }

    /// Drops everything from `q^(prec/denom)` on (never raises precision).
    pub fn truncate(&self, prec: i64) -> QSeries {
        QSeries::new(
            self.denom,
            self.ord,
            self.coeffs.clone(),
            prec.min(self.prec),
        )
    }

    /// Panics if the levels differ.
    pub fn mul(&self, other: &QSeries) -> QSeries {
        self.check_level(other);
        let prec = (self.prec + other.ord).min(other.prec + self.ord);
        let ord = self.ord + other.ord;
        if self.is_zero() || other.is_zero() {
            return QSeries::zero(self.denom, prec);
        }
        let len = (prec - ord) as usize;
        let (fa, da) = integer_parts(&self.coeffs[..len]);
        let (ga, db) = integer_parts(&other.coeffs[..len]);
        let prod = convolve(&fa, &ga, len);
        let den = da * db;
        let coeffs = prod
            .into_iter()
            .map(|c| BigRational::new(c, den.clone()))
            .collect();
        QSeries::new(self.denom, ord, coeffs, prec)
    }

    /// Multiplicative inverse, keeping the relative precision.
    pub fn inv(&self) -> Result<QSeries, QSeriesError> {
        let Some(c0) = self.lead() else {
            return Err(QSeriesError::ZeroSeries);
        };
        let len = self.coeffs.len();
        let ord = -self.ord;
        let prec = ord + len as i64;
        let integral_unit = c0.is_integer() && c0.numer().abs().is_one() && self.is_integral();
        let coeffs = if integral_unit {
            let unit = c0.numer().clone();
            let f: Vec<BigInt> = self.coeffs.iter().map(|c| c.numer().clone()).collect();
            let mut g: Vec<BigInt> = Vec::with_capacity(len);
            g.push(unit.clone());
            for j in 1..len {
                let mut acc = BigInt::zero();
                for i in 1..=j {
                    if !f[i].is_zero() {
                        acc += &f[i] * &g[j - i];
                    }
                }
                g.push(-(acc * &unit));
            }
            g.into_iter().map(BigRational::from_integer).collect()
        } else {
            let inv0 = c0.recip();
            let mut g: Vec<BigRational> = Vec::with_capacity(len);
            g.push(inv0.clone());
            for j in 1..len {
                let mut acc = BigRational::zero();
                for i in 1..=j {
                    if !self.coeffs[i].is_zero() {
                        acc += &self.coeffs[i] * &g[j - i];
                    }
                }
                g.push(-(acc * &inv0));
            }
            g
        };
        Ok(QSeries::new(self.denom, ord, coeffs, prec))
    }

    /// `self^e` by binary powering; negative `e` goes through [`QSeries::inv`].
    pub fn pow_int(&self, e: i64) -> Result<QSeries, QSeriesError> {
        if e == 0 {
            return Ok(QSeries::one(self.denom, self.relative_prec()));
        }
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut k = e.unsigned_abs();
        let mut acc: Option<QSeries> = None;
        let mut sq = base;
        loop {
            if k & 1 == 1 {
                acc = Some(match acc {
                    None => sq.clone(),
                    Some(a) => a.mul(&sq),
                });
            }
            k >>= 1;
            if k == 0 {
                break;
            }
            sq = sq.mul(&sq);
        }
        Ok(acc.expect("exponent is nonzero"))
    }

    /// Re-expresses the series over `q^(1/m)`; requires `denom | m`.
    pub fn rescale(&self, m: u32) -> Result<QSeries, QSeriesError> {
        if m == 0 || !m.is_multiple_of(self.denom) {
            return Err(QSeriesError::BadRescale {
                from: self.denom,
                to: m,
            });
        }
        let s = (m / self.denom) as i64;
        let mut coeffs = vec![BigRational::zero(); self.coeffs.len() * s as usize];
        for (j, c) in self.coeffs.iter().enumerate() {
            coeffs[j * s as usize] = c.clone();
        }
        Ok(QSeries::new(m, self.ord * s, coeffs, self.prec * s))
    }

    /// `(lead, leadExp, f*)` with `self = lead * q^leadExp * f*` and `f*(0) = 1`.
    pub fn reduced_form(&self) -> Result<(BigRational, BigRational, QSeries), QSeriesError> {
        let Some(lead) = self.lead().cloned() else {
            return Err(QSeriesError::ZeroSeries);
        };
        let inv = lead.recip();
        let coeffs = self.coeffs.iter().map(|c| c * &inv).collect();
        let fstar = QSeries::new(self.denom, 0, coeffs, self.relative_prec());
        Ok((lead, self.lead_exp(), fstar))
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    /// Integral with coprime coefficients, judged on the known window only.
    pub fn is_primitive(&self) -> bool {
        if self.is_zero() || !self.is_integral() {
            return false;
        }
        let mut g = BigInt::zero();
        for c in &self.coeffs {
            g = g.gcd(c.numer());
            if g.is_one() {
                return true;
            }
        }
        false
    }

    /// Smallest positive integer clearing every known denominator.
    pub fn common_denominator(&self) -> BigInt {
        self.coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }

    /// First exponent numerator where the two series differ below their
    /// common precision, or `None` if they agree there.
    pub fn first_difference(&self, other: &QSeries) -> Option<i64> {
        self.check_level(other);
        let prec = self.prec.min(other.prec);
        let start = self.ord.min(other.ord);
        (start..prec).find(|&e| self.coeff(e) != other.coeff(e))
    }

    pub fn agrees_with(&self, other: &QSeries) -> bool {
        self.first_difference(other).is_none()
    }

    pub fn render(&self) -> String {
        let mut terms = Vec::new();
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = BigRational::new((self.ord + j as i64).into(), self.denom.into());
            let neg = c.is_negative();
            let a = c.abs();
            let body = match (e.is_zero(), a.is_one()) {
                (true, _) => a.to_string(),
                (false, true) => q_power(&e),
                (false, false) => format!("{}*{}", a, q_power(&e)),
            };
            terms.push((neg, body));
        }
        let big_o = format!(
            "O({})",
            q_power(&BigRational::new(self.prec.into(), self.denom.into()))
        );
        let mut out = String::new();
        for (i, (neg, body)) in terms.iter().enumerate() {
            match (i, neg) {
                (0, true) => out.push('-'),
                (0, false) => {}
                (_, true) => out.push_str(" - "),
                (_, false) => out.push_str(" + "),
            }
            out.push_str(body);
        }
        if out.is_empty() {
            big_o
        } else {
            format!("{out} + {big_o}")
        }
    }
}

fn q_power(e: &BigRational) -> String {
    if e.is_zero() {
        "1".into()
    } else if e.is_one() {
        "q".into()
    } else if e.is_integer() {
        format!("q^{e}")
    } else {
        format!("q^({e})")
    }
}

/// Integer numerators over a common denominator.
fn integer_parts(cs: &[BigRational]) -> (Vec<BigInt>, BigInt) {
    let den = cs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let nums = if den.is_one() {
        cs.iter().map(|c| c.numer().clone()).collect()
    } else {
        cs.iter().map(|c| c.numer() * (&den / c.denom())).collect()
    };
    (nums, den)
}

fn convolve(a: &[BigInt], b: &[BigInt], len: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl fmt::Debug for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QSeries[N={}]({})", self.denom, self.render())
    }
}

impl<'a> Add<&'a QSeries> for &'a QSeries {
    type Output = QSeries;
    fn add(self, rhs: &QSeries) -> QSeries {
        QSeries::add(self, rhs)
    }
}

impl<'a> Sub<&'a QSeries> for &'a QSeries {
    type Output = QSeries;
    fn sub(self, rhs: &QSeries) -> QSeries {
        QSeries::sub(self, rhs)
    }
}

impl<'a> Mul<&'a QSeries> for &'a QSeries {
    type Output = QSeries;
    fn mul(self, rhs: &QSeries) -> QSeries {
        QSeries::mul(self, rhs)
    }
}

impl Neg for &QSeries {
    type Output = QSeries;
    fn neg(self) -> QSeries {
        QSeries::neg(self)
    }
}

impl Substitute for QSeries {
    fn one_like(&self) -> Self {
        QSeries::one(self.denom, self.prec.max(0))
    }
    fn zero_like(&self) -> Self {
        QSeries::zero(self.denom, self.prec.max(0))
    }
    fn add(&self, other: &Self) -> Self {
        QSeries::add(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        QSeries::mul(self, other)
    }
    fn scale_int(&self, k: &BigInt) -> Self {
        self.scale(&BigRational::from_integer(k.clone()))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct QSeriesJson {
    #[serde(rename = "denomN")]
    denom_n: u32,
    ord: i64,
    #[serde(rename = "precN")]
    prec_n: i64,
    coeffs: Vec<String>,
}

/// Parses `"num/den"` or `"num"`.
pub fn parse_rational(s: &str) -> Result<BigRational, QSeriesError> {
    let bad = || QSeriesError::Invalid(format!("bad rational {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

/// Always `"num/den"`, even for integers.
pub fn format_rational(c: &BigRational) -> String {
    format!("{}/{}", c.numer(), c.denom())
}

impl TryFrom<QSeriesJson> for QSeries {
    type Error = QSeriesError;
    fn try_from(j: QSeriesJson) -> Result<Self, QSeriesError> {
        if j.denom_n == 0 {
            return Err(QSeriesError::Invalid("denomN must be positive".into()));
        }
        if j.ord + j.coeffs.len() as i64 != j.prec_n {
            return Err(QSeriesError::Invalid(
                "ord plus coefficient count must equal precN".into(),
            ));
        }
        let coeffs = j
            .coeffs
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(QSeries::new(j.denom_n, j.ord, coeffs, j.prec_n))
    }
}

impl Serialize for QSeries {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        QSeriesJson {
            denom_n: self.denom,
            ord: self.ord,
            prec_n: self.prec,
            coeffs: self.coeffs.iter().map(format_rational).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for QSeries {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = QSeriesJson::deserialize(d)?;
        QSeries::try_from(j).map_err(serde::de::Error::custom)
    }
}
