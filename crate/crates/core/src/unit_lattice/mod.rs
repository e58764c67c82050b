//! Exponent vectors over `h_(k/N,0)`, `k = 1..=N/2`, and the lattice `S` of
//! vectors whose products are functions on `X1(N)`.
//!
//! `e` lies in `S` when its ledger `(sum e(k), sum k^2 e(k))` vanishes
//! modulo `(12, N gcd(N, 2))`.

mod hnf;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use hnf::hermite_normal_form;

use crate::qseries::{QSeries, QSeriesError};
use crate::siegel::{fold_index, h_star, SiegelError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("level {0} is too small")]
    BadLevel(u32),
    #[error("expected {expected} exponents at level {level}, got {got}")]
    BadLength {
        level: u32,
        expected: usize,
        got: usize,
    },
    #[error("p_{n} vanishes identically at level {level}")]
    ZeroFunction { n: i64, level: u32 },
    #[error("index n = {0} must be positive")]
    BadIndex(i64),
    #[error("ledger ({sum1}, {sum2}) is not zero modulo (12, {modulus})")]
    NotInS { sum1: i64, sum2: i64, modulus: i64 },
    #[error("need precision at least {need}, have {have}")]
    InsufficientPrecision { need: i64, have: i64 },
    #[error("series is not a product of Siegel functions: {0}")]
    NotAUnitProduct(String),
    #[error(transparent)]
    Siegel(#[from] SiegelError),
    #[error(transparent)]
    Series(#[from] QSeriesError),
}

/// `e(1), ..., e(m)` at level `N`, `m = floor(N/2)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "ExpVectorJson", into = "ExpVectorJson")]
pub struct ExpVector {
    level: u32,
    e: Vec<i64>,
}

#[derive(Serialize, Deserialize)]
struct ExpVectorJson {
    #[serde(rename = "N")]
    level: u32,
    e: Vec<i64>,
}

impl TryFrom<ExpVectorJson> for ExpVector {
    type Error = LatticeError;
    fn try_from(j: ExpVectorJson) -> Result<Self, LatticeError> {
        ExpVector::new(j.level, j.e)
    }
}

impl From<ExpVector> for ExpVectorJson {
    fn from(v: ExpVector) -> Self {
        ExpVectorJson {
            level: v.level,
            e: v.e,
        }
    }
}

impl ExpVector {
    pub fn new(level: u32, e: Vec<i64>) -> Result<Self, LatticeError> {
        if level < 2 {
            return Err(LatticeError::BadLevel(level));
        }
        let expected = (level / 2) as usize;
        if e.len() != expected {
            return Err(LatticeError::BadLength {
                level,
                expected,
                got: e.len(),
            });
        }
        Ok(ExpVector { level, e })
    }

    pub fn zero(level: u32) -> Self {
        ExpVector {
            level,
            e: vec![0; (level / 2) as usize],
        }
    }

    /// The vector of `h_(k/N,0)` alone.
    pub fn unit(level: u32, k: u32) -> Self {
        let mut v = Self::zero(level);
        v.e[k as usize - 1] = 1;
        v
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn m(&self) -> usize {
        self.e.len()
    }

    pub fn entries(&self) -> &[i64] {
        &self.e
    }

    /// `e(k)` for `1 <= k <= m`.
    pub fn get(&self, k: u32) -> i64 {
        self.e[k as usize - 1]
    }

    /// `(k, e(k))` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (u32, i64)> + '_ {
        self.e.iter().enumerate().map(|(i, &x)| (i as u32 + 1, x))
    }

    pub fn is_zero(&self) -> bool {
        self.e.iter().all(|&x| x == 0)
    }

    fn zip_with(&self, other: &ExpVector, f: impl Fn(i64, i64) -> i64) -> ExpVector {
        assert_eq!(
            self.level, other.level,
            "exponent vectors at different levels"
        );
        ExpVector {
            level: self.level,
            e: self
                .e
                .iter()
                .zip(&other.e)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn add(&self, other: &ExpVector) -> ExpVector {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &ExpVector) -> ExpVector {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn neg(&self) -> ExpVector {
        self.scale(-1)
    }

    pub fn scale(&self, k: i64) -> ExpVector {
        ExpVector {
            level: self.level,
            e: self.e.iter().map(|&x| k * x).collect(),
        }
    }

    /// `(sum e(k), sum k^2 e(k))`.
    pub fn ledger(&self) -> (i64, i64) {
        self.iter().fold((0, 0), |(s1, s2), (k, x)| {
            (s1 + x, s2 + (k as i64).pow(2) * x)
        })
    }
}

impl fmt::Display for ExpVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.e.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// `N gcd(N, 2)`.
pub fn second_modulus(level: u32) -> i64 {
    let n = level as i64;
    n * n.gcd(&2)
}

pub fn is_in_s(e: &ExpVector) -> bool {
    let (s1, s2) = e.ledger();
    s1.rem_euclid(12) == 0 && s2.rem_euclid(second_modulus(e.level)) == 0
}

/// A canonical basis of `S` and its index in `Z^m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SBasis {
    #[serde(rename = "N")]
    pub level: u32,
    pub vectors: Vec<ExpVector>,
    #[serde(serialize_with = "as_decimal")]
    pub index: BigInt,
}

fn as_decimal<S: serde::Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// Hermite-normal-form basis of `S`.
///
/// Rows `(1, k^2 | unit_k)` together with `(12, 0 | 0)` and `(0, N gcd(N,2) | 0)`
/// span a lattice whose rows vanishing on the first two columns are exactly
/// `0 + S`.
pub fn basis_s(level: u32) -> Result<SBasis, LatticeError> {
    if level < 4 {
        return Err(LatticeError::BadLevel(level));
    }
    let m = (level / 2) as usize;
    let width = m + 2;
    let mut rows = Vec::with_capacity(m + 2);
    for k in 1..=m {
        let mut row = vec![BigInt::zero(); width];
        row[0] = BigInt::one();
        row[1] = BigInt::from(k * k);
        row[k + 1] = BigInt::one();
        rows.push(row);
    }
    let mut r12 = vec![BigInt::zero(); width];
    r12[0] = 12.into();
    rows.push(r12);
    let mut rn = vec![BigInt::zero(); width];
    rn[1] = second_modulus(level).into();
    rows.push(rn);

    let echelon = hermite_normal_form(rows);
    let kernel: Vec<Vec<BigInt>> = echelon
        .into_iter()
        .filter(|r| r[0].is_zero() && r[1].is_zero())
        .map(|r| r[2..].to_vec())
        .collect();
    let canon = hermite_normal_form(kernel);
    let index = (0..canon.len()).fold(BigInt::one(), |acc, i| acc * &canon[i][i]);
    let vectors = canon
        .into_iter()
        .map(|r| {
            let e = r
                .into_iter()
                .map(|x| i64::try_from(x).expect("basis entries are bounded by the index"))
                .collect();
            ExpVector::new(level, e)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SBasis {
        level,
        vectors,
        index,
    })
}

fn check_level(level: u32) -> Result<(), LatticeError> {
    if level < 4 {
        return Err(LatticeError::BadLevel(level));
    }
    Ok(())
}

fn folded_unit(n: i64, level: u32) -> Result<(i8, ExpVector), LatticeError> {
    let (k, sign) = fold_index(n, level)?;
    Ok((sign, ExpVector::unit(level, k)))
}

/// `t = h_1^2 h_3 / h_2^3`, indices folded into `1..=m`.
pub fn t_to_h(level: u32) -> Result<ExpVector, LatticeError> {
    check_level(level)?;
    let mut acc = ExpVector::zero(level);
    for (n, mult) in [(1, 2), (2, -3), (3, 1)] {
        let (sign, u) = folded_unit(n, level)?;
        debug_assert_eq!(sign, 1, "t's indices fold without sign for N >= 4");
        acc = acc.add(&u.scale(mult));
    }
    Ok(acc)
}

/// `d = (t h_1)^12`.
pub fn d_to_h(level: u32) -> Result<ExpVector, LatticeError> {
    let t = t_to_h(level)?;
    Ok(t.add(&ExpVector::unit(level, 1)).scale(12))
}

/// `v = t^(gcd(2, N) N)`.
pub fn v_to_h(level: u32) -> Result<ExpVector, LatticeError> {
    Ok(t_to_h(level)?.scale(second_modulus(level)))
}

/// `p_n = sign * t^(n^2 - 1) h_n / h_1` with `h_n` folded.
pub fn p_to_h(n: i64, level: u32) -> Result<(i8, ExpVector), LatticeError> {
    check_level(level)?;
    if n < 1 {
        return Err(LatticeError::BadIndex(n));
    }
    if n % level as i64 == 0 {
        return Err(LatticeError::ZeroFunction { n, level });
    }
    let (sign, hn) = folded_unit(n, level)?;
    let e = t_to_h(level)?
        .scale(n * n - 1)
        .add(&hn)
        .sub(&ExpVector::unit(level, 1));
    Ok((sign, e))
}

/// `f = d^alpha (p_(N-m-1) / p_(m+1))^beta prod_k p_k^pexp(k)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PExpression {
    #[serde(rename = "N")]
    pub level: u32,
    pub alpha: i64,
    pub beta: i64,
    pub pexp: Vec<i64>,
}

pub fn to_p_expression(e: &ExpVector) -> Result<PExpression, LatticeError> {
    let (s1, s2) = e.ledger();
    let modulus = second_modulus(e.level);
    if !is_in_s(e) {
        return Err(LatticeError::NotInS {
            sum1: s1,
            sum2: s2,
            modulus,
        });
    }
    Ok(PExpression {
        level: e.level,
        alpha: s1 / 12,
        beta: s2 / modulus,
        pexp: e.e.clone(),
    })
}

impl PExpression {
    /// Rewrites every `d` and `p_n` through their Siegel exponents.
    /// Returns the collected sign and the exponent vector.
    pub fn expand(&self) -> Result<(i8, ExpVector), LatticeError> {
        let level = self.level;
        let m = (level / 2) as i64;
        let mut sign = 1i8;
        let mut acc = d_to_h(level)?.scale(self.alpha);
        let mut add_p = |n: i64, k: i64, acc: &mut ExpVector| -> Result<(), LatticeError> {
            if k == 0 {
                return Ok(());
            }
            let (s, v) = p_to_h(n, level)?;
            if s < 0 && k % 2 != 0 {
                sign = -sign;
            }
            *acc = acc.add(&v.scale(k));
            Ok(())
        };
        add_p(level as i64 - m - 1, self.beta, &mut acc)?;
        add_p(m + 1, -self.beta, &mut acc)?;
        for (i, &k) in self.pexp.iter().enumerate() {
            add_p(i as i64 + 1, k, &mut acc)?;
        }
        Ok((sign, acc))
    }
}

/// Recovers `e` from the reduced form of `prod_k h_(k/N,0)^e(k)`.
///
/// Peels off one `h*` per `k` by reading the coefficient of `q^(k/N)`, then
/// requires the remainder to be exactly `1` on the whole known window.
pub fn decompose_series(fstar: &QSeries, level: u32) -> Result<ExpVector, LatticeError> {
    check_level(level)?;
    if fstar.denom() != level {
        return Err(LatticeError::Series(QSeriesError::LevelMismatch(
            fstar.denom(),
            level,
        )));
    }
    let m = (level / 2) as i64;
    if fstar.prec() < m + 1 {
        return Err(LatticeError::InsufficientPrecision {
            need: m + 1,
            have: fstar.prec(),
        });
    }
    if fstar.ord() != 0 || fstar.lead() != Some(&BigRational::one()) {
        return Err(LatticeError::NotAUnitProduct(
            "constant term is not 1".into(),
        ));
    }
    let prec = fstar.prec();
    let mut work = fstar.clone();
    let mut e = vec![0i64; m as usize];
    for k in 1..=m {
        let c = work.coeff(k).expect("k is below the precision");
        if !c.is_integer() {
            return Err(LatticeError::NotAUnitProduct(format!(
                "coefficient {c} of q^({k}/{level}) is not an integer"
            )));
        }
        let c = c.to_integer();
        let c = if 2 * k == level as i64 {
            let (q, r) = c.div_rem(&BigInt::from(2));
            if !r.is_zero() {
                return Err(LatticeError::NotAUnitProduct(format!(
                    "coefficient {c} of q^(1/2) is odd"
                )));
            }
            q
        } else {
            c
        };
        let ek = i64::try_from(-c)
            .map_err(|_| LatticeError::NotAUnitProduct("exponent out of range".into()))?;
        e[k as usize - 1] = ek;
        if ek != 0 {
            let h = h_star(k, level, prec)?;
            work = work.mul(&h.pow_int(-ek)?);
        }
    }
    if let Some(bad) = work.first_difference(&QSeries::one(level, prec)) {
        return Err(LatticeError::NotAUnitProduct(format!(
            "residual differs from 1 at q^({bad}/{level})"
        )));
    }
    ExpVector::new(level, e)
}

/// `(1 / 12N^2) sum_k e(k) (6k^2 - 6kN + N^2)`, the leading `q`-exponent of
/// `prod_k h_(k/N,0)^e(k)`.
pub fn leading_exponent(e: &ExpVector) -> BigRational {
    let n = e.level as i64;
    let total: i64 = e
        .iter()
        .map(|(k, x)| {
            let k = k as i64;
            x * (6 * k * k - 6 * k * n + n * n)
        })
        .sum();
    BigRational::new(total.into(), (12 * n * n).into())
}

/// Whether [`leading_exponent`] lies in `(1/N)Z`.
pub fn leading_exponent_check(e: &ExpVector) -> bool {
    (leading_exponent(e) * BigRational::from_integer(e.level.into())).is_integer()
}

/// Uniform sample from `S` restricted to the box `[-bound, bound]^m`.
pub fn random_member<R: Rng + ?Sized>(level: u32, bound: i64, rng: &mut R) -> ExpVector {
    let m = (level / 2) as usize;
    loop {
        let e = (0..m).map(|_| rng.gen_range(-bound..=bound)).collect();
        let v = ExpVector { level, e };
        if is_in_s(&v) {
            return v;
        }
    }
}
