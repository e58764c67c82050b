//! Siegel functions `h_(k/N, 0)` through their product expansion.
//!
//! With `x = q^(1/N)`,
//! `h_(k/N,0) = i q^w (1 - x^k) prod_{n>=1} (1 - x^(nN+k)) (1 - x^(nN-k))`
//! where `w = ((k/N)^2 - k/N + 1/6) / 2`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::qseries::{format_rational, QSeries, QSeriesError};
use crate::unit_lattice::ExpVector;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SiegelError {
    #[error("index k = {k} is outside 1..={max} at level {level}")]
    BadIndex { k: i64, level: u32, max: u32 },
    #[error("level {0} is too small")]
    BadLevel(u32),
    #[error("{n} is divisible by the level {level}")]
    ZeroIndex { n: i64, level: u32 },
    #[error("scalar i^{0} is not rational")]
    PhaseNotRational(u8),
    #[error("leading exponent {0} is not a multiple of 1/{1}")]
    ExponentOffLevel(String, u32),
    #[error("products at different levels: {0} vs {1}")]
    LevelMismatch(u32, u32),
    #[error(transparent)]
    Series(#[from] QSeriesError),
}

fn check_index(k: i64, level: u32) -> Result<(), SiegelError> {
    if level < 2 {
        return Err(SiegelError::BadLevel(level));
    }
    let max = level / 2;
    if k < 1 || k > max as i64 {
        return Err(SiegelError::BadIndex { k, level, max });
    }
    Ok(())
}

/// `((k/N)^2 - k/N + 1/6) / 2`.
pub fn lead_exponent(k: i64, level: u32) -> Result<BigRational, SiegelError> {
    check_index(k, level)?;
    let a = BigRational::new(k.into(), level.into());
    let sixth = BigRational::new(1.into(), 6.into());
    Ok((&a * &a - &a + sixth) / BigRational::from_integer(2.into()))
}

/// How many factors `1 - x^j` appear in `h*_(k/N)`.
fn multiplicity(k: u32, level: u32, j: i64) -> i64 {
    let r = j.rem_euclid(level as i64);
    let k = k as i64;
    let n = level as i64;
    (r == k % n) as i64 + (r == (n - k) % n) as i64
}

/// Reduced series `h*_(k/N,0)`, exact modulo `q^(prec/N)`.
pub fn h_star(k: i64, level: u32, prec: i64) -> Result<QSeries, SiegelError> {
    check_index(k, level)?;
    let len = prec.max(0) as usize;
    let mut a = vec![BigInt::zero(); len];
    if len > 0 {
        a[0] = BigInt::one();
    }
    let n = level as usize;
    let k = k as usize;
    let mut factors = vec![k];
    let mut step = 1;
    while step * n < len + k {
        factors.push(step * n + k);
        factors.push(step * n - k);
        step += 1;
    }
    for j in factors {
        if j >= len {
            continue;
        }
        for i in (j..len).rev() {
            let prev = a[i - j].clone();
            a[i] -= prev;
        }
    }
    Ok(QSeries::from_bigints(level, 0, a, prec.max(0)))
}

/// `h_(n/N,0) = sign * h_(k/N,0)` with `1 <= k <= N/2`.
pub fn fold_index(n: i64, level: u32) -> Result<(u32, i8), SiegelError> {
    if level < 2 {
        return Err(SiegelError::BadLevel(level));
    }
    let big = level as i64;
    let r = n.rem_euclid(big);
    if r == 0 {
        return Err(SiegelError::ZeroIndex { n, level });
    }
    let periods = (n - r) / big;
    let sign = if periods.rem_euclid(2) == 0 { 1 } else { -1 };
    let k = if 2 * r <= big { r } else { big - r };
    Ok((k as u32, sign))
}

/// `scalar * i^ipow * q^leadExp * fstar`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SiegelProduct {
    pub level: u32,
    pub ipow: u8,
    pub scalar: BigRational,
    pub lead_exp: BigRational,
    pub fstar: QSeries,
    pub evec: Option<ExpVector>,
}

impl SiegelProduct {
    pub fn mul(&self, other: &SiegelProduct) -> Result<SiegelProduct, SiegelError> {
        if self.level != other.level {
            return Err(SiegelError::LevelMismatch(self.level, other.level));
        }
        let evec = match (&self.evec, &other.evec) {
            (Some(a), Some(b)) => Some(a.add(b)),
            _ => None,
        };
        Ok(SiegelProduct {
            level: self.level,
            ipow: (self.ipow + other.ipow) % 4,
            scalar: &self.scalar * &other.scalar,
            lead_exp: &self.lead_exp + &other.lead_exp,
            fstar: self.fstar.mul(&other.fstar),
            evec,
        })
    }

    /// Multiplies the rational scalar by `k`.
    pub fn scaled(mut self, k: &BigRational) -> SiegelProduct {
        self.scalar *= k;
        self
    }

    /// The expansion as a series over `q^(1/N)`; needs an even phase and a
    /// leading exponent in `(1/N)Z`.
    pub fn to_rational_series(&self) -> Result<QSeries, SiegelError> {
        let sign = match self.ipow {
            0 => BigRational::one(),
            2 => -BigRational::one(),
            odd => return Err(SiegelError::PhaseNotRational(odd)),
        };
        let shifted = &self.lead_exp * BigRational::from_integer(self.level.into());
        if !shifted.is_integer() {
            return Err(SiegelError::ExponentOffLevel(
                self.lead_exp.to_string(),
                self.level,
            ));
        }
        let shift: i64 = shifted
            .to_integer()
            .try_into()
            .map_err(|_| SiegelError::ExponentOffLevel(self.lead_exp.to_string(), self.level))?;
        Ok(self.fstar.scale(&(&self.scalar * sign)).shift(shift))
    }
}

impl Serialize for SiegelProduct {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("SiegelProduct", 4)?;
        st.serialize_field("ipow", &self.ipow)?;
        st.serialize_field("scalar", &format_rational(&self.scalar))?;
        st.serialize_field("leadExp", &format_rational(&self.lead_exp))?;
        st.serialize_field("fstar", &self.fstar)?;
        st.end()
    }
}

/// `prod_k h_(k/N,0)^e(k)` with `fstar` known modulo `q^(prec/N)`.
pub fn product_series(e: &ExpVector, prec: i64) -> Result<SiegelProduct, SiegelError> {
    let level = e.level();
    let len = prec.max(0) as usize;
    let mut lead_exp = BigRational::zero();
    let mut ipow = 0i64;
    for (k, ek) in e.iter() {
        if ek != 0 {
            lead_exp += lead_exponent(k as i64, level)? * BigRational::from_integer(ek.into());
            ipow += ek;
        }
    }
    let mut a = vec![BigInt::zero(); len];
    if len > 0 {
        a[0] = BigInt::one();
    }
    for j in 1..len {
        let power: i64 = e
            .iter()
            .map(|(k, ek)| ek * multiplicity(k, level, j as i64))
            .sum();
        if power != 0 {
            mul_binomial(&mut a, j, power);
        }
    }
    Ok(SiegelProduct {
        level,
        ipow: ipow.rem_euclid(4) as u8,
        scalar: BigRational::one(),
        lead_exp,
        fstar: QSeries::from_bigints(level, 0, a, prec.max(0)),
        evec: Some(e.clone()),
    })
}

/// `a *= (1 - x^j)^power` in place, truncated to `a.len()`.
fn mul_binomial(a: &mut [BigInt], j: usize, power: i64) {
    let len = a.len();
    let terms = (len - 1) / j;
    // c_i = (-1)^i binom(power, i), valid for negative powers too
    let mut c = Vec::with_capacity(terms + 1);
    c.push(BigInt::one());
    for i in 1..=terms {
        let prev: &BigInt = &c[i - 1];
        let next = -(prev * BigInt::from(power - i as i64 + 1)) / BigInt::from(i);
        c.push(next);
    }
    for t in (j..len).rev() {
        let mut acc = a[t].clone();
        for (i, ci) in c.iter().enumerate().skip(1) {
            let Some(src) = t.checked_sub(i * j) else {
                break;
            };
            if !ci.is_zero() && !a[src].is_zero() {
                acc += ci * &a[src];
            }
        }
        a[t] = acc;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    /// Truncated product of `1 - x^j` over the listed exponents, by
    /// schoolbook polynomial multiplication.
    fn brute(exps: &[usize], len: usize) -> Vec<i64> {
        let mut acc = vec![0i64; len];
        acc[0] = 1;
        for &j in exps {
            let mut next = acc.clone();
            for i in 0..len {
                if i + j < len {
                    next[i + j] -= acc[i];
                }
            }
            acc = next;
        }
        acc
    }

    fn ints(f: &QSeries) -> Vec<i64> {
        (0..f.prec())
            .map(|e| f.coeff(e).unwrap().to_integer().try_into().unwrap())
            .collect()
    }

    #[test]
    fn lead_exponents() {
        assert_eq!(lead_exponent(1, 7).unwrap(), r(13, 588));
        assert_eq!(lead_exponent(3, 6).unwrap(), r(-1, 24));
        assert_eq!(lead_exponent(1, 6).unwrap(), r(1, 72));
        assert!(lead_exponent(4, 7).is_err());
    }

    #[test]
    fn h_star_examples() {
        assert_eq!(ints(&h_star(2, 5, 7).unwrap()), vec![1, 0, -1, -1, 0, 1, 0]);
        assert_eq!(ints(&h_star(2, 5, 7).unwrap()), brute(&[2, 3, 7], 7));
        let h15 = h_star(1, 5, 4).unwrap();
        assert_eq!(ints(&h15), vec![1, -1, 0, 0]);
        let half = h_star(3, 6, 9).unwrap();
        assert_eq!(half.coeff(3), Some(r(-2, 1)));
        assert_eq!(half.coeff(1), Some(r(0, 1)));
        assert_eq!(ints(&h_star(1, 2, 6).unwrap()), vec![1, -2, 1, -2, 4, -4]);
        assert!(matches!(h_star(0, 5, 4), Err(SiegelError::BadIndex { .. })));
    }

    #[test]
    fn h_star_matches_brute_force() {
        for level in 4..=13u32 {
            for k in 1..=level / 2 {
                let len = 4 * level as usize;
                let mut exps = vec![k as usize];
                for n in 1..=5 {
                    exps.push(n * level as usize + k as usize);
                    exps.push(n * level as usize - k as usize);
                }
                assert_eq!(
                    ints(&h_star(k as i64, level, len as i64).unwrap()),
                    brute(&exps, len),
                    "k = {k}, N = {level}"
                );
            }
        }
    }

    #[test]
    fn product_of_two() {
        let p = h_star(1, 5, 6).unwrap().mul(&h_star(2, 5, 6).unwrap());
        assert_eq!(ints(&p), vec![1, -1, -1, 0, 0, 2]);
        let e = ExpVector::new(5, vec![1, 1]).unwrap();
        assert_eq!(product_series(&e, 6).unwrap().fstar, p);
    }

    #[test]
    fn folding() {
        assert_eq!(fold_index(6, 7).unwrap(), (1, 1));
        assert_eq!(fold_index(8, 7).unwrap(), (1, -1));
        assert_eq!(fold_index(4, 7).unwrap(), (3, 1));
        assert_eq!(fold_index(-1, 7).unwrap(), (1, -1));
        for m in 2..10 {
            assert_eq!(fold_index(m + 1, 2 * m as u32 + 1).unwrap(), (m as u32, 1));
        }
        assert_eq!(
            fold_index(14, 7),
            Err(SiegelError::ZeroIndex { n: 14, level: 7 })
        );
    }

    #[test]
    fn product_examples() {
        let zero = ExpVector::zero(7);
        let p = product_series(&zero, 10).unwrap();
        assert_eq!((p.ipow, p.lead_exp.clone()), (0, r(0, 1)));
        assert_eq!(p.fstar, QSeries::one(7, 10));

        let t = ExpVector::new(7, vec![2, -3, 1]).unwrap();
        let pt = product_series(&t, 10).unwrap();
        let w = |k| lead_exponent(k, 7).unwrap();
        assert_eq!(pt.lead_exp, w(1) * r(2, 1) - w(2) * r(3, 1) + w(3));
        assert_eq!(pt.ipow, 0);

        let d = ExpVector::new(7, vec![36, -36, 12]).unwrap();
        let pd = product_series(&d, 40).unwrap();
        assert_eq!(pd.ipow, 0);
        assert!(pd.fstar.is_integral());
        assert!(pd.to_rational_series().is_ok());

        let odd = product_series(&ExpVector::unit(7, 1), 5).unwrap();
        assert_eq!(
            odd.to_rational_series(),
            Err(SiegelError::PhaseNotRational(1))
        );
    }

    #[test]
    fn first_nonconstant_term() {
        for level in 4..=20u32 {
            for k in 1..=level / 2 {
                let f = h_star(k as i64, level, level as i64 + 1).unwrap();
                let first = (1..f.prec())
                    .find(|&e| !f.coeff(e).unwrap().is_zero())
                    .unwrap();
                assert_eq!(first, k as i64);
                let expect = if 2 * k == level { -2 } else { -1 };
                assert_eq!(f.coeff(first), Some(r(expect, 1)));
            }
        }
    }

    #[test]
    fn json_shape() {
        let p = product_series(&ExpVector::new(5, vec![1, 1]).unwrap(), 2).unwrap();
        let j = serde_json::to_value(&p).unwrap();
        assert_eq!(j["ipow"], 2);
        assert_eq!(j["scalar"], "1/1");
        // (1/300) + (-11/300)
        assert_eq!(j["leadExp"], "-1/30");
        assert_eq!(j["fstar"]["denomN"], 5);
    }

    fn evec(level: u32) -> impl Strategy<Value = ExpVector> {
        prop::collection::vec(-4i64..=4, (level / 2) as usize)
            .prop_map(move |e| ExpVector::new(level, e).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn fold_reflection(n in -60i64..60, level in 4u32..20) {
            let a = fold_index(n, level);
            let b = fold_index(level as i64 - n, level);
            let c = fold_index(-n, level);
            match (a, b, c) {
                (Ok((ka, sa)), Ok((kb, sb)), Ok((kc, sc))) => {
                    // h_{1 - a} = -h_{a - 1} = h_a and h_{-a} = -h_a
                    prop_assert_eq!(ka, kb);
                    prop_assert_eq!(ka, kc);
                    prop_assert_eq!(sa, sb);
                    prop_assert_eq!(sa, -sc);
                }
                (Err(_), Err(_), Err(_)) => prop_assert_eq!(n.rem_euclid(level as i64), 0),
                _ => prop_assert!(false, "inconsistent zero detection"),
            }
        }

        #[test]
        fn homomorphism((e1, e2) in (4u32..13).prop_flat_map(|l| (evec(l), evec(l)))) {
            let prec = 3 * e1.level() as i64;
            let whole = product_series(&e1.add(&e2), prec).unwrap();
            let split = product_series(&e1, prec).unwrap().mul(&product_series(&e2, prec).unwrap()).unwrap();
            prop_assert_eq!(whole, split);
        }

        /// The multiplicity route agrees with powering each `h*` separately.
        #[test]
        fn product_matches_powers(e in evec(9)) {
            let prec = 30;
            let mut acc = QSeries::one(9, prec);
            for (k, ek) in e.iter() {
                acc = acc.mul(&h_star(k as i64, 9, prec).unwrap().pow_int(ek).unwrap());
            }
            prop_assert_eq!(product_series(&e, prec).unwrap().fstar, acc);
        }
    }
}
