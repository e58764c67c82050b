//! Division polynomials of the Tate normal form evaluated at the marked point.
//!
//! `P_n` is `psi_n` of `Y^2 + (1 - C)XY - BY = X^3 - BX^2` at `(0, 0)`. The
//! values come from the elliptic divisibility recurrence started at
//! `P_0 .. P_4`; `F_n` is `P_n` stripped of everything it shares with the
//! discriminant and with the earlier `P_d`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bivar_poly::{BivarPoly, RatPoly};

/// Largest `|n|` served unless the cache is built with another limit.
pub const DEFAULT_MAX_INDEX: u32 = 200;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DivPolyError {
    #[error("index {n} is outside the supported range |n| <= {max}")]
    OutOfRange { n: i64, max: u32 },
    #[error("F_n is defined for n >= 2, got n = {0}")]
    BadIndex(i64),
    #[error("P_{n} leaves the nonconstant cofactor {cofactor} over F_3..F_{n} and D")]
    FactorizationIncomplete { n: u32, cofactor: String },
}

/// `F_2` is a rational function; every other `F_n` is a polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FPoly {
    Rational(RatPoly),
    Poly(BivarPoly),
}

impl FPoly {
    pub fn render(&self) -> String {
        match self {
            FPoly::Rational(r) => r.render(),
            FPoly::Poly(p) => p.render(),
        }
    }

    pub fn as_poly(&self) -> Option<&BivarPoly> {
        match self {
            FPoly::Poly(p) => Some(p),
            FPoly::Rational(_) => None,
        }
    }
}

impl fmt::Display for FPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// A factor in the decomposition of `P_n` (`F(3)` is `B`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FactorKey {
    F(u32),
    D,
}

impl fmt::Display for FactorKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FactorKey::F(d) => write!(f, "F{d}"),
            FactorKey::D => f.write_str("D"),
        }
    }
}

/// `P_n = sign * prod F_d^a_d * D^a_D`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PFactorization {
    pub n: u32,
    pub sign: i8,
    pub exponents: BTreeMap<FactorKey, i64>,
}

impl PFactorization {
    pub fn exponent(&self, key: FactorKey) -> i64 {
        self.exponents.get(&key).copied().unwrap_or(0)
    }

    /// Multiplies the factorization back out.
    pub fn expand(&self, cache: &mut DivPolyCache) -> Result<RatPoly, DivPolyError> {
        let mut acc = RatPoly::from_poly(BivarPoly::constant(self.sign));
        for (&key, &e) in &self.exponents {
            let base = match key {
                FactorKey::F(d) => cache.f_poly(d as i64)?,
                FactorKey::D => cache.discriminant().clone(),
            };
            let factor = RatPoly::from_poly(base)
                .pow(e)
                .expect("factors of P_n are nonzero");
            acc = acc.mul(&factor);
        }
        Ok(acc)
    }
}

/// Memoized `P_n`, `F_n` and the discriminant `D`.
///
/// Not shared across threads; each worker owns its cache.
#[derive(Clone, Debug)]
pub struct DivPolyCache {
    p: Vec<BivarPoly>,
    f: BTreeMap<u32, BivarPoly>,
    disc: BivarPoly,
    max_index: u32,
}

impl Default for DivPolyCache {
    fn default() -> Self {
        Self::new()
    }
}

/// `B^3 (C^4 - 8BC^2 - 3C^3 + 16B^2 - 20BC + 3C^2 + B - C)`
pub fn discriminant() -> BivarPoly {
    let quartic = BivarPoly::from_triples(&[
        (0, 4, 1),
        (1, 2, -8),
        (0, 3, -3),
        (2, 0, 16),
        (1, 1, -20),
        (0, 2, 3),
        (1, 0, 1),
        (0, 1, -1),
    ]);
    &BivarPoly::term(1, 3, 0) * &quartic
}

impl DivPolyCache {
    pub fn new() -> Self {
        Self::with_max_index(DEFAULT_MAX_INDEX)
    }

    pub fn with_max_index(max_index: u32) -> Self {
        let b = BivarPoly::b();
        let seeds = vec![
            BivarPoly::zero(),
            BivarPoly::one(),
            -&b,
            -&b.pow(3),
            &BivarPoly::c() * &b.pow(5),
        ];
        DivPolyCache {
            p: seeds,
            f: BTreeMap::new(),
            disc: discriminant(),
            max_index,
        }
    }

    pub fn max_index(&self) -> u32 {
        self.max_index
    }

    pub fn discriminant(&self) -> &BivarPoly {
        &self.disc
    }

    fn check_range(&self, n: i64) -> Result<u32, DivPolyError> {
        let a = n.unsigned_abs();
        if a > self.max_index as u64 {
            return Err(DivPolyError::OutOfRange {
                n,
                max: self.max_index,
            });
        }
        Ok(a as u32)
    }

    /// `P_n` for any integer `n`, with `P_{-n} = -P_n`.
    pub fn p(&mut self, n: i64) -> Result<BivarPoly, DivPolyError> {
        let a = self.check_range(n)? as usize;
        while self.p.len() <= a {
            let next = self.p.len();
            let value = self.recurrence(next);
            self.p.push(value);
        }
        let v = self.p[a].clone();
        Ok(if n < 0 { -v } else { v })
    }

    /// One step of the recurrence; all smaller indices must be present.
    fn recurrence(&self, n: usize) -> BivarPoly {
        let p = &self.p;
        if n % 2 == 1 {
            let l = (n - 1) / 2;
            &(&p[l + 2] * &p[l].pow(3)) - &(&p[l + 1].pow(3) * &p[l - 1])
        } else {
            let l = n / 2;
            let inner = &(&p[l + 2] * &p[l - 1].pow(2)) - &(&p[l - 2] * &p[l + 1].pow(2));
            (&p[l] * &inner)
                .div_exact(&p[2])
                .expect("even division-polynomial step must be divisible by P_2")
        }
    }

    /// `F_n`: `B^4 / D` for `n = 2`, `B` for `n = 3`, otherwise `P_n` with
    /// every factor shared with `D, P_2, ..., P_{n-1}` removed.
    pub fn f(&mut self, n: i64) -> Result<FPoly, DivPolyError> {
        if n < 2 {
            return Err(DivPolyError::BadIndex(n));
        }
        if n == 2 {
            let r =
                RatPoly::new(BivarPoly::term(1, 4, 0), self.disc.clone()).expect("D is nonzero");
            return Ok(FPoly::Rational(r));
        }
        self.f_poly(n).map(FPoly::Poly)
    }

    /// `F_n` for `n >= 3` as a polynomial.
    pub fn f_poly(&mut self, n: i64) -> Result<BivarPoly, DivPolyError> {
        if n < 3 {
            return Err(DivPolyError::BadIndex(n));
        }
        let n = self.check_range(n)?;
        if let Some(f) = self.f.get(&n) {
            return Ok(f.clone());
        }
        let value = if n == 3 {
            BivarPoly::b()
        } else {
            let target = self.p(n as i64)?;
            let mut mods = vec![self.disc.clone()];
            for d in 2..n {
                mods.push(self.p(d as i64)?);
            }
            target.remove_common(&mods)
        };
        self.f.insert(n, value.clone());
        Ok(value)
    }

    /// Writes `P_n` over `F_3 = B, F_4, ..., F_n` and `D` by exact trial division.
    pub fn factor_p_over_f(&mut self, n: u32) -> Result<PFactorization, DivPolyError> {
        if n < 2 {
            return Err(DivPolyError::BadIndex(n as i64));
        }
        let mut rest = self.p(n as i64)?;
        let mut exponents = BTreeMap::new();
        for d in 4..=n {
            let fd = self.f_poly(d as i64)?;
            let k = strip_power(&mut rest, &fd);
            if k > 0 {
                exponents.insert(FactorKey::F(d), k);
            }
        }
        let b = BivarPoly::b();
        let quartic = self
            .disc
            .div_exact(&b.pow(3))
            .expect("D is divisible by B^3");
        let a_d = strip_power(&mut rest, &quartic);
        let a_b = strip_power(&mut rest, &b);
        if a_d != 0 {
            exponents.insert(FactorKey::D, a_d);
        }
        if a_b - 3 * a_d != 0 {
            exponents.insert(FactorKey::F(3), a_b - 3 * a_d);
        }
        let unit = rest.constant_value().filter(|c| c.abs().is_one());
        let Some(unit) = unit else {
            return Err(DivPolyError::FactorizationIncomplete {
                n,
                cofactor: rest.render(),
            });
        };
        Ok(PFactorization {
            n,
            sign: if unit.is_negative() { -1 } else { 1 },
            exponents,
        })
    }
}

fn strip_power(f: &mut BivarPoly, g: &BivarPoly) -> i64 {
    let mut k = 0;
    while let Ok(q) = f.div_exact(g) {
        *f = q;
        k += 1;
    }
    k
}
