//! Sparse exact polynomials in Z[B, C].
//!
//! Terms are kept in a `BTreeMap` keyed by [`Monomial`], whose `Ord` is
//! graded lexicographic with `C > B`. That order decides the leading term,
//! and therefore the sign normalization used for gcds and for the `F_n`.
//! The text and JSON forms list terms by descending total degree and, within
//! a degree, by descending power of `B` (`B*C^2 - 2*B^2 + 3*B*C - C^2`).

pub mod dense;
mod ratpoly;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use dense::{Dense, UPoly};
pub use ratpoly::RatPoly;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("polynomial is not divisible by the given divisor")]
    NotDivisible,
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("cannot parse polynomial {input:?}: {reason}")]
    Parse { input: String, reason: String },
}

/// `B^b * C^c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Monomial {
    pub b: u32,
    pub c: u32,
}

impl Monomial {
    pub const ONE: Monomial = Monomial { b: 0, c: 0 };

    pub fn new(b: u32, c: u32) -> Self {
        Monomial { b, c }
    }

    pub fn degree(&self) -> u32 {
        self.b + self.c
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.b <= other.b && self.c <= other.c
    }

    fn render(&self) -> String {
        let factor = |v: &str, e: u32| match e {
            0 => None,
            1 => Some(v.to_string()),
            _ => Some(format!("{v}^{e}")),
        };
        [factor("B", self.b), factor("C", self.c)]
            .into_iter()
            .flatten()
            .collect::<Vec<_>>()
            .join("*")
    }

    /// Key for the text/JSON order: larger sorts first.
    fn display_key(&self) -> (u32, u32) {
        (self.degree(), self.b)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.degree(), self.c, self.b).cmp(&(other.degree(), other.c, other.b))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Element of Z[B, C]; the zero polynomial has no terms.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BivarPoly {
    terms: BTreeMap<Monomial, BigInt>,
}

impl BivarPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::term(c, 0, 0)
    }

    /// `coeff * B^b * C^c`.
    pub fn term(coeff: impl Into<BigInt>, b: u32, c: u32) -> Self {
        Self::from_terms([(Monomial::new(b, c), coeff.into())])
    }

    pub fn b() -> Self {
        Self::term(1, 1, 0)
    }

    pub fn c() -> Self {
        Self::term(1, 0, 1)
    }

    /// Builds a polynomial from possibly repeated, possibly zero terms.
    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, BigInt)>) -> Self {
        let mut map: BTreeMap<Monomial, BigInt> = BTreeMap::new();
        for (m, c) in terms {
            *map.entry(m).or_insert_with(BigInt::zero) += c;
        }
        map.retain(|_, c| !c.is_zero());
        BivarPoly { terms: map }
    }

    /// Convenience constructor from `(degB, degC, coeff)` triples.
    pub fn from_triples(triples: &[(u32, u32, i64)]) -> Self {
        Self::from_terms(
            triples
                .iter()
                .map(|&(b, c, k)| (Monomial::new(b, c), BigInt::from(k))),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True for nonzero constants and for zero.
    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| *m == Monomial::ONE)
    }

    pub fn constant_value(&self) -> Option<BigInt> {
        if self.is_zero() {
            return Some(BigInt::zero());
        }
        self.is_constant().then(|| self.coeff(0, 0))
    }

    pub fn coeff(&self, b: u32, c: u32) -> BigInt {
        self.terms
            .get(&Monomial::new(b, c))
            .cloned()
            .unwrap_or_default()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending grlex(C > B) order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    /// Terms in text/JSON order.
    pub fn display_terms(&self) -> Vec<(Monomial, BigInt)> {
        let mut v: Vec<_> = self.terms.iter().map(|(m, c)| (*m, c.clone())).collect();
        v.sort_by_key(|t| std::cmp::Reverse(t.0.display_key()));
        v
    }

    /// Leading term under grlex(C > B).
    pub fn leading_term(&self) -> Option<(Monomial, &BigInt)> {
        self.terms.iter().next_back().map(|(m, c)| (*m, c))
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn degree_b(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.b).max()
    }

    pub fn degree_c(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.c).max()
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        BivarPoly {
            terms: self.terms.iter().map(|(m, c)| (*m, c * k)).collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Nonnegative gcd of all coefficients (zero for the zero polynomial).
    pub fn content(&self) -> BigInt {
        self.terms.values().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    pub fn primitive_part(&self) -> Self {
        let g = self.content();
        if g.is_zero() || g.is_one() {
            return self.clone();
        }
        BivarPoly {
            terms: self.terms.iter().map(|(m, c)| (*m, c / &g)).collect(),
        }
    }

    /// Primitive with positive leading coefficient under grlex(C > B).
    pub fn normalize(&self) -> Self {
        let p = self.primitive_part();
        match p.leading_term() {
            Some((_, c)) if c.is_negative() => -p,
            _ => p,
        }
    }

    /// Largest monomial dividing every term.
    pub fn monomial_content(&self) -> Monomial {
        let b = self.terms.keys().map(|m| m.b).min().unwrap_or(0);
        let c = self.terms.keys().map(|m| m.c).min().unwrap_or(0);
        Monomial::new(b, c)
    }

    fn div_monomial(&self, m: Monomial) -> Self {
        BivarPoly {
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (Monomial::new(k.b - m.b, k.c - m.c), c.clone()))
                .collect(),
        }
    }

    fn mul_monomial(&self, m: Monomial) -> Self {
        BivarPoly {
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (Monomial::new(k.b + m.b, k.c + m.c), c.clone()))
                .collect(),
        }
    }

    /// Exact quotient `self / divisor` in Z[B, C].
    ///
    /// Returns `NotDivisible` when the remainder under grlex division is
    /// nonzero or the quotient would need non-integer coefficients.
    pub fn div_exact(&self, divisor: &BivarPoly) -> Result<BivarPoly, PolyError> {
        let (lm, lc) = match divisor.leading_term() {
            Some((m, c)) => (m, c.clone()),
            None => return Err(PolyError::DivisionByZero),
        };
        if divisor.num_terms() == 1 {
            if !self.terms.keys().all(|m| lm.divides(m)) {
                return Err(PolyError::NotDivisible);
            }
            let mut terms = BTreeMap::new();
            for (m, c) in &self.terms {
                let (q, r) = c.div_rem(&lc);
                if !r.is_zero() {
                    return Err(PolyError::NotDivisible);
                }
                terms.insert(Monomial::new(m.b - lm.b, m.c - lm.c), q);
            }
            return Ok(BivarPoly { terms });
        }
        let mut rem = self.terms.clone();
        let mut quot: BTreeMap<Monomial, BigInt> = BTreeMap::new();
        while let Some((&m, c)) = rem.iter().next_back() {
            if !lm.divides(&m) {
                return Err(PolyError::NotDivisible);
            }
            let (q, r) = c.div_rem(&lc);
            if !r.is_zero() {
                return Err(PolyError::NotDivisible);
            }
            let qm = Monomial::new(m.b - lm.b, m.c - lm.c);
            for (dm, dc) in &divisor.terms {
                let key = Monomial::new(dm.b + qm.b, dm.c + qm.c);
                let entry = rem.entry(key).or_insert_with(BigInt::zero);
                *entry -= &q * dc;
                if entry.is_zero() {
                    rem.remove(&key);
                }
            }
            quot.insert(qm, q);
        }
        Ok(BivarPoly { terms: quot })
    }

    /// True if `divisor` divides `self` in Z[B, C].
    pub fn is_divisible_by(&self, divisor: &BivarPoly) -> bool {
        self.div_exact(divisor).is_ok()
    }

    /// View as a polynomial in `C` with coefficients in Z[B].
    fn to_recursive(&self) -> Dense<UPoly> {
        let (Some(db), Some(dc)) = (self.degree_b(), self.degree_c()) else {
            return Dense::new(Vec::new());
        };
        let mut grid = vec![vec![BigInt::zero(); db as usize + 1]; dc as usize + 1];
        for (m, c) in &self.terms {
            grid[m.c as usize][m.b as usize] = c.clone();
        }
        Dense::new(grid.into_iter().map(UPoly::new).collect())
    }

    fn from_recursive(p: &Dense<UPoly>) -> Self {
        Self::from_terms(p.coeffs().iter().enumerate().flat_map(|(ci, inner)| {
            inner
                .coeffs()
                .iter()
                .enumerate()
                .map(move |(bi, k)| (Monomial::new(bi as u32, ci as u32), k.clone()))
        }))
    }

    /// Normalized gcd in Z[B, C]: primitive, positive leading coefficient.
    ///
    /// Monomial factors are split off first; the rest runs the subresultant
    /// PRS in `C` over Z[B], with Z[B]-contents handled separately.
    pub fn gcd(&self, other: &BivarPoly) -> BivarPoly {
        if self.is_zero() {
            return other.normalize();
        }
        if other.is_zero() {
            return self.normalize();
        }
        let mf = self.monomial_content();
        let mg = other.monomial_content();
        let common = Monomial::new(mf.b.min(mg.b), mf.c.min(mg.c));
        let f = self.div_monomial(mf);
        let g = other.div_monomial(mg);
        let core = if f.is_constant() || g.is_constant() {
            BivarPoly::one()
        } else {
            let h = dense::Domain::gcd(&f.to_recursive(), &g.to_recursive());
            BivarPoly::from_recursive(&h)
        };
        core.mul_monomial(common).normalize()
    }

    /// Strips from `self` every factor it shares with any of `mods`.
    ///
    /// For each modulus, divides by `gcd(f, M)` until that gcd is constant.
    /// The result is normalized.
    pub fn remove_common(&self, mods: &[BivarPoly]) -> BivarPoly {
        assert!(!self.is_zero(), "remove_common of the zero polynomial");
        let mut f = self.normalize();
        for m in mods {
            if m.is_zero() {
                continue;
            }
            loop {
                let g = f.gcd(m);
                if g.is_constant() {
                    break;
                }
                f = f
                    .div_exact(&g)
                    .expect("a primitive gcd divides its argument in Z[B, C]");
            }
        }
        f.normalize()
    }

    /// Evaluate by substituting `b` for `B` and `c` for `C` in any target ring.
    pub fn substitute<T: Substitute>(&self, b: &T, c: &T) -> T {
        let db = self.degree_b().unwrap_or(0) as usize;
        let dc = self.degree_c().unwrap_or(0) as usize;
        let mut bpow = vec![b.one_like()];
        for i in 1..=db {
            let next = bpow[i - 1].mul(b);
            bpow.push(next);
        }
        let mut cpow = vec![c.one_like()];
        for j in 1..=dc {
            let next = cpow[j - 1].mul(c);
            cpow.push(next);
        }
        let mut acc = b.zero_like();
        for (m, k) in &self.terms {
            let t = bpow[m.b as usize].mul(&cpow[m.c as usize]).scale_int(k);
            acc = acc.add(&t);
        }
        acc
    }

    /// `self(b(x), c(x))` as a univariate integer polynomial.
    pub fn substitute_univariate(&self, b: &UPoly, c: &UPoly) -> UPoly {
        self.substitute(b, c)
    }

    pub fn render(&self) -> String {
        render_terms(
            self.display_terms()
                .into_iter()
                .map(|(m, c)| (c, m.render())),
        )
    }

    pub fn parse(s: &str) -> Result<Self, PolyError> {
        parse_poly(s)
    }
}

/// Target ring for [`BivarPoly::substitute`].
pub trait Substitute: Sized {
    fn one_like(&self) -> Self;
    fn zero_like(&self) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn scale_int(&self, k: &BigInt) -> Self;
}

impl Substitute for UPoly {
    fn one_like(&self) -> Self {
        <UPoly as dense::Domain>::one()
    }
    fn zero_like(&self) -> Self {
        <UPoly as dense::Domain>::zero()
    }
    fn add(&self, other: &Self) -> Self {
        dense::Domain::add(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        dense::Domain::mul(self, other)
    }
    fn scale_int(&self, k: &BigInt) -> Self {
        self.scale(k)
    }
}

impl Substitute for BigInt {
    fn one_like(&self) -> Self {
        BigInt::one()
    }
    fn zero_like(&self) -> Self {
        BigInt::zero()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn scale_int(&self, k: &BigInt) -> Self {
        self * k
    }
}

/// Joins `(coeff, monomial-text)` pairs as `a*M1 - b*M2 + ...`.
pub(crate) fn render_terms(terms: impl IntoIterator<Item = (BigInt, String)>) -> String {
    let mut out = String::new();
    for (c, mono) in terms {
        let neg = c.is_negative();
        let abs = c.abs();
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        if mono.is_empty() {
            out.push_str(&abs.to_string());
        } else if abs.is_one() {
            out.push_str(&mono);
        } else {
            out.push_str(&format!("{abs}*{mono}"));
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

fn parse_poly(input: &str) -> Result<BivarPoly, PolyError> {
    let err = |reason: &str| PolyError::Parse {
        input: input.to_string(),
        reason: reason.to_string(),
    };
    let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(err("empty input"));
    }
    let bytes = s.as_bytes();
    let mut terms = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let mut sign = BigInt::one();
        if i > 0 || bytes[i] == b'+' || bytes[i] == b'-' {
            match bytes[i] {
                b'+' => {}
                b'-' => sign = -sign,
                _ => return Err(err("expected '+' or '-' between terms")),
            }
            i += 1;
        }
        let end = s[i..].find(['+', '-']).map_or(bytes.len(), |p| i + p);
        let body = &s[i..end];
        if body.is_empty() {
            return Err(err("empty term"));
        }
        let mut coeff = sign;
        let mut mono = Monomial::ONE;
        for factor in body.split('*') {
            let (base, exp) = match factor.split_once('^') {
                Some((b, e)) => (b, e.parse::<u32>().map_err(|_| err("bad exponent"))?),
                None => (factor, 1),
            };
            match base {
                "B" => mono.b += exp,
                "C" => mono.c += exp,
                _ => {
                    let k = BigInt::from_str(base).map_err(|_| err("bad factor"))?;
                    coeff *= num_traits::pow(k, exp as usize);
                }
            }
        }
        terms.push((mono, coeff));
        i = end;
    }
    Ok(BivarPoly::from_terms(terms))
}

impl FromStr for BivarPoly {
    type Err = PolyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_poly(s)
    }
}

impl fmt::Display for BivarPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl fmt::Debug for BivarPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BivarPoly({})", self.render())
    }
}

impl Neg for BivarPoly {
    type Output = BivarPoly;
    fn neg(mut self) -> BivarPoly {
        for c in self.terms.values_mut() {
            *c = -std::mem::take(c);
        }
        self
    }
}

impl Neg for &BivarPoly {
    type Output = BivarPoly;
    fn neg(self) -> BivarPoly {
        -self.clone()
    }
}

impl Add for &BivarPoly {
    type Output = BivarPoly;
    fn add(self, rhs: &BivarPoly) -> BivarPoly {
        let mut terms = self.terms.clone();
        for (m, c) in &rhs.terms {
            let e = terms.entry(*m).or_insert_with(BigInt::zero);
            *e += c;
            if e.is_zero() {
                terms.remove(m);
            }
        }
        BivarPoly { terms }
    }
}

impl Sub for &BivarPoly {
    type Output = BivarPoly;
    fn sub(self, rhs: &BivarPoly) -> BivarPoly {
        self + &(-rhs)
    }
}

impl Mul for &BivarPoly {
    type Output = BivarPoly;
    fn mul(self, rhs: &BivarPoly) -> BivarPoly {
        let mut acc: HashMap<Monomial, BigInt> =
            HashMap::with_capacity(self.terms.len() * rhs.terms.len());
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                let key = Monomial::new(m1.b + m2.b, m1.c + m2.c);
                *acc.entry(key).or_insert_with(BigInt::zero) += c1 * c2;
            }
        }
        let terms = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        BivarPoly { terms }
    }
}

macro_rules! forward_owned_binop {
    ($tr:ident, $method:ident) => {
        impl $tr for BivarPoly {
            type Output = BivarPoly;
            fn $method(self, rhs: BivarPoly) -> BivarPoly {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&BivarPoly> for BivarPoly {
            type Output = BivarPoly;
            fn $method(self, rhs: &BivarPoly) -> BivarPoly {
                (&self).$method(rhs)
            }
        }
    };
}

forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);

/// JSON shape: `{"terms": [[degB, degC, "coeff"], ...]}` in text order.
#[derive(Serialize, Deserialize)]
struct PolyJson {
    terms: Vec<(u32, u32, String)>,
}

impl Serialize for BivarPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PolyJson {
            terms: self
                .display_terms()
                .into_iter()
                .map(|(m, c)| (m.b, m.c, c.to_string()))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BivarPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = PolyJson::deserialize(d)?;
        let mut terms = Vec::with_capacity(raw.terms.len());
        for (b, c, k) in raw.terms {
            let k = BigInt::from_str(&k).map_err(serde::de::Error::custom)?;
            terms.push((Monomial::new(b, c), k));
        }
        Ok(BivarPoly::from_terms(terms))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> BivarPoly {
        s.parse().unwrap()
    }

    #[test]
    fn add_examples() {
        assert!((&p("B") + &p("-B")).is_zero());
        assert_eq!(&p("C^2 - B") + &p("C"), p("C^2 + C - B"));
        assert_eq!(&p("B*C + 1") + &p("B*C - 1"), p("2*B*C"));
    }

    #[test]
    fn mul_examples() {
        assert_eq!(&p("B") * &p("C"), p("B*C"));
        assert_eq!(&p("C - B") * &p("C + B"), p("C^2 - B^2"));
        assert_eq!(p("-B").pow(3), p("-B^3"));
    }

    #[test]
    fn div_exact_examples() {
        assert_eq!(p("B^2*C").div_exact(&p("B")).unwrap(), p("B*C"));
        assert_eq!(p("C").div_exact(&p("B")), Err(PolyError::NotDivisible));
        assert_eq!(
            p("C").div_exact(&BivarPoly::zero()),
            Err(PolyError::DivisionByZero)
        );
        let f = p("C^2 - B + C");
        let g = p("B*C - 3*B^2 + 7");
        assert_eq!((&f * &g).div_exact(&g).unwrap(), f);
        assert_eq!(
            p("B + 1").div_exact(&p("2*B + 2")),
            Err(PolyError::NotDivisible)
        );
    }

    #[test]
    fn gcd_examples() {
        assert_eq!(p("B^2*C").gcd(&p("B*C^2")), p("B*C"));
        assert_eq!(p("C^2 - B + C").gcd(&p("C - B")), BivarPoly::one());
        assert_eq!(p("2*B").gcd(&p("4*B*C")), p("B"));
        assert_eq!(p("-3*C + 3*B").gcd(&BivarPoly::zero()), p("C - B"));
    }

    #[test]
    fn gcd_with_shared_nonmonomial_factor() {
        let h = p("B*C^2 - 2*B^2 + 3*B*C - C^2");
        let f = &h * &p("C^3 - B^2 + B*C");
        let g = &h * &p("C - B + 5");
        assert_eq!(f.gcd(&g), h);
    }

    #[test]
    fn remove_common_full_multiplicity() {
        assert_eq!(p("B^3").remove_common(&[p("B")]), BivarPoly::one());
        let f = &(&p("B^4") * &p("C - B")) * &p("C^2 - B + C").pow(3);
        let r = f.remove_common(&[p("B*C - B^2"), p("C")]);
        assert_eq!(r, p("C^2 - B + C").pow(3));
    }

    #[test]
    fn render_order_and_normalization() {
        let f8 = p("B*C^2 - 2*B^2 + 3*B*C - C^2");
        assert_eq!(f8.render(), "B*C^2 - 2*B^2 + 3*B*C - C^2");
        assert_eq!(p("C - B").normalize().render(), "-B + C");
        assert_eq!(p("B - C").normalize(), p("C - B"));
        assert_eq!(p("-B^3").render(), "-B^3");
        assert_eq!(BivarPoly::zero().render(), "0");
        assert_eq!(p("2*B*C").leading_term().unwrap().0, Monomial::new(1, 1));
    }

    #[test]
    fn parse_errors() {
        assert!(BivarPoly::parse("").is_err());
        assert!(BivarPoly::parse("B^x").is_err());
        assert!(BivarPoly::parse("B + + C").is_err());
        assert!(BivarPoly::parse("D").is_err());
    }

    #[test]
    fn json_shape() {
        let f = p("B*C^2 - 2*B^2 + 3*B*C - C^2");
        let js = serde_json::to_string(&f).unwrap();
        assert_eq!(
            js,
            r#"{"terms":[[1,2,"1"],[2,0,"-2"],[1,1,"3"],[0,2,"-1"]]}"#
        );
        let back: BivarPoly = serde_json::from_str(&js).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn substitute_univariate() {
        let c = UPoly::x();
        let f = p("C^2 - B + C");
        // B = c(c+1), C = c
        let b = UPoly::from_i64(&[0, 1, 1]);
        assert!(dense::Domain::is_zero(&f.substitute_univariate(&b, &c)));
    }

    fn small_poly() -> impl Strategy<Value = BivarPoly> {
        prop::collection::vec((0u32..4, 0u32..4, -6i64..7), 1..6)
            .prop_map(|t| BivarPoly::from_triples(&t))
    }

    fn nonconstant_poly() -> impl Strategy<Value = BivarPoly> {
        small_poly().prop_filter("nonconstant", |f| !f.is_constant())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn render_parse_roundtrip(f in small_poly()) {
            prop_assert_eq!(BivarPoly::parse(&f.render()).unwrap(), f);
        }

        #[test]
        fn gcd_divides_both(a in nonconstant_poly(), b in nonconstant_poly(), h in nonconstant_poly()) {
            let f = &a * &h;
            let g = &b * &h;
            let d = f.gcd(&g);
            prop_assert!(f.is_divisible_by(&d));
            prop_assert!(g.is_divisible_by(&d));
            prop_assert!(d.is_divisible_by(&h.normalize()));
        }

        #[test]
        fn gcd_scales_with_common_factor(a in nonconstant_poly(), b in nonconstant_poly(), h in nonconstant_poly()) {
            let lhs = (&a * &h).gcd(&(&b * &h));
            let rhs = (&a.gcd(&b) * &h).normalize();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn remove_common_leaves_constant_gcds(a in nonconstant_poly(), m1 in nonconstant_poly(), m2 in nonconstant_poly()) {
            let f = &(&a * &m1) * &m2;
            let mods = [m1.clone(), m2.clone()];
            let r = f.remove_common(&mods);
            for m in &mods {
                prop_assert!(r.gcd(m).is_constant());
            }
            prop_assert!(f.is_divisible_by(&r));
        }
    }
}
