//! Dense univariate polynomials over an exact GCD domain.
//!
//! `Dense<BigInt>` is Z[x]; nesting gives `Dense<Dense<BigInt>>` = Z[x][y],
//! which is how the bivariate GCD and content computations run. The GCD on
//! `Dense<R>` is the subresultant polynomial remainder sequence, so the same
//! code serves both levels of the recursion.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// An exact integral domain with GCDs and exact division.
pub trait Domain: Clone + PartialEq + fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    /// `Some(q)` with `q * other == self`, `None` if `other` does not divide `self`.
    fn div_exact(&self, other: &Self) -> Option<Self>;
    /// A greatest common divisor, normalized so that its leading sign is positive.
    fn gcd(&self, other: &Self) -> Self;
    /// Sign of the leading coefficient (`0` for zero).
    fn lead_sign(&self) -> i8;

    fn is_one(&self) -> bool {
        *self == Self::one()
    }

    fn pow(&self, mut e: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }
}

impl Domain for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn div_exact(&self, other: &Self) -> Option<Self> {
        if Zero::is_zero(other) {
            return None;
        }
        let (q, r) = self.div_rem(other);
        Zero::is_zero(&r).then_some(q)
    }
    fn gcd(&self, other: &Self) -> Self {
        Integer::gcd(self, other)
    }
    fn lead_sign(&self) -> i8 {
        if self.is_positive() {
            1
        } else if self.is_negative() {
            -1
        } else {
            0
        }
    }
}

/// Dense polynomial `coeffs[0] + coeffs[1] x + ...` with no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dense<R> {
    coeffs: Vec<R>,
}

/// Univariate integer polynomial, Z[x].
pub type UPoly = Dense<BigInt>;

impl<R: Domain> Dense<R> {
    pub fn new(mut coeffs: Vec<R>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Dense { coeffs }
    }

    pub fn constant(c: R) -> Self {
        Self::new(vec![c])
    }

    /// `c * x^k`
    pub fn monomial(c: R, k: usize) -> Self {
        let mut coeffs = vec![R::zero(); k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    pub fn x() -> Self {
        Self::monomial(R::one(), 1)
    }

    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<R> {
        self.coeffs
    }

    pub fn coeff(&self, k: usize) -> R {
        self.coeffs.get(k).cloned().unwrap_or_else(R::zero)
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lc(&self) -> R {
        self.coeffs.last().cloned().unwrap_or_else(R::zero)
    }

    pub fn scale(&self, c: &R) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.mul(c)).collect())
    }

    fn shift(&self, k: usize) -> Self {
        if self.coeffs.is_empty() {
            return self.clone();
        }
        let mut coeffs = vec![R::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Dense { coeffs }
    }

    /// Divide every coefficient exactly by `c`.
    pub fn div_scalar(&self, c: &R) -> Option<Self> {
        self.coeffs
            .iter()
            .map(|a| a.div_exact(c))
            .collect::<Option<Vec<_>>>()
            .map(Self::new)
    }

    /// GCD of the coefficients.
    pub fn content(&self) -> R {
        let mut g = R::zero();
        for c in &self.coeffs {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// `(content, primitive part)`; the primitive part of zero is zero.
    pub fn content_and_primitive(&self) -> (R, Self) {
        let c = self.content();
        if c.is_zero() {
            return (c, self.clone());
        }
        let pp = self
            .div_scalar(&c)
            .expect("content divides every coefficient");
        (c, pp)
    }

    /// Pseudo-remainder `lc(d)^(deg self - deg d + 1) * self mod d`.
    pub fn prem(&self, d: &Self) -> Self {
        let dd = d.degree().expect("pseudo-division by zero polynomial");
        let Some(ds) = self.degree() else {
            return self.clone();
        };
        if ds < dd {
            return self.clone();
        }
        let lc_d = d.lc();
        let mut r = self.clone();
        let mut steps = ds - dd + 1;
        while let Some(dr) = r.degree() {
            if dr < dd {
                break;
            }
            let t = d.scale(&r.lc()).shift(dr - dd);
            r = Domain::sub(&r.scale(&lc_d), &t);
            steps -= 1;
        }
        if steps > 0 {
            r = r.scale(&lc_d.pow(steps as u32));
        }
        r
    }

    /// Subresultant PRS GCD over the coefficient domain `R`.
    fn subresultant_gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = if self.degree() >= other.degree() {
            (self.clone(), other.clone())
        } else {
            (other.clone(), self.clone())
        };
        if b.is_zero() {
            return normalize_sign(a.content_and_primitive().1.scale(&a.content()));
        }
        let (ca, pa) = a.content_and_primitive();
        let (cb, pb) = b.content_and_primitive();
        let d = ca.gcd(&cb);
        a = pa;
        b = pb;
        let mut g = R::one();
        let mut h = R::one();
        loop {
            let delta = a.degree().unwrap() - b.degree().unwrap();
            let r = a.prem(&b);
            if r.is_zero() {
                break;
            }
            if r.degree() == Some(0) {
                b = Self::one();
                break;
            }
            a = b;
            let divisor = g.mul(&h.pow(delta as u32));
            b = r
                .div_scalar(&divisor)
                .expect("subresultant PRS division is exact");
            g = a.lc();
            h = if delta == 0 {
                h
            } else {
                g.pow(delta as u32)
                    .div_exact(&h.pow(delta as u32 - 1))
                    .expect("subresultant PRS scale factor is exact")
            };
        }
        let (_, pp) = b.content_and_primitive();
        normalize_sign(pp.scale(&d))
    }

    /// Evaluate at `x = v` by Horner's rule.
    pub fn eval(&self, v: &R) -> R {
        let mut acc = R::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(v).add(c);
        }
        acc
    }
}

fn normalize_sign<R: Domain>(p: Dense<R>) -> Dense<R> {
    if p.lead_sign() < 0 {
        Domain::neg(&p)
    } else {
        p
    }
}

impl<R: Domain> Domain for Dense<R> {
    fn zero() -> Self {
        Dense { coeffs: Vec::new() }
    }

    fn one() -> Self {
        Dense {
            coeffs: vec![R::one()],
        }
    }

    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| match (self.coeffs.get(i), other.coeffs.get(i)) {
                (Some(a), Some(b)) => a.add(b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            })
            .collect();
        Self::new(coeffs)
    }

    fn sub(&self, other: &Self) -> Self {
        Domain::add(self, &Domain::neg(other))
    }

    fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return <Self as Domain>::zero();
        }
        let mut out = vec![R::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] = out[i + j].add(&a.mul(b));
                }
            }
        }
        Self::new(out)
    }

    fn neg(&self) -> Self {
        Dense {
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
        }
    }

    fn div_exact(&self, d: &Self) -> Option<Self> {
        let dd = d.degree()?;
        let Some(ds) = self.degree() else {
            return Some(<Self as Domain>::zero());
        };
        if ds < dd {
            return None;
        }
        let lc_d = d.lc();
        let mut r = self.clone();
        let mut q = vec![R::zero(); ds - dd + 1];
        while let Some(dr) = r.degree() {
            if dr < dd {
                return None;
            }
            let t = r.lc().div_exact(&lc_d)?;
            r = Domain::sub(&r, &d.scale(&t).shift(dr - dd));
            q[dr - dd] = t;
        }
        Some(Self::new(q))
    }

    fn gcd(&self, other: &Self) -> Self {
        if self.is_zero() && other.is_zero() {
            return <Self as Domain>::zero();
        }
        self.subresultant_gcd(other)
    }

    fn lead_sign(&self) -> i8 {
        self.coeffs.last().map_or(0, |c| c.lead_sign())
    }
}

impl UPoly {
    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// Render in the variable `var`, highest degree first.
    pub fn render(&self, var: &str) -> String {
        let terms = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !Zero::is_zero(*c))
            .map(|(k, c)| {
                let mono = match k {
                    0 => String::new(),
                    1 => var.to_string(),
                    _ => format!("{var}^{k}"),
                };
                (c.clone(), mono)
            });
        super::render_terms(terms)
    }
}

impl<R: fmt::Debug> fmt::Debug for Dense<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.coeffs.iter()).finish()
    }
}

impl fmt::Display for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render("x"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn up(c: &[i64]) -> UPoly {
        UPoly::from_i64(c)
    }

    #[test]
    fn prem_matches_definition() {
        // (x^2 + 1) prem (2x + 1) = 4(x^2+1) - (2x+1)(2x-1) = 5
        let r = up(&[1, 0, 1]).prem(&up(&[1, 2]));
        assert_eq!(r, up(&[5]));
    }

    #[test]
    fn univariate_gcd() {
        let f = up(&[-1, 0, 1]); // x^2 - 1
        let g = up(&[1, 2, 1]); // (x + 1)^2
        assert_eq!(Domain::gcd(&f, &g), up(&[1, 1]));
        assert_eq!(Domain::gcd(&up(&[6, 12]), &up(&[4, 8])), up(&[2, 4]));
        assert_eq!(Domain::gcd(&up(&[0, -3]), &UPoly::zero()), up(&[0, 3]));
    }

    #[test]
    fn exact_division() {
        let f = up(&[-1, 0, 1]);
        assert_eq!(f.div_exact(&up(&[1, 1])), Some(up(&[-1, 1])));
        assert_eq!(f.div_exact(&up(&[2, 1])), None);
        assert_eq!(up(&[2, 2]).div_exact(&up(&[2])), Some(up(&[1, 1])));
        assert_eq!(up(&[1, 2]).div_exact(&up(&[2])), None);
    }

    #[test]
    fn nested_gcd_over_zx() {
        // y^2 - x^2 and y - x over Z[x][y]
        let x = UPoly::x();
        let f = Dense::new(vec![Domain::neg(&x.mul(&x)), UPoly::zero(), UPoly::one()]);
        let g = Dense::new(vec![Domain::neg(&x), UPoly::one()]);
        assert_eq!(Domain::gcd(&f, &g), g);
    }

    #[test]
    fn render_upoly() {
        assert_eq!(up(&[-1, -11, 1, 0, 0, 0, 0]).render("c"), "c^2 - 11*c - 1");
        assert_eq!(UPoly::zero().render("c"), "0");
    }
}
