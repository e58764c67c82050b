use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use super::{BivarPoly, PolyError};

/// Quotient `num / den` of polynomials in Z[B, C], kept in lowest terms.
///
/// The denominator is primitive up to the integer content shared with the
/// numerator and has a positive leading coefficient under grlex(C > B).
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatPoly {
    num: BivarPoly,
    den: BivarPoly,
}

impl RatPoly {
    pub fn new(num: BivarPoly, den: BivarPoly) -> Result<Self, PolyError> {
        if den.is_zero() {
            return Err(PolyError::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(RatPoly {
                num,
                den: BivarPoly::one(),
            });
        }
        let g = num.gcd(&den);
        let mut num = num.div_exact(&g)?;
        let mut den = den.div_exact(&g)?;
        let k = num.content().gcd(&den.content());
        if !k.is_one() {
            num = num.scale_down(&k);
            den = den.scale_down(&k);
        }
        if den.leading_term().is_some_and(|(_, c)| c.is_negative()) {
            num = -num;
            den = -den;
        }
        Ok(RatPoly { num, den })
    }

    pub fn from_poly(p: BivarPoly) -> Self {
        RatPoly {
            num: p,
            den: BivarPoly::one(),
        }
    }

    pub fn num(&self) -> &BivarPoly {
        &self.num
    }

    pub fn den(&self) -> &BivarPoly {
        &self.den
    }

    /// The polynomial itself when the denominator is 1.
    pub fn as_poly(&self) -> Option<&BivarPoly> {
        (self.den == BivarPoly::one()).then_some(&self.num)
    }

    pub fn mul(&self, other: &RatPoly) -> RatPoly {
        RatPoly::new(&self.num * &other.num, &self.den * &other.den)
            .expect("product of nonzero denominators is nonzero")
    }

    pub fn inv(&self) -> Result<RatPoly, PolyError> {
        RatPoly::new(self.den.clone(), self.num.clone())
    }

    pub fn pow(&self, e: i64) -> Result<RatPoly, PolyError> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let e = e.unsigned_abs() as u32;
        Ok(RatPoly {
            num: base.num.pow(e),
            den: base.den.pow(e),
        })
    }

    pub fn render(&self) -> String {
        match self.as_poly() {
            Some(p) => p.render(),
            None => format!("({})/({})", self.num.render(), self.den.render()),
        }
    }
}

impl BivarPoly {
    fn scale_down(&self, k: &num_bigint::BigInt) -> BivarPoly {
        BivarPoly::from_terms(self.terms().map(|(m, c)| (*m, c / k)))
    }
}

impl fmt::Display for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl fmt::Debug for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatPoly({})", self.render())
    }
}
