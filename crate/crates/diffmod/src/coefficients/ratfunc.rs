use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::poly::{gcd, Poly};
use crate::Error;

/// Element of ℚ(symbols) in canonical form.
///
/// The numerator and denominator are coprime, the denominator has integer
/// coefficients without common factor and a positive leading coefficient.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{:?}", self.num)
        } else {
            write!(f, "({:?})/({:?})", self.num, self.den)
        }
    }
}

impl Default for RatFunc {
    fn default() -> Self {
        RatFunc::zero()
    }
}

impl From<Poly> for RatFunc {
    fn from(p: Poly) -> Self {
        RatFunc { num: p, den: Poly::one() }
    }
}

impl RatFunc {
    pub fn zero() -> RatFunc {
        RatFunc { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> RatFunc {
        RatFunc { num: Poly::one(), den: Poly::one() }
    }

    pub fn from_int(c: i64) -> RatFunc {
        Poly::from_int(c).into()
    }

    pub fn from_rational(c: BigRational) -> RatFunc {
        Poly::constant(c).into()
    }

    pub fn ratio(p: i64, q: i64) -> RatFunc {
        RatFunc::from_rational(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn symbol(s: u32) -> RatFunc {
        Poly::var(s).into()
    }

    /// Builds `num / den` in canonical form.
    pub fn from_parts(num: Poly, den: Poly) -> Result<RatFunc, Error> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(RatFunc::zero());
        }
        let g = gcd(&num, &den);
        let (num, den) = if g.is_constant() {
            (num, den)
        } else {
            (
                num.div_exact(&g).expect("gcd divides numerator"),
                den.div_exact(&g).expect("gcd divides denominator"),
            )
        };
        Ok(Self::content_normalize(num, den))
    }

    fn content_normalize(num: Poly, den: Poly) -> RatFunc {
        let c = den.rational_content();
        if c.is_one() {
            RatFunc { num, den }
        } else {
            let inv = c.recip();
            RatFunc { num: num.scale(&inv), den: den.scale(&inv) }
        }
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn constant_value(&self) -> Option<BigRational> {
        let n = self.num.constant_value()?;
        let d = self.den.constant_value()?;
        Some(n / d)
    }

    pub fn is_constant(&self) -> bool {
        self.constant_value().is_some()
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn add(&self, other: &RatFunc) -> RatFunc {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den == other.den {
            let num = self.num.add(&other.num);
            if self.den.is_one() {
                return RatFunc { num, den: Poly::one() };
            }
            return RatFunc::from_parts(num, self.den.clone()).expect("nonzero denominator");
        }
        // The numerator is coprime to both cofactors, so only g can cancel.
        let g = gcd(&self.den, &other.den);
        let a = other.den.div_exact(&g).expect("gcd divides");
        let b = self.den.div_exact(&g).expect("gcd divides");
        let num = self.num.mul(&a).add(&other.num.mul(&b));
        if num.is_zero() {
            return RatFunc::zero();
        }
        let den = self.den.mul(&a);
        if g.is_constant() {
            return Self::content_normalize(num, den);
        }
        let h = gcd(&num, &g);
        if h.is_constant() {
            return Self::content_normalize(num, den);
        }
        Self::content_normalize(
            num.div_exact(&h).expect("gcd divides numerator"),
            den.div_exact(&h).expect("gcd divides denominator"),
        )
    }

    pub fn sub(&self, other: &RatFunc) -> RatFunc {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RatFunc) -> RatFunc {
        if self.is_zero() || other.is_zero() {
            return RatFunc::zero();
        }
        if self.den.is_one() && other.den.is_one() {
            return RatFunc { num: self.num.mul(&other.num), den: Poly::one() };
        }
        let g1 = gcd(&self.num, &other.den);
        let g2 = gcd(&other.num, &self.den);
        let n1 = self.num.div_exact(&g1).expect("gcd divides");
        let d2 = other.den.div_exact(&g1).expect("gcd divides");
        let n2 = other.num.div_exact(&g2).expect("gcd divides");
        let d1 = self.den.div_exact(&g2).expect("gcd divides");
        Self::content_normalize(n1.mul(&n2), d1.mul(&d2))
    }

    pub fn scale(&self, c: &BigRational) -> RatFunc {
        if c.is_zero() {
            return RatFunc::zero();
        }
        RatFunc { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn inv(&self) -> Result<RatFunc, Error> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::content_normalize(self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, other: &RatFunc) -> Result<RatFunc, Error> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, e: i32) -> Result<RatFunc, Error> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = RatFunc::one();
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    /// Re-derives the canonical form; the identity on canonical inputs.
    pub fn normalize(&self) -> RatFunc {
        RatFunc::from_parts(self.num.clone(), self.den.clone()).expect("nonzero denominator")
    }

    pub fn symbols(&self) -> std::collections::BTreeSet<u32> {
        let mut s = self.num.symbols();
        s.extend(self.den.symbols());
        s
    }

    /// Partial derivative with respect to the symbol `s` (plain calculus, no chain rule).
    pub fn diff_symbol(&self, s: u32) -> RatFunc {
        let dn = self.num.diff(s);
        let dd = self.den.diff(s);
        if dd.is_zero() {
            return RatFunc::from_parts(dn, self.den.clone()).expect("nonzero denominator");
        }
        let num = dn.mul(&self.den).sub(&self.num.mul(&dd));
        RatFunc::from_parts(num, self.den.mul(&self.den)).expect("nonzero denominator")
    }

    /// Substitutes a rational function for a symbol.
    pub fn subst(&self, s: u32, value: &RatFunc) -> Result<RatFunc, Error> {
        if !self.symbols().contains(&s) {
            return Ok(self.clone());
        }
        let n = subst_poly(&self.num, s, value);
        let d = subst_poly(&self.den, s, value);
        n.div(&d)
    }

    pub fn eval(&self, f: &dyn Fn(u32) -> BigRational) -> Result<BigRational, Error> {
        let d = self.den.eval(f);
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.num.eval(f) / d)
    }
}

fn subst_poly(p: &Poly, s: u32, value: &RatFunc) -> RatFunc {
    let mut acc = RatFunc::zero();
    let mut power = RatFunc::one();
    let coeffs = p.coeffs_in(s);
    let mut e = 0;
    for (d, c) in coeffs {
        while e < d {
            power = power.mul(value);
            e += 1;
        }
        acc = acc.add(&RatFunc::from(c).mul(&power));
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(s: u32) -> RatFunc {
        RatFunc::symbol(s)
    }

    #[test]
    fn inverse_pair() {
        let x2 = x(0).mul(&x(0));
        assert!(x2.mul(&x2.inv().unwrap()).is_one());
    }

    #[test]
    fn cancellation() {
        // (x^2 - 1)/(x - 1) = x + 1
        let num = x(0).mul(&x(0)).sub(&RatFunc::one());
        let den = x(0).sub(&RatFunc::one());
        assert_eq!(num.div(&den).unwrap(), x(0).add(&RatFunc::one()));
    }

    #[test]
    fn canonical_denominator() {
        let f = RatFunc::one().div(&x(0).scale(&BigRational::new((-2).into(), 3.into()))).unwrap();
        assert!(f.denom().leading().unwrap().1 > &BigRational::zero());
        assert_eq!(f.denom(), &Poly::var(0));
        assert_eq!(f.numer(), &Poly::constant(BigRational::new((-3).into(), 2.into())));
    }

    #[test]
    fn division_by_zero() {
        assert!(matches!(x(0).div(&RatFunc::zero()), Err(Error::DivisionByZero)));
    }
}
