//! Rational functions in t: reduced fractions of polynomials with a monic
//! denominator. The zero function is 0/1.

use crate::field::Field;
use crate::place::Place;
use crate::poly::{Poly, PolyError};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RatFuncError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("inverse of the zero function")]
    ZeroInverse,
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("pseudo-place {0} shares a proper factor with the operand; refine the place first")]
    AmbiguousPlace(String),
    #[error("expected a polynomial, found denominator {0}")]
    NotAPolynomial(String),
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct RatFunc<F: Field> {
    num: Poly<F>,
    den: Poly<F>,
}

impl<F: Field> RatFunc<F> {
    /// Build and normalize: cancel the gcd, make the denominator monic.
    pub fn new(num: Poly<F>, den: Poly<F>) -> Result<Self, RatFuncError> {
        num.same_field(&den)?;
        if den.is_zero() {
            return Err(RatFuncError::ZeroDenominator);
        }
        if num.is_zero() {
            let field = num.field().clone();
            return Ok(RatFunc { num, den: Poly::one(field) });
        }
        let g = num.gcd(&den)?;
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_exact(&g)?, den.div_exact(&g)?)
        };
        let (den_monic, lc) = den.make_monic();
        let lc_inv = den.field().inv(&lc).expect("nonzero leading coefficient");
        Ok(RatFunc { num: num.mul_scalar(&lc_inv), den: den_monic })
    }

    pub fn from_poly(num: Poly<F>) -> Self {
        let field = num.field().clone();
        RatFunc { num, den: Poly::one(field) }
    }

    pub fn zero(field: F) -> Self {
        RatFunc { num: Poly::zero(field.clone()), den: Poly::one(field) }
    }

    pub fn one(field: F) -> Self {
        RatFunc { num: Poly::one(field.clone()), den: Poly::one(field) }
    }

    pub fn constant(field: F, c: F::Elem) -> Self {
        RatFunc { num: Poly::constant(field.clone(), c), den: Poly::one(field) }
    }

    pub fn from_int(field: F, n: i64) -> Self {
        let c = field.from_i64(n);
        RatFunc::constant(field, c)
    }

    pub fn field(&self) -> &F {
        self.num.field()
    }

    pub fn num(&self) -> &Poly<F> {
        &self.num
    }

    pub fn den(&self) -> &Poly<F> {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_poly(&self) -> bool {
        self.den.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_one()
    }

    pub fn as_poly(&self) -> Result<&Poly<F>, RatFuncError> {
        if self.is_poly() {
            Ok(&self.num)
        } else {
            Err(RatFuncError::NotAPolynomial(self.den.to_string()))
        }
    }

    /// Degree as a map to the projective line: max(deg num, deg den); 0 for
    /// the zero function.
    pub fn map_degree(&self) -> u64 {
        let dn = self.num.degree().unwrap_or(0) as u64;
        let dd = self.den.degree().unwrap_or(0) as u64;
        dn.max(dd)
    }

    pub fn neg(&self) -> Self {
        RatFunc { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        // a/b + c/d = (ad + cb)/bd, normalized afterwards.
        let num = self.num.mul(&rhs.den).add(&rhs.num.mul(&self.den));
        let den = self.den.mul(&rhs.den);
        RatFunc::new(num, den).expect("nonzero denominator")
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        // Cross-cancel first so the big multiplication happens on reduced parts.
        let g1 = self.num.gcd(&rhs.den).expect("same field");
        let g2 = rhs.num.gcd(&self.den).expect("same field");
        let a = if g1.is_one() { self.num.clone() } else { self.num.div_exact(&g1).unwrap() };
        let d = if g1.is_one() { rhs.den.clone() } else { rhs.den.div_exact(&g1).unwrap() };
        let c = if g2.is_one() { rhs.num.clone() } else { rhs.num.div_exact(&g2).unwrap() };
        let b = if g2.is_one() { self.den.clone() } else { self.den.div_exact(&g2).unwrap() };
        RatFunc::new(a.mul(&c), b.mul(&d)).expect("nonzero denominator")
    }

    pub fn inv(&self) -> Result<Self, RatFuncError> {
        if self.is_zero() {
            return Err(RatFuncError::ZeroInverse);
        }
        RatFunc::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, rhs: &Self) -> Result<Self, RatFuncError> {
        Ok(self.mul(&rhs.inv()?))
    }

    /// Nonnegative power; reduced input stays reduced, so no gcd is run.
    pub fn pow(&self, e: u64) -> Self {
        if e == 0 {
            return RatFunc::one(self.field().clone());
        }
        RatFunc { num: self.num.pow(e), den: self.den.pow(e) }
    }

    pub fn mul_scalar(&self, c: &F::Elem) -> Self {
        if self.field().is_zero(c) {
            return RatFunc::zero(self.field().clone());
        }
        RatFunc { num: self.num.mul_scalar(c), den: self.den.clone() }
    }

    /// Order of vanishing at a place; None encodes +infinity (the zero
    /// function). At a finite pseudo-place the valuation is served only when
    /// every irreducible factor of the place divides to the same order.
    pub fn valuation(&self, place: &Place<F>) -> Result<Option<i64>, RatFuncError> {
        if self.is_zero() {
            return Ok(None);
        }
        match place {
            Place::Infinity => {
                let dn = self.num.degree().unwrap_or(0) as i64;
                let dd = self.den.degree().unwrap_or(0) as i64;
                Ok(Some(dd - dn))
            }
            Place::Finite(pi) => {
                let vn = uniform_multiplicity(&self.num, pi)?;
                // The fraction is reduced, so at most one side is divisible.
                if vn > 0 {
                    return Ok(Some(vn as i64));
                }
                let vd = uniform_multiplicity(&self.den, pi)?;
                Ok(Some(-(vd as i64)))
            }
        }
    }

    /// Specialize t to a field element; None when the denominator vanishes.
    pub fn specialize(&self, a: &F::Elem) -> Option<F::Elem> {
        let d = self.den.eval(a);
        if self.field().is_zero(&d) {
            return None;
        }
        let n = self.num.eval(a);
        Some(self.field().div(&n, &d).expect("nonzero denominator value"))
    }
}

/// Multiplicity of `pi` in nonzero `f`, requiring it to be uniform across the
/// irreducible factors of `pi`: after stripping pi^k the cofactor must be
/// coprime to pi, else the pseudo-place is too coarse and must be refined.
fn uniform_multiplicity<F: Field>(f: &Poly<F>, pi: &Poly<F>) -> Result<u32, RatFuncError> {
    let k = f.factor_multiplicity(pi)?;
    let mut cof = f.clone();
    for _ in 0..k {
        cof = cof.div_exact(pi)?;
    }
    if !cof.gcd(pi)?.is_one() {
        return Err(RatFuncError::AmbiguousPlace(pi.to_string()));
    }
    Ok(k)
}

impl<F: Field> fmt::Display for RatFunc<F> {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(out, "{}", self.num);
        }
        write!(out, "({})/({})", self.num, self.den)
    }
}

impl<F: Field> fmt::Debug for RatFunc<F> {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(out, "RatFunc({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};

    fn gf(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn normalization_hand_example() {
        // (t^2+t)/(2t) over F_5 reduces to (3t+3)/1.
        let f5 = gf(5);
        let f = RatFunc::new(Poly::from_ints(f5, &[0, 1, 1]), Poly::from_ints(f5, &[0, 2])).unwrap();
        assert!(f.is_poly());
        assert_eq!(*f.num(), Poly::from_ints(f5, &[3, 3]));
    }

    #[test]
    fn valuation_at_infinity() {
        // v_inf(t^2/(t^3+1)) = 1.
        let q = Rationals;
        let f = RatFunc::new(Poly::from_ints(q, &[0, 0, 1]), Poly::from_ints(q, &[1, 0, 0, 1])).unwrap();
        assert_eq!(f.valuation(&Place::Infinity).unwrap(), Some(1));
        let zero = RatFunc::zero(q);
        assert_eq!(zero.valuation(&Place::Infinity).unwrap(), None);
    }

    #[test]
    fn valuation_at_finite_place() {
        // v_{t+1}(1/(t^2+2t+1)) = -2.
        let q = Rationals;
        let f = RatFunc::new(Poly::one(q), Poly::from_ints(q, &[1, 2, 1])).unwrap();
        let place = Place::finite(Poly::from_ints(q, &[1, 1])).unwrap();
        assert_eq!(f.valuation(&place).unwrap(), Some(-2));
    }

    #[test]
    fn ambiguous_pseudo_place_is_refused() {
        // t(t+1)^2 has mixed multiplicities across the factors of t^2+t.
        let q = Rationals;
        let f = RatFunc::from_poly(
            Poly::from_ints(q, &[0, 1]).mul(&Poly::from_ints(q, &[1, 1])).mul(&Poly::from_ints(q, &[1, 1])),
        );
        let place = Place::finite(Poly::from_ints(q, &[0, 1, 1])).unwrap();
        assert!(matches!(f.valuation(&place), Err(RatFuncError::AmbiguousPlace(_))));
    }

    #[test]
    fn arithmetic_round_trip() {
        let f5 = gf(5);
        let a = RatFunc::new(Poly::from_ints(f5, &[1, 1]), Poly::from_ints(f5, &[0, 1])).unwrap();
        let b = RatFunc::new(Poly::from_ints(f5, &[2]), Poly::from_ints(f5, &[1, 1])).unwrap();
        let s = a.add(&b);
        assert_eq!(s.sub(&b), a);
        let m = a.mul(&b);
        assert_eq!(m.div(&b).unwrap(), a);
    }

    #[test]
    fn specialize_skips_poles() {
        let f5 = gf(5);
        let f = RatFunc::new(Poly::one(f5), Poly::from_ints(f5, &[0, 1])).unwrap();
        assert_eq!(f.specialize(&0), None);
        assert_eq!(f.specialize(&2), Some(3));
    }

    #[test]
    fn display_wraps_fractions() {
        let f5 = gf(5);
        let f = RatFunc::new(Poly::from_ints(f5, &[1, 3]), Poly::from_ints(f5, &[2, 0, 1])).unwrap();
        assert_eq!(f.to_string(), "(3*t + 1)/(t^2 + 2)");
    }
}
