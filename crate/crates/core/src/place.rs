//! Places of the projective t-line and radical support bookkeeping.
//!
//! A finite place is a monic squarefree nonconstant polynomial: irreducible
//! over F_p, or a pseudo-place bundling unresolved conjugate factors over Q,
//! where no polynomial factorization is attempted. The point at infinity is
//! its own place. Support sets store one squarefree radical polynomial plus
//! an infinity flag, so membership and novelty are plain gcd algebra.

use crate::field::Field;
use crate::poly::{Poly, PolyError};
use std::cmp::Ordering;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PlaceError {
    #[error("finite place must be monic, got {0}")]
    NotMonic(String),
    #[error("finite place must be nonconstant")]
    Constant,
    #[error("finite place must be squarefree, got {0}")]
    NotSquarefree(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Clone, PartialEq, Eq)]
pub enum Place<F: Field> {
    Finite(Poly<F>),
    Infinity,
}

impl<F: Field> Place<F> {
    pub fn finite(poly: Poly<F>) -> Result<Self, PlaceError> {
        if poly.is_constant() {
            return Err(PlaceError::Constant);
        }
        if !poly.is_monic() {
            return Err(PlaceError::NotMonic(poly.to_string()));
        }
        if !poly.is_squarefree()? {
            return Err(PlaceError::NotSquarefree(poly.to_string()));
        }
        Ok(Place::Finite(poly))
    }

    pub fn degree(&self) -> u64 {
        match self {
            Place::Infinity => 1,
            Place::Finite(f) => f.degree().unwrap_or(0) as u64,
        }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, Place::Infinity)
    }

    pub fn as_finite(&self) -> Option<&Poly<F>> {
        match self {
            Place::Finite(f) => Some(f),
            Place::Infinity => None,
        }
    }
}

/// Finite places first in polynomial order, infinity last.
impl<F: Field> Ord for Place<F> {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Place::Finite(a), Place::Finite(b)) => a.cmp(b),
            (Place::Finite(_), Place::Infinity) => Ordering::Less,
            (Place::Infinity, Place::Finite(_)) => Ordering::Greater,
            (Place::Infinity, Place::Infinity) => Ordering::Equal,
        }
    }
}

impl<F: Field> PartialOrd for Place<F> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<F: Field> fmt::Display for Place<F> {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Infinity => write!(out, "inf"),
            Place::Finite(f) => write!(out, "{f}"),
        }
    }
}

impl<F: Field> fmt::Debug for Place<F> {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(out, "Place({self})")
    }
}

/// Radical of a divisor's support: squarefree monic finite part (1 when
/// empty) plus an infinity flag.
#[derive(Clone, PartialEq, Eq)]
pub struct SupportSet<F: Field> {
    finite_part: Poly<F>,
    at_infinity: bool,
}

impl<F: Field> SupportSet<F> {
    pub fn empty(field: F) -> Self {
        SupportSet { finite_part: Poly::one(field), at_infinity: false }
    }

    /// `finite_part` is made monic; it must be squarefree and nonzero.
    pub fn new(finite_part: Poly<F>, at_infinity: bool) -> Result<Self, PlaceError> {
        if finite_part.is_zero() {
            return Err(PlaceError::Poly(PolyError::ZeroOperand));
        }
        if !finite_part.is_squarefree()? {
            return Err(PlaceError::NotSquarefree(finite_part.to_string()));
        }
        Ok(SupportSet { finite_part: finite_part.make_monic().0, at_infinity })
    }

    pub fn finite_part(&self) -> &Poly<F> {
        &self.finite_part
    }

    pub fn at_infinity(&self) -> bool {
        self.at_infinity
    }

    pub fn is_empty(&self) -> bool {
        self.finite_part.is_one() && !self.at_infinity
    }

    pub fn field(&self) -> &F {
        self.finite_part.field()
    }

    /// Every irreducible factor of the place divides the finite part.
    pub fn contains(&self, place: &Place<F>) -> Result<bool, PolyError> {
        match place {
            Place::Infinity => Ok(self.at_infinity),
            Place::Finite(f) => Ok(self.finite_part.factor_multiplicity(f)? > 0),
        }
    }

    pub fn union(&self, other: &Self) -> Result<Self, PolyError> {
        let g = self.finite_part.gcd(&other.finite_part)?;
        let finite_part = self.finite_part.mul(&other.finite_part.div_exact(&g)?);
        Ok(SupportSet { finite_part, at_infinity: self.at_infinity || other.at_infinity })
    }

    /// Every closed point of self lies in other; plain gcd algebra since
    /// both finite parts are monic squarefree.
    pub fn is_subset(&self, other: &Self) -> Result<bool, PolyError> {
        if self.at_infinity && !other.at_infinity {
            return Ok(false);
        }
        Ok(self.finite_part.gcd(&other.finite_part)? == self.finite_part)
    }

    /// Total degree of the support, counting infinity as degree 1.
    pub fn degree(&self) -> u64 {
        self.finite_part.degree().unwrap_or(0) as u64 + u64::from(self.at_infinity)
    }
}

impl<F: Field> fmt::Debug for SupportSet<F> {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(out, "SupportSet({}, inf: {})", self.finite_part, self.at_infinity)
    }
}

/// The part of `current` no closed point of which appears in `accumulated`:
/// divide out common factors until nothing is shared. Infinity is new exactly
/// when current has it and accumulated does not.
pub fn new_support_part<F: Field>(
    current: &SupportSet<F>,
    accumulated: &SupportSet<F>,
) -> Result<SupportSet<F>, PolyError> {
    let mut finite = current.finite_part.clone();
    loop {
        let g = finite.gcd(&accumulated.finite_part)?;
        if g.is_one() {
            break;
        }
        finite = finite.div_exact(&g)?;
    }
    Ok(SupportSet {
        finite_part: finite,
        at_infinity: current.at_infinity && !accumulated.at_infinity,
    })
}

/// Pairwise-coprime refinement (gcd-free basis) of squarefree parts of the
/// inputs. Each nonconstant input becomes an exact product of basis elements;
/// constants and zeros are skipped.
pub fn coprime_refine<F: Field>(inputs: &[Poly<F>]) -> Result<Vec<Poly<F>>, PolyError> {
    let mut basis: Vec<Poly<F>> = Vec::new();
    for input in inputs {
        if input.is_zero() || input.is_constant() {
            continue;
        }
        // One forward scan suffices: f is squarefree, so once a common factor
        // g is divided out the rest of f is coprime to g, including the g
        // pieces appended at the tail.
        let mut f = input.squarefree_part()?;
        let mut i = 0;
        while i < basis.len() && !f.is_constant() {
            let g = f.gcd(&basis[i])?;
            if !g.is_one() {
                f = f.div_exact(&g)?;
                if g != basis[i] {
                    let rest = basis[i].div_exact(&g)?;
                    basis[i] = g;
                    basis.push(rest);
                }
            }
            i += 1;
        }
        if !f.is_constant() {
            basis.push(f);
        }
    }
    basis.sort();
    Ok(basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};

    fn gf(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn place_validation() {
        let f5 = gf(5);
        assert!(Place::finite(Poly::from_ints(f5, &[1, 1])).is_ok());
        assert!(Place::finite(Poly::from_ints(f5, &[2])).is_err());
        assert!(Place::finite(Poly::from_ints(f5, &[1, 2])).is_err());
        let sq = Poly::from_ints(f5, &[1, 1]).pow(2);
        assert!(Place::finite(sq).is_err());
    }

    #[test]
    fn new_support_subtracts_old_places() {
        let f5 = gf(5);
        let t = Poly::var(f5);
        let t1 = Poly::from_ints(f5, &[1, 1]);
        let cur = SupportSet::new(t.mul(&t1), true).unwrap();
        let acc = SupportSet::new(t.clone(), false).unwrap();
        let new = new_support_part(&cur, &acc).unwrap();
        assert_eq!(*new.finite_part(), t1);
        assert!(new.at_infinity());
        let nothing = new_support_part(&cur, &cur).unwrap();
        assert!(nothing.is_empty());
    }

    #[test]
    fn union_is_radical() {
        let f5 = gf(5);
        let t = Poly::var(f5);
        let t1 = Poly::from_ints(f5, &[1, 1]);
        let a = SupportSet::new(t.mul(&t1), false).unwrap();
        let b = SupportSet::new(t1.mul(&Poly::from_ints(f5, &[2, 1])), true).unwrap();
        let u = a.union(&b).unwrap();
        assert!(u.finite_part().is_squarefree().unwrap());
        assert_eq!(u.finite_part().degree(), Some(3));
        assert!(u.at_infinity());
    }

    #[test]
    fn refinement_produces_coprime_basis() {
        let q = Rationals;
        let a = Poly::from_ints(q, &[0, 1]).mul(&Poly::from_ints(q, &[1, 1]));
        let b = Poly::from_ints(q, &[1, 1]).mul(&Poly::from_ints(q, &[1, 0, 1]));
        let basis = coprime_refine(&[a.clone(), b.clone()]).unwrap();
        assert_eq!(basis.len(), 3);
        for (i, f) in basis.iter().enumerate() {
            for g in &basis[i + 1..] {
                assert!(f.gcd(g).unwrap().is_one());
            }
        }
        // Each input is an exact product of basis elements.
        for input in [a, b] {
            let mut rem = input;
            for f in &basis {
                while rem.factor_multiplicity(f).unwrap() > 0 {
                    rem = rem.div_exact(f).unwrap();
                }
            }
            assert!(rem.is_constant());
        }
    }
}
