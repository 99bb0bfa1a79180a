//! Irreducible factorization over prime fields: squarefree decomposition,
//! then distinct-degree splitting, then randomized equal-degree splitting
//! with a seeded generator so every run is reproducible.

use crate::field::{Field, PrimeField, Rationals};
use crate::poly::{Poly, PolyError};
use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Seed used when the caller does not supply one; fixed so library-level
/// factorizations are deterministic.
pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FactorError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("equal-degree splitting failed to converge")]
    SplitExhausted,
}

/// Full factorization into monic irreducibles with multiplicities, sorted by
/// (degree, polynomial). The constant content is dropped.
pub fn factor_irreducible(
    f: &Poly<PrimeField>,
    seed: u64,
) -> Result<Vec<(Poly<PrimeField>, u32)>, FactorError> {
    let mut out = Vec::new();
    for (part, mult) in f.squarefree_decompose()? {
        for irr in split_squarefree(&part, seed)? {
            out.push((irr, mult));
        }
    }
    out.sort_by(|(g1, _), (g2, _)| g1.cmp(g2));
    Ok(out)
}

/// Split a monic squarefree polynomial into monic irreducibles.
pub fn split_squarefree(
    f: &Poly<PrimeField>,
    seed: u64,
) -> Result<Vec<Poly<PrimeField>>, FactorError> {
    if f.is_constant() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for (g, d) in distinct_degree(f)? {
        equal_degree(&g, d, seed, &mut out)?;
    }
    out.sort();
    Ok(out)
}

pub fn is_irreducible(f: &Poly<PrimeField>) -> Result<bool, FactorError> {
    match f.degree() {
        None | Some(0) => Ok(false),
        Some(1) => Ok(true),
        Some(_) => {
            if !f.is_squarefree()? {
                return Ok(false);
            }
            let (fm, _) = f.make_monic();
            let dd = distinct_degree(&fm)?;
            Ok(dd.len() == 1 && dd[0].1 as usize == fm.degree().unwrap())
        }
    }
}

/// Distinct-degree split: returns (product of irreducibles of degree d, d).
fn distinct_degree(f: &Poly<PrimeField>) -> Result<Vec<(Poly<PrimeField>, u32)>, FactorError> {
    let field = *f.field();
    let p = field.characteristic();
    let x = Poly::var(field);
    let mut h = x.divrem(f)?.1;
    let mut g = f.clone();
    let mut out = Vec::new();
    let mut d = 0u32;
    while g.degree().unwrap_or(0) >= 2 * (d as usize + 1) {
        d += 1;
        h = h.pow_mod(p, &g)?;
        let split = h.sub(&x.divrem(&g)?.1).gcd(&g)?;
        if !split.is_constant() {
            out.push((split.clone(), d));
            g = g.div_exact(&split)?;
            h = h.divrem(&g)?.1;
        }
    }
    if !g.is_constant() {
        let deg = g.degree().unwrap() as u32;
        out.push((g, deg));
    }
    Ok(out)
}

/// Cantor-Zassenhaus equal-degree splitting of a product of irreducibles all
/// of degree d. Degree-1 products over a small field fall back to a
/// deterministic root scan.
fn equal_degree(
    f: &Poly<PrimeField>,
    d: u32,
    seed: u64,
    out: &mut Vec<Poly<PrimeField>>,
) -> Result<(), FactorError> {
    let deg = f.degree().unwrap_or(0) as u32;
    if deg == 0 {
        return Ok(());
    }
    if deg == d {
        out.push(f.make_monic().0);
        return Ok(());
    }
    let field = *f.field();
    let p = field.characteristic();
    if d == 1 && p <= 4096 {
        // Deterministic: scan every element for roots.
        let mut rest = f.make_monic().0;
        for a in 0..p {
            if field.is_zero(&rest.eval(&a)) {
                let lin = Poly::new(field, vec![field.neg(&a), field.one()]);
                rest = rest.div_exact(&lin)?;
                out.push(lin);
                if rest.is_constant() {
                    return Ok(());
                }
            }
        }
        debug_assert!(rest.is_constant(), "degree-1 product must split over the base field");
        return Ok(());
    }
    // (p^d - 1)/2 needs big-integer exponents once p^d outgrows u64.
    let exp = (BigUint::from(p).pow(d) - BigUint::one()) / BigUint::from(2u32);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (u64::from(d) << 32) ^ deg as u64);
    for _ in 0..200 {
        let a = random_poly(&field, deg as usize, &mut rng);
        if a.is_constant() {
            continue;
        }
        let g0 = a.gcd(f)?;
        if !g0.is_constant() && g0.degree() < f.degree() {
            equal_degree(&g0, d, seed, out)?;
            equal_degree(&f.div_exact(&g0)?, d, seed, out)?;
            return Ok(());
        }
        let b = pow_mod_big(&a, &exp, f)?;
        let g = b.sub(&Poly::one(field)).gcd(f)?;
        if !g.is_constant() && g.degree() < f.degree() {
            equal_degree(&g, d, seed, out)?;
            equal_degree(&f.div_exact(&g)?, d, seed, out)?;
            return Ok(());
        }
    }
    Err(FactorError::SplitExhausted)
}

fn random_poly(field: &PrimeField, below_degree: usize, rng: &mut ChaCha8Rng) -> Poly<PrimeField> {
    let p = field.characteristic();
    let coeffs: Vec<u64> = (0..below_degree).map(|_| rng.gen_range(0..p)).collect();
    Poly::new(*field, coeffs)
}

fn pow_mod_big(
    base: &Poly<PrimeField>,
    exp: &BigUint,
    m: &Poly<PrimeField>,
) -> Result<Poly<PrimeField>, FactorError> {
    let field = *base.field();
    let mut acc = Poly::one(field);
    if exp.is_zero() {
        return Ok(acc);
    }
    let mut b = base.divrem(m)?.1;
    let bits = exp.bits();
    for i in 0..bits {
        if exp.bit(i) {
            acc = acc.mul(&b).divrem(m)?.1;
        }
        if i + 1 < bits {
            b = b.mul(&b).divrem(m)?.1;
        }
    }
    Ok(acc)
}

/// Finest refinement of a monic squarefree polynomial into pairwise coprime
/// place polynomials: irreducibles over F_p, the identity over Q (where no
/// polynomial factorization is attempted).
pub trait PlaceSplit: Field + Sized {
    fn split_place(f: &Poly<Self>, seed: u64) -> Result<Vec<Poly<Self>>, FactorError>;
    /// True when split_place yields genuine irreducibles.
    const SPLITS_TO_IRREDUCIBLE: bool;
}

impl PlaceSplit for PrimeField {
    fn split_place(f: &Poly<Self>, seed: u64) -> Result<Vec<Poly<Self>>, FactorError> {
        split_squarefree(f, seed)
    }
    const SPLITS_TO_IRREDUCIBLE: bool = true;
}

impl PlaceSplit for Rationals {
    fn split_place(f: &Poly<Self>, _seed: u64) -> Result<Vec<Poly<Self>>, FactorError> {
        if f.is_constant() {
            Ok(Vec::new())
        } else {
            Ok(vec![f.make_monic().0])
        }
    }
    const SPLITS_TO_IRREDUCIBLE: bool = false;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn quadratic_split_matches_hand_example() {
        // t^2 + 1 = (t+2)(t+3) over F_5.
        let f5 = gf(5);
        let f = Poly::from_ints(f5, &[1, 0, 1]);
        let factors = factor_irreducible(&f, DEFAULT_SEED).unwrap();
        assert_eq!(
            factors,
            vec![(Poly::from_ints(f5, &[2, 1]), 1), (Poly::from_ints(f5, &[3, 1]), 1)]
        );
    }

    #[test]
    fn irreducible_quadratic_stays_whole() {
        // t^2 + 1 is irreducible over F_3.
        let f3 = gf(3);
        let f = Poly::from_ints(f3, &[1, 0, 1]);
        assert!(is_irreducible(&f).unwrap());
        let factors = factor_irreducible(&f, DEFAULT_SEED).unwrap();
        assert_eq!(factors, vec![(Poly::from_ints(f3, &[1, 0, 1]), 1)]);
    }

    #[test]
    fn multiplicities_survive_factoring() {
        let f7 = gf(7);
        let f = Poly::from_ints(f7, &[3, 1])
            .pow(2)
            .mul(&Poly::from_ints(f7, &[0, 1]))
            .mul(&Poly::from_ints(f7, &[1, 0, 1]).pow(3));
        let factors = factor_irreducible(&f, DEFAULT_SEED).unwrap();
        let rebuilt = factors
            .iter()
            .fold(Poly::one(f7), |acc, (g, m)| acc.mul(&g.pow(u64::from(*m))));
        assert_eq!(rebuilt, f.make_monic().0);
        assert!(factors.iter().all(|(g, _)| is_irreducible(g).unwrap()));
    }

    #[test]
    fn big_exponent_path_splits_higher_degree() {
        // x^4 + 1 over F_13 splits into quadratics (13^2 - 1 fits u64, but the
        // code path is shared with the BigUint exponent).
        let f13 = gf(13);
        let f = Poly::from_ints(f13, &[1, 0, 0, 0, 1]);
        let factors = factor_irreducible(&f, DEFAULT_SEED).unwrap();
        let rebuilt = factors
            .iter()
            .fold(Poly::one(f13), |acc, (g, m)| acc.mul(&g.pow(u64::from(*m))));
        assert_eq!(rebuilt, f);
        for (g, _) in &factors {
            assert!(is_irreducible(g).unwrap());
        }
    }

    #[test]
    fn rationals_split_is_identity() {
        let q = Rationals;
        let f = Poly::from_ints(q, &[1, 0, 1]);
        assert_eq!(Rationals::split_place(&f, 0).unwrap(), vec![f]);
    }
}
