//! Dense univariate polynomials in t over a coefficient field.
//!
//! Coefficients are stored lowest degree first with no trailing zeros; the
//! zero polynomial has an empty coefficient vector. Algorithms are schoolbook
//! throughout; the prime-field multiplication and division kernels defer
//! modular reduction so the inner loops stay in plain machine arithmetic.

use crate::field::Field;
use std::cmp::Ordering;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("operands live over different fields")]
    FieldMismatch,
    #[error("operation requires a nonzero polynomial")]
    ZeroOperand,
    #[error("exact division left a nonzero remainder")]
    NotDivisible,
    #[error("not a perfect p-th power: {0}")]
    NotAPthPower(String),
}

#[derive(Clone)]
pub struct Poly<F: Field> {
    field: F,
    coeffs: Vec<F::Elem>,
}

impl<F: Field> PartialEq for Poly<F> {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.coeffs == other.coeffs
    }
}

impl<F: Field> Eq for Poly<F> {}

/// Canonical order: by degree, then coefficients from the highest degree
/// down. Used wherever places must be listed deterministically.
impl<F: Field> Ord for Poly<F> {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.coeffs.len().cmp(&other.coeffs.len()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        for (a, b) in self.coeffs.iter().rev().zip(other.coeffs.iter().rev()) {
            match a.cmp(b) {
                Ordering::Equal => {}
                ord => return ord,
            }
        }
        Ordering::Equal
    }
}

impl<F: Field> PartialOrd for Poly<F> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<F: Field> Poly<F> {
    pub fn new(field: F, mut coeffs: Vec<F::Elem>) -> Self {
        while coeffs.last().map_or(false, |c| field.is_zero(c)) {
            coeffs.pop();
        }
        Poly { field, coeffs }
    }

    pub fn zero(field: F) -> Self {
        Poly { field, coeffs: Vec::new() }
    }

    pub fn one(field: F) -> Self {
        let one = field.one();
        Poly { field, coeffs: vec![one] }
    }

    pub fn constant(field: F, c: F::Elem) -> Self {
        Poly::new(field, vec![c])
    }

    /// The variable t.
    pub fn var(field: F) -> Self {
        let coeffs = vec![field.zero(), field.one()];
        Poly { field, coeffs }
    }

    pub fn monomial(field: F, c: F::Elem, deg: usize) -> Self {
        if field.is_zero(&c) {
            return Poly::zero(field);
        }
        let mut coeffs = vec![field.zero(); deg + 1];
        coeffs[deg] = c;
        Poly { field, coeffs }
    }

    /// Convenience constructor from integer coefficients, lowest degree first.
    pub fn from_ints(field: F, coeffs: &[i64]) -> Self {
        let elems = coeffs.iter().map(|&n| field.from_i64(n)).collect();
        Poly::new(field, elems)
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn coeffs(&self) -> &[F::Elem] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == self.field.one()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with deg 0 for constants; caller must exclude the zero polynomial.
    pub fn degree_or(&self, zero_value: i64) -> i64 {
        self.degree().map_or(zero_value, |d| d as i64)
    }

    pub fn leading(&self) -> Option<&F::Elem> {
        self.coeffs.last()
    }

    pub fn coeff(&self, i: usize) -> F::Elem {
        self.coeffs.get(i).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == Some(&self.field.one())
    }

    pub fn same_field(&self, other: &Self) -> Result<(), PolyError> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(PolyError::FieldMismatch)
        }
    }

    fn assert_same_field(&self, other: &Self) {
        assert!(self.field == other.field, "polynomial field mismatch");
    }

    pub fn neg(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|c| self.field.neg(c)).collect();
        Poly { field: self.field.clone(), coeffs }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.assert_same_field(rhs);
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for i in 0..n {
            coeffs.push(self.field.add(&self.coeff(i), &rhs.coeff(i)));
        }
        Poly::new(self.field.clone(), coeffs)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.assert_same_field(rhs);
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for i in 0..n {
            coeffs.push(self.field.sub(&self.coeff(i), &rhs.coeff(i)));
        }
        Poly::new(self.field.clone(), coeffs)
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        self.assert_same_field(rhs);
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero(self.field.clone());
        }
        let coeffs = self.field.poly_mul(&self.coeffs, &rhs.coeffs);
        Poly::new(self.field.clone(), coeffs)
    }

    pub fn mul_scalar(&self, c: &F::Elem) -> Self {
        if self.field.is_zero(c) {
            return Poly::zero(self.field.clone());
        }
        let coeffs = self.coeffs.iter().map(|a| self.field.mul(a, c)).collect();
        Poly::new(self.field.clone(), coeffs)
    }

    /// Multiplication by t^k.
    pub fn shifted(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![self.field.zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly { field: self.field.clone(), coeffs }
    }

    pub fn divrem(&self, den: &Self) -> Result<(Self, Self), PolyError> {
        self.same_field(den)?;
        if den.is_zero() {
            return Err(PolyError::DivisionByZero);
        }
        if self.coeffs.len() < den.coeffs.len() {
            return Ok((Poly::zero(self.field.clone()), self.clone()));
        }
        let (q, r) = self.field.poly_divrem(&self.coeffs, &den.coeffs);
        Ok((Poly::new(self.field.clone(), q), Poly::new(self.field.clone(), r)))
    }

    /// Exact division; error if the remainder is nonzero.
    pub fn div_exact(&self, den: &Self) -> Result<Self, PolyError> {
        let (q, r) = self.divrem(den)?;
        if r.is_zero() {
            Ok(q)
        } else {
            Err(PolyError::NotDivisible)
        }
    }

    pub fn make_monic(&self) -> (Self, F::Elem) {
        match self.leading() {
            None => (self.clone(), self.field.one()),
            Some(lc) => {
                let lc = lc.clone();
                let inv = self.field.inv(&lc).expect("nonzero leading coefficient");
                (self.mul_scalar(&inv), lc)
            }
        }
    }

    /// Monic gcd; gcd(0, 0) = 0.
    pub fn gcd(&self, other: &Self) -> Result<Self, PolyError> {
        self.same_field(other)?;
        if self.is_zero() {
            return Ok(other.make_monic().0);
        }
        if other.is_zero() {
            return Ok(self.make_monic().0);
        }
        let coeffs = self.field.poly_gcd(&self.coeffs, &other.coeffs);
        Ok(Poly::new(self.field.clone(), coeffs).make_monic().0)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Poly::zero(self.field.clone());
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len() - 1);
        for (i, c) in self.coeffs.iter().enumerate().skip(1) {
            let k = self.field.from_i64(i as i64);
            coeffs.push(self.field.mul(&k, c));
        }
        Poly::new(self.field.clone(), coeffs)
    }

    pub fn eval(&self, x: &F::Elem) -> F::Elem {
        let mut acc = self.field.zero();
        for c in self.coeffs.iter().rev() {
            acc = self.field.add(&self.field.mul(&acc, x), c);
        }
        acc
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Poly::one(self.field.clone());
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

    /// self^e mod m by square and multiply.
    pub fn pow_mod(&self, mut e: u64, m: &Self) -> Result<Self, PolyError> {
        let mut base = self.divrem(m)?.1;
        let mut acc = Poly::one(self.field.clone());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).divrem(m)?.1;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).divrem(m)?.1;
            }
        }
        Ok(acc)
    }

    /// Multiplicity of `d` as a factor of `self`; `self` nonzero, `d` nonconstant.
    pub fn factor_multiplicity(&self, d: &Self) -> Result<u32, PolyError> {
        if self.is_zero() || d.is_constant() {
            return Err(PolyError::ZeroOperand);
        }
        let mut f = self.clone();
        let mut k = 0u32;
        loop {
            let (q, r) = f.divrem(d)?;
            if !r.is_zero() {
                return Ok(k);
            }
            k += 1;
            f = q;
        }
    }

    /// Squarefree decomposition of a nonzero polynomial: pairwise coprime
    /// monic squarefree parts with their multiplicities, sorted by
    /// (multiplicity, polynomial). The constant content is dropped.
    pub fn squarefree_decompose(&self) -> Result<Vec<(Self, u32)>, PolyError> {
        if self.is_zero() {
            return Err(PolyError::ZeroOperand);
        }
        let (f, _) = self.make_monic();
        let mut parts = if self.field.characteristic() == 0 {
            yun_decompose(&f)?
        } else {
            char_p_decompose(&f)?
        };
        parts.retain(|(g, _)| !g.is_constant());
        parts.sort_by(|(g1, m1), (g2, m2)| m1.cmp(m2).then_with(|| g1.cmp(g2)));
        Ok(parts)
    }

    /// Radical: the monic product of the distinct irreducible factors.
    pub fn squarefree_part(&self) -> Result<Self, PolyError> {
        let mut acc = Poly::one(self.field.clone());
        for (g, _) in self.squarefree_decompose()? {
            acc = acc.mul(&g);
        }
        Ok(acc)
    }

    pub fn is_squarefree(&self) -> Result<bool, PolyError> {
        if self.is_zero() {
            return Err(PolyError::ZeroOperand);
        }
        if self.is_constant() {
            return Ok(true);
        }
        let d = self.derivative();
        if d.is_zero() {
            // p-th power of a nonconstant polynomial.
            return Ok(false);
        }
        Ok(self.gcd(&d)?.is_one())
    }
}

/// Yun's algorithm, characteristic zero.
fn yun_decompose<F: Field>(f: &Poly<F>) -> Result<Vec<(Poly<F>, u32)>, PolyError> {
    let df = f.derivative();
    if df.is_zero() {
        // Constant input.
        return Ok(Vec::new());
    }
    let a = f.gcd(&df)?;
    let mut b = f.div_exact(&a)?;
    let mut c = df.div_exact(&a)?;
    let mut d = c.sub(&b.derivative());
    let mut out = Vec::new();
    let mut i = 1u32;
    while !b.is_constant() {
        let p = b.gcd(&d)?;
        if !p.is_constant() {
            out.push((p.clone(), i));
        }
        b = b.div_exact(&p)?;
        c = d.div_exact(&p)?;
        d = c.sub(&b.derivative());
        i += 1;
    }
    Ok(out)
}

/// Characteristic-p decomposition; peels prime-to-p multiplicities, then
/// recurses on the p-th power part via the Frobenius root.
fn char_p_decompose<F: Field>(f: &Poly<F>) -> Result<Vec<(Poly<F>, u32)>, PolyError> {
    let p = f.field().characteristic();
    debug_assert!(p > 0);
    if f.is_constant() {
        return Ok(Vec::new());
    }
    let df = f.derivative();
    if df.is_zero() {
        let root = pth_root(f)?;
        let inner = char_p_decompose(&root)?;
        return Ok(inner.into_iter().map(|(g, m)| (g, m * p as u32)).collect());
    }
    let mut out = Vec::new();
    let mut c = f.gcd(&df)?;
    let mut w = f.div_exact(&c)?;
    let mut i = 1u32;
    while !w.is_constant() {
        let y = w.gcd(&c)?;
        let z = w.div_exact(&y)?;
        if !z.is_constant() {
            out.push((z, i));
        }
        w = y;
        c = c.div_exact(&w)?;
        i += 1;
    }
    if !c.is_constant() {
        let root = pth_root(&c)?;
        let inner = char_p_decompose(&root)?;
        out.extend(inner.into_iter().map(|(g, m)| (g, m * p as u32)));
    }
    Ok(out)
}

/// p-th root of a polynomial in t^p over the prime field, where the Frobenius
/// fixes every coefficient.
fn pth_root<F: Field>(f: &Poly<F>) -> Result<Poly<F>, PolyError> {
    let p = f.field().characteristic() as usize;
    let mut coeffs = Vec::with_capacity(f.coeffs().len() / p + 1);
    for (i, c) in f.coeffs().iter().enumerate() {
        if i % p == 0 {
            coeffs.push(c.clone());
        } else if !f.field().is_zero(c) {
            return Err(PolyError::NotAPthPower(format!("{f}")));
        }
    }
    Ok(Poly::new(f.field().clone(), coeffs))
}

impl<F: Field> fmt::Display for Poly<F> {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(out, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if self.field.is_zero(c) {
                continue;
            }
            let (neg, mag) = self.field.fmt_parts(c);
            if first {
                if neg {
                    write!(out, "-")?;
                }
                first = false;
            } else if neg {
                write!(out, " - ")?;
            } else {
                write!(out, " + ")?;
            }
            let coeff_is_one = mag == "1";
            match (i, coeff_is_one) {
                (0, _) => write!(out, "{mag}")?,
                (1, true) => write!(out, "t")?,
                (1, false) => write!(out, "{mag}*t")?,
                (_, true) => write!(out, "t^{i}")?,
                (_, false) => write!(out, "{mag}*t^{i}")?,
            }
        }
        Ok(())
    }
}

impl<F: Field> fmt::Debug for Poly<F> {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(out, "Poly({self})")
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
    fn mul_matches_hand_example() {
        // (t+2)(t+3) = t^2 + 1 over F_5.
        let f5 = gf(5);
        let a = Poly::from_ints(f5, &[2, 1]);
        let b = Poly::from_ints(f5, &[3, 1]);
        assert_eq!(a.mul(&b), Poly::from_ints(f5, &[1, 0, 1]));
    }

    #[test]
    fn divrem_hand_example_over_q() {
        // (t^3+1) / (t+1) = t^2 - t + 1 rem 0.
        let q = Rationals;
        let num = Poly::from_ints(q, &[1, 0, 0, 1]);
        let den = Poly::from_ints(q, &[1, 1]);
        let (quot, rem) = num.divrem(&den).unwrap();
        assert_eq!(quot, Poly::from_ints(q, &[1, -1, 1]));
        assert!(rem.is_zero());
    }

    #[test]
    fn gcd_hand_example() {
        // gcd(t^2+t, t+1) = t+1 over F_5.
        let f5 = gf(5);
        let a = Poly::from_ints(f5, &[0, 1, 1]);
        let b = Poly::from_ints(f5, &[1, 1]);
        assert_eq!(a.gcd(&b).unwrap(), Poly::from_ints(f5, &[1, 1]));
    }

    #[test]
    fn divrem_against_generic_kernel() {
        // The lazy prime-field kernel must agree with the generic one.
        let f5 = gf(5);
        let num = Poly::from_ints(f5, &[3, 1, 4, 1, 2, 0, 1, 3]);
        let den = Poly::from_ints(f5, &[1, 2, 3]);
        let (q, r) = num.divrem(&den).unwrap();
        assert_eq!(q.mul(&den).add(&r), num);
        assert!(r.degree() < den.degree());
    }

    #[test]
    fn squarefree_decompose_examples() {
        let f5 = gf(5);
        // t^3 + t^2 = t^2 (t+1).
        let f = Poly::from_ints(f5, &[0, 0, 1, 1]);
        let parts = f.squarefree_decompose().unwrap();
        assert_eq!(
            parts,
            vec![(Poly::from_ints(f5, &[1, 1]), 1), (Poly::from_ints(f5, &[0, 1]), 2)]
        );
        // t^5 over F_5 is a Frobenius power.
        let f = Poly::from_ints(f5, &[0, 0, 0, 0, 0, 1]);
        assert_eq!(f.squarefree_decompose().unwrap(), vec![(Poly::from_ints(f5, &[0, 1]), 5)]);
    }

    #[test]
    fn squarefree_decompose_char_zero() {
        let q = Rationals;
        // (t-1)^2 (t^2+1)
        let f = Poly::from_ints(q, &[1, -1])
            .mul(&Poly::from_ints(q, &[1, -1]))
            .mul(&Poly::from_ints(q, &[1, 0, 1]));
        let parts = f.squarefree_decompose().unwrap();
        assert_eq!(
            parts,
            vec![(Poly::from_ints(q, &[1, 0, 1]), 1), (Poly::from_ints(q, &[-1, 1]), 2)]
        );
    }

    #[test]
    fn display_canonical_form() {
        let f5 = gf(5);
        assert_eq!(Poly::from_ints(f5, &[1, 0, 3]).to_string(), "3*t^2 + 1");
        assert_eq!(Poly::from_ints(f5, &[0, -1]).to_string(), "4*t");
        assert_eq!(Poly::<PrimeField>::zero(f5).to_string(), "0");
        let q = Rationals;
        assert_eq!(Poly::from_ints(q, &[-2, 0, 1]).to_string(), "t^2 - 2");
        let half = Poly::new(q, vec![Rationals.div(&Rationals.one(), &Rationals.from_i64(-2)).unwrap()]);
        assert_eq!(half.to_string(), "-1/2");
    }

    #[test]
    fn eval_and_derivative() {
        let f7 = gf(7);
        let f = Poly::from_ints(f7, &[1, 2, 3]);
        assert_eq!(f.eval(&2), (1 + 4 + 12) % 7);
        assert_eq!(f.derivative(), Poly::from_ints(f7, &[2, 6]));
    }

    #[test]
    fn factor_multiplicity_counts() {
        let f5 = gf(5);
        let t = Poly::var(f5);
        let f = t.pow(3).mul(&Poly::from_ints(f5, &[1, 1]));
        assert_eq!(f.factor_multiplicity(&t).unwrap(), 3);
        assert_eq!(f.factor_multiplicity(&Poly::from_ints(f5, &[1, 1])).unwrap(), 1);
        assert_eq!(f.factor_multiplicity(&Poly::from_ints(f5, &[2, 1])).unwrap(), 0);
    }
}
