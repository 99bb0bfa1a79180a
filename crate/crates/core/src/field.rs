//! Coefficient fields for function-field arithmetic.
//!
//! Everything downstream (polynomials, rational functions, curves, divisors)
//! is generic over [`Field`]. Two fields are provided: [`PrimeField`] with a
//! runtime odd prime modulus, and [`Rationals`] backed by exact big rationals.
//! Elements do not carry their field; operations take the field as context so
//! that a runtime modulus costs one word per field value, not one per element.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// Abstraction over the exact coefficient fields the library supports.
///
/// `Elem` is plain data; all arithmetic goes through the field so a runtime
/// modulus is possible. Implementations must be exact: no rounding anywhere.
pub trait Field: Clone + Eq + fmt::Debug {
    type Elem: Clone + Eq + Ord + fmt::Debug;

    /// 0 for the rationals, p for a prime field.
    fn characteristic(&self) -> u64;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;

    /// None exactly when `a` is zero.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;

    fn from_i64(&self, n: i64) -> Self::Elem;

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem> {
        self.inv(b).map(|bi| self.mul(a, &bi))
    }

    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Sign-and-magnitude split for rendering. Prime-field elements are
    /// canonical representatives in 0..p and never negative.
    fn fmt_parts(&self, a: &Self::Elem) -> (bool, String);

    fn fmt_elem(&self, a: &Self::Elem) -> String {
        let (neg, mag) = self.fmt_parts(a);
        if neg {
            format!("-{mag}")
        } else {
            mag
        }
    }

    // Coefficient-slice kernels for dense polynomial arithmetic. The defaults
    // are schoolbook over field ops; the prime field overrides them with
    // lazily reduced machine arithmetic.

    /// Dense convolution of nonempty coefficient slices (untrimmed output).
    fn poly_mul(&self, a: &[Self::Elem], b: &[Self::Elem]) -> Vec<Self::Elem> {
        let mut out = vec![self.zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if self.is_zero(x) {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                out[i + j] = self.add(&out[i + j], &self.mul(x, y));
            }
        }
        out
    }

    /// Quotient and remainder; `den` nonzero, `num.len() >= den.len()`.
    fn poly_divrem(
        &self,
        num: &[Self::Elem],
        den: &[Self::Elem],
    ) -> (Vec<Self::Elem>, Vec<Self::Elem>) {
        let dd = den.len() - 1;
        let lc_inv = self.inv(&den[dd]).expect("nonzero leading coefficient");
        let mut rem: Vec<Self::Elem> = num.to_vec();
        let qlen = num.len() - dd;
        let mut quot = vec![self.zero(); qlen];
        for k in (0..qlen).rev() {
            let q = self.mul(&rem[k + dd], &lc_inv);
            if self.is_zero(&q) {
                continue;
            }
            for (j, d) in den.iter().enumerate() {
                let t = self.mul(&q, d);
                rem[k + j] = self.sub(&rem[k + j], &t);
            }
            quot[k] = q;
        }
        rem.truncate(dd);
        (quot, rem)
    }

    /// Some scalar multiple of gcd(a, b) for nonzero trimmed inputs, trimmed.
    /// The default is Euclid with monic normalization at each step; the
    /// rationals override it with an integer primitive-remainder sequence
    /// because fraction arithmetic swells badly under plain Euclid.
    fn poly_gcd(&self, a: &[Self::Elem], b: &[Self::Elem]) -> Vec<Self::Elem> {
        let trim = |mut v: Vec<Self::Elem>| {
            while v.last().is_some_and(|c| self.is_zero(c)) {
                v.pop();
            }
            v
        };
        let mut x = trim(a.to_vec());
        let mut y = trim(b.to_vec());
        while !y.is_empty() {
            let lc_inv = self.inv(y.last().unwrap()).expect("trimmed nonzero");
            for c in &mut y {
                *c = self.mul(c, &lc_inv);
            }
            let r = if x.len() < y.len() {
                x.clone()
            } else {
                trim(self.poly_divrem(&x, &y).1)
            };
            x = y;
            y = r;
        }
        x
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FieldError {
    #[error("modulus {0} is not an odd prime >= 3")]
    NotAnOddPrime(u64),
    #[error("modulus {0} exceeds the supported bound 2^31")]
    ModulusTooLarge(u64),
    #[error("characteristic mismatch: {0} vs {1}")]
    CharMismatch(u64, u64),
}

/// F_p for an odd prime p with 3 <= p < 2^31. Elements are canonical
/// representatives stored as u64, so products fit in u64 before reduction.
#[derive(Clone, Copy, PartialEq, Eq, Debug, PartialOrd, Ord)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if p >= 1 << 31 {
            return Err(FieldError::ModulusTooLarge(p));
        }
        if p < 3 || p % 2 == 0 || !is_prime_u64(p) {
            return Err(FieldError::NotAnOddPrime(p));
        }
        Ok(PrimeField { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn elem(&self, n: i64) -> u64 {
        self.from_i64(n)
    }
}

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.checked_mul(d).map_or(false, |sq| sq <= n) {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

impl Field for PrimeField {
    type Elem = u64;

    fn characteristic(&self) -> u64 {
        self.p
    }

    fn zero(&self) -> u64 {
        0
    }

    fn one(&self) -> u64 {
        1
    }

    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }

    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }

    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b % self.p
    }

    fn inv(&self, a: &u64) -> Option<u64> {
        if *a == 0 {
            return None;
        }
        // Fermat: a^(p-2). p is prime, a nonzero.
        Some(self.pow(a, self.p - 2))
    }

    fn from_i64(&self, n: i64) -> u64 {
        let p = self.p as i64;
        (n.rem_euclid(p)) as u64
    }

    fn fmt_parts(&self, a: &u64) -> (bool, String) {
        (false, a.to_string())
    }

    /// u128 accumulation: products of elements below 2^31 summed over any
    /// desk-scale length stay far from overflow; one reduction per output.
    fn poly_mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let p = self.p as u128;
        let n = a.len() + b.len() - 1;
        let mut out = vec![0u64; n];
        for (k, slot) in out.iter_mut().enumerate() {
            let lo = k.saturating_sub(b.len() - 1);
            let hi = k.min(a.len() - 1);
            let mut acc: u128 = 0;
            for i in lo..=hi {
                acc += a[i] as u128 * b[k - i] as u128;
            }
            *slot = (acc % p) as u64;
        }
        out
    }

    /// Division with a lazily reduced u128 remainder row; each slot takes at
    /// most one addition per quotient step, so values stay below 2^63 * len.
    fn poly_divrem(&self, num: &[u64], den: &[u64]) -> (Vec<u64>, Vec<u64>) {
        let p128 = self.p as u128;
        let dd = den.len() - 1;
        let lc_inv = self.inv(&den[dd]).expect("nonzero leading coefficient");
        let neg_den: Vec<u64> = den.iter().map(|d| self.neg(d)).collect();
        let mut rem: Vec<u128> = num.iter().map(|&c| c as u128).collect();
        let qlen = num.len() - dd;
        let mut quot = vec![0u64; qlen];
        for k in (0..qlen).rev() {
            let lead = (rem[k + dd] % p128) as u64;
            let q = self.mul(&lead, &lc_inv);
            rem[k + dd] = 0;
            if q == 0 {
                continue;
            }
            for (j, nd) in neg_den.iter().enumerate().take(dd) {
                let slot = &mut rem[k + j];
                *slot += q as u128 * *nd as u128;
                if *slot >= 1 << 120 {
                    *slot %= p128;
                }
            }
            quot[k] = q;
        }
        let rem_out: Vec<u64> = rem[..dd].iter().map(|&c| (c % p128) as u64).collect();
        (quot, rem_out)
    }
}

/// The rational numbers with exact big-integer fractions.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn characteristic(&self) -> u64 {
        0
    }

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }

    fn one(&self) -> BigRational {
        BigRational::one()
    }

    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }

    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }

    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }

    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }

    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }

    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        if a.is_zero() {
            None
        } else {
            Some(a.recip())
        }
    }

    fn from_i64(&self, n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn fmt_parts(&self, a: &BigRational) -> (bool, String) {
        (a.is_negative(), a.abs().to_string())
    }

    /// Primitive-remainder-sequence gcd over the integers: clear denominators,
    /// strip content after every pseudo-division. Plain Euclid over fractions
    /// swells quadratically in coefficient size; this stays near the size of
    /// the inputs and the resultant.
    fn poly_gcd(&self, a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
        let mut x = primitive_ints(a);
        let mut y = primitive_ints(b);
        if x.len() < y.len() {
            std::mem::swap(&mut x, &mut y);
        }
        while !y.is_empty() {
            let mut r = pseudo_rem(&x, &y);
            strip_content(&mut r);
            x = y;
            y = r;
            if x.len() < y.len() {
                std::mem::swap(&mut x, &mut y);
            }
        }
        x.into_iter().map(BigRational::from_integer).collect()
    }
}

/// Integer coefficients with denominators cleared and content removed.
fn primitive_ints(v: &[BigRational]) -> Vec<BigInt> {
    let mut trimmed: Vec<&BigRational> = v.iter().collect();
    while trimmed.last().is_some_and(|c| c.is_zero()) {
        trimmed.pop();
    }
    if trimmed.is_empty() {
        return Vec::new();
    }
    let mut denom_lcm = BigInt::one();
    for c in &trimmed {
        denom_lcm = denom_lcm.lcm(c.denom());
    }
    let mut out: Vec<BigInt> = trimmed
        .iter()
        .map(|c| c.numer() * (&denom_lcm / c.denom()))
        .collect();
    strip_content(&mut out);
    out
}

fn strip_content(v: &mut Vec<BigInt>) {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
    if v.is_empty() {
        return;
    }
    let mut content = BigInt::zero();
    for c in v.iter() {
        content = content.gcd(c);
    }
    if v.last().unwrap().is_negative() {
        content = -content;
    }
    for c in v.iter_mut() {
        *c = &*c / &content;
    }
}

/// lc(den)^k * num mod den over Z, trimmed; deg num >= deg den, den nonzero.
fn pseudo_rem(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let dd = den.len() - 1;
    let lc = den[dd].clone();
    let mut rem = num.to_vec();
    for k in (0..num.len() - dd).rev() {
        let coef = std::mem::replace(&mut rem[k + dd], BigInt::zero());
        if coef.is_zero() {
            continue;
        }
        for (i, c) in rem.iter_mut().enumerate() {
            if i != k + dd {
                *c = &*c * &lc;
            }
        }
        for (j, d) in den.iter().enumerate().take(dd) {
            rem[k + j] -= &coef * d;
        }
    }
    rem.truncate(dd);
    while rem.last().is_some_and(Zero::is_zero) {
        rem.pop();
    }
    rem
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_rejects_bad_moduli() {
        assert!(PrimeField::new(0).is_err());
        assert!(PrimeField::new(1).is_err());
        assert!(PrimeField::new(2).is_err());
        assert!(PrimeField::new(9).is_err());
        assert!(PrimeField::new(1 << 31).is_err());
        assert!(PrimeField::new(5).is_ok());
    }

    #[test]
    fn prime_field_ops() {
        let f = PrimeField::new(7).unwrap();
        assert_eq!(f.add(&5, &4), 2);
        assert_eq!(f.sub(&2, &5), 4);
        assert_eq!(f.mul(&3, &5), 1);
        assert_eq!(f.inv(&3), Some(5));
        assert_eq!(f.inv(&0), None);
        assert_eq!(f.from_i64(-1), 6);
        assert_eq!(f.pow(&3, 6), 1);
    }

    #[test]
    fn rational_ops() {
        let f = Rationals;
        let half = f.div(&f.one(), &f.from_i64(2)).unwrap();
        assert_eq!(f.add(&half, &half), f.one());
        assert_eq!(f.fmt_elem(&f.neg(&half)), "-1/2");
    }
}
