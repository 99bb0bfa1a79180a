//! Admissibility of a pair (p, r): the divisor sets D_n = {d : d | n, d > r,
//! gcd(d, r) = 1}, the exact sums sum p^ord_p(d)/d^2 over them, and the
//! certified closed bound zeta(2)(1 + 1/(p-1)) - sum_{i<=r} 1/i^2 compared
//! against 1/2 with exact rational interval arithmetic. The pair is
//! admissible when r = 1 away from characteristics 2 and 3, when p >= 5
//! divides r, or when the closed bound is certified below 1/2; never in
//! characteristics 2 and 3 with r > 1.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CriterionError {
    #[error("characteristic must be 0 or prime, got {0}")]
    NotPrimeOrZero(u64),
    #[error("r must be positive")]
    ZeroR,
    #[error("comparison with 1/2 undecided for (p, r) = ({p}, {r}) at the precision cap")]
    PrecisionExhausted { p: u64, r: u64 },
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

fn check_characteristic(p: u64) -> Result<(), CriterionError> {
    if p == 0 || is_prime(p) {
        Ok(())
    } else {
        Err(CriterionError::NotPrimeOrZero(p))
    }
}

fn ord_p(mut n: u64, p: u64) -> u32 {
    let mut e = 0;
    while n % p == 0 {
        n /= p;
        e += 1;
    }
    e
}

fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d != n / d {
                large.push(n / d);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivisorSet {
    pub n: u64,
    pub r: u64,
    /// Sorted d with d | n, d > r, gcd(d, r) = 1.
    pub elements: Vec<u64>,
}

pub fn divisor_set(n: u64, r: u64) -> DivisorSet {
    let elements = divisors(n)
        .into_iter()
        .filter(|d| *d > r && d.gcd(&r) == 1)
        .collect();
    DivisorSet { n, r, elements }
}

/// Exact sum of p^ord_p(d)/d^2 over divisor_set(n, r); p = 0 drops the
/// p-power weight. Accumulated over the common denominator n^2.
pub fn s_sum(n: u64, p: u64, r: u64) -> Result<BigRational, CriterionError> {
    check_characteristic(p)?;
    if r == 0 {
        return Err(CriterionError::ZeroR);
    }
    let mut numerator: u128 = 0;
    for d in &divisor_set(n, r).elements {
        let weight: u128 = if p == 0 { 1 } else { (p as u128).pow(ord_p(*d, p)) };
        let cofactor = (n / d) as u128;
        numerator += weight * cofactor * cofactor;
    }
    Ok(BigRational::new(
        BigInt::from(numerator),
        BigInt::from(n as u128 * n as u128),
    ))
}

// --- certified enclosures -------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enclosure {
    pub lower: BigRational,
    pub upper: BigRational,
}

impl Enclosure {
    pub fn midpoint(&self) -> BigRational {
        (&self.lower + &self.upper) / BigRational::from_integer(BigInt::from(2))
    }

    pub fn width(&self) -> BigRational {
        &self.upper - &self.lower
    }

    pub fn certified_below(&self, bound: &BigRational) -> bool {
        self.upper < *bound
    }

    pub fn certified_at_least(&self, bound: &BigRational) -> bool {
        self.lower >= *bound
    }
}

pub fn one_half() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(2))
}

/// Certified enclosure of zeta(2) from m terms: dyadic fixed-point partial
/// sums (numerators floor/ceil of 2^shift/i^2, exact integer arithmetic)
/// plus the integral tail bound sum_{i>m} 1/i^2 < 1/m.
pub fn zeta2_enclosure(m: u64) -> Enclosure {
    // Error budget: each term rounds by < 2^-shift, m terms stay below
    // m/2^shift <= 1/m^2 for shift >= 3*log2(m) + 1; u128 holds the sums
    // for m <= 2^30 since the total is below 2*2^shift.
    let shift = 3 * (64 - m.leading_zeros()) + 1;
    debug_assert!(shift <= 94);
    let scale: u128 = 1 << shift;
    let mut low: u128 = 0;
    let mut high: u128 = 0;
    for i in 1..=m as u128 {
        let q = scale / (i * i);
        low += q;
        high += if scale % (i * i) == 0 { q } else { q + 1 };
    }
    let denom = BigInt::from(scale);
    let tail = BigRational::new(BigInt::one(), BigInt::from(m));
    Enclosure {
        lower: BigRational::new(BigInt::from(low), denom.clone()),
        upper: BigRational::new(BigInt::from(high), denom) + tail,
    }
}

const ZETA_TERMS_BASE: u64 = 1 << 16;
const ZETA_TERMS_CAP: u64 = 1 << 28;

/// The base-precision enclosure is pure and reused by every bound query.
fn zeta2_base() -> &'static Enclosure {
    static BASE: std::sync::OnceLock<Enclosure> = std::sync::OnceLock::new();
    BASE.get_or_init(|| zeta2_enclosure(ZETA_TERMS_BASE))
}

/// Enclosure of zeta(2)(1 + 1/(p-1)) - sum_{i<=r} 1/i^2, with the 1/(p-1)
/// term read as 0 when p = 0. Precision escalates geometrically until the
/// comparison with 1/2 is decided; errors at the cap.
pub fn closed_bound(p: u64, r: u64) -> Result<Enclosure, CriterionError> {
    check_characteristic(p)?;
    if r == 0 {
        return Err(CriterionError::ZeroR);
    }
    let factor = if p == 0 {
        BigRational::one()
    } else {
        BigRational::one() + BigRational::new(BigInt::one(), BigInt::from(p - 1))
    };
    let mut head = BigRational::zero();
    for i in 1..=r {
        head += BigRational::new(BigInt::one(), BigInt::from(i as u128 * i as u128));
    }
    let half = one_half();
    let mut m = ZETA_TERMS_BASE;
    loop {
        let z = if m == ZETA_TERMS_BASE {
            zeta2_base().clone()
        } else {
            zeta2_enclosure(m)
        };
        let enclosure = Enclosure {
            lower: z.lower * &factor - &head,
            upper: z.upper * &factor - &head,
        };
        if enclosure.certified_below(&half) || enclosure.certified_at_least(&half) {
            return Ok(enclosure);
        }
        if m >= ZETA_TERMS_CAP {
            return Err(CriterionError::PrecisionExhausted { p, r });
        }
        m *= 4;
    }
}

/// Theorem-shaped admissibility: r = 1 away from characteristics 2 and 3;
/// p >= 5 dividing r; otherwise the certified closed bound below 1/2.
pub fn pair_admissible(p: u64, r: u64) -> Result<bool, CriterionError> {
    check_characteristic(p)?;
    if r == 0 {
        return Err(CriterionError::ZeroR);
    }
    if r == 1 {
        return Ok(p != 2 && p != 3);
    }
    if p == 2 || p == 3 {
        return Ok(false);
    }
    if p >= 5 && r % p == 0 {
        return Ok(true);
    }
    Ok(closed_bound(p, r)?.certified_below(&one_half()))
}

/// Both sides of sum_{d|n} p^ord_p(d) = (p^(e+1) - 1)/((e+1)(p-1)) * tau(n)
/// with e = ord_p(n) and tau the divisor-count function; lhs by brute-force
/// enumeration, rhs by the closed form.
pub fn divisor_sum_identity(n: u64, p: u64) -> (BigRational, BigRational, bool) {
    debug_assert!(is_prime(p));
    let ds = divisors(n);
    let mut lhs: u128 = 0;
    for d in &ds {
        lhs += (p as u128).pow(ord_p(*d, p));
    }
    let lhs = BigRational::from_integer(BigInt::from(lhs));
    let e = ord_p(n, p);
    let tau = ds.len() as u128;
    let rhs = BigRational::new(
        BigInt::from(((p as u128).pow(e + 1) - 1) * tau),
        BigInt::from((e as u128 + 1) * (p as u128 - 1)),
    );
    let equal = lhs == rhs;
    (lhs, rhs, equal)
}

/// Max of s_sum(n, p, r) over n <= n_max; the dominance target for the
/// closed bound.
pub fn worst_case_dominance(p: u64, r: u64, n_max: u64) -> Result<BigRational, CriterionError> {
    check_characteristic(p)?;
    let mut max = BigRational::zero();
    for n in 1..=n_max {
        let s = s_sum(n, p, r)?;
        if s > max {
            max = s;
        }
    }
    Ok(max)
}
