//! Height functionals and the growth of local multiplicities along the
//! multiples of a point: the naive height and its bounded gap against twice
//! the divisor degree, the canonical-height estimator deg D_(nR)/n^2 with a
//! trace-stability certificate, and the per-place growth law. At a place of
//! apparition index m, ord_gamma D_(nR) is 0 off multiples of m, constant in
//! characteristic zero, follows p^e*ord_m + (p^e-1)/(p-1)*h exactly while the
//! local Hasse order h is at most p-1, and is profiled empirically by the
//! delta function delta(s) = ord(p^s W) - p^s*ord(W) when h >= p.

use crate::curve::{hasse_local_order, CurveError, CurveModel, CurvePoint};
use crate::divisor::{divisor_of_point, ord_of_point_at, DivisorError};
use crate::factor::PlaceSplit;
use crate::field::Field;
use crate::place::{Place, PlaceError};
use crate::poly::PolyError;
use crate::ratfunc::RatFuncError;
use crate::torsion::{is_torsion, TorsionStatus};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GrowthError {
    #[error("point is torsion of order {0}; height and growth laws need a non-torsion point")]
    TorsionPoint(u64),
    #[error("place {place} never appears in supp D_(nR) for n <= {n_max}")]
    ApparitionNotFound { place: String, n_max: u32 },
    #[error("profiles disagree on {0}; extracted from different data")]
    IncompatibleProfiles(String),
    #[error("a multiple of the point hit the group identity; the point is torsion")]
    HitIdentity,
    #[error(transparent)]
    Divisor(#[from] DivisorError),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    RatFunc(#[from] RatFuncError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Place(#[from] PlaceError),
}

/// Degree of x(R) as a map to the projective line; 0 at the identity.
pub fn naive_height<F: Field>(point: &CurvePoint<F>) -> u64 {
    match point {
        CurvePoint::Zero => 0,
        CurvePoint::Affine(x, _) => x.map_degree(),
    }
}

// --- height vs divisor degree ---------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeightGapRow {
    pub n: u32,
    pub naive: u64,
    pub twice_degree: u64,
    /// naive - twice_degree; sign carries information, so not clamped.
    pub gap: i64,
}

/// Rows (n, h(nP+Q), 2 deg D_(nP+Q), gap) for n = 1..=n_max, skipping
/// indices where nP + Q is the identity.
pub fn height_gap_report<F: Field + PlaceSplit>(
    curve: &CurveModel<F>,
    p: &CurvePoint<F>,
    q: &CurvePoint<F>,
    n_max: u32,
    seed: u64,
) -> Result<Vec<HeightGapRow>, GrowthError> {
    for pt in [p, q] {
        if let CurvePoint::Affine(x, y) = pt {
            if !curve.contains(pt) {
                return Err(CurveError::OffCurve(x.to_string(), y.to_string()).into());
            }
        }
    }
    let mut rows = Vec::new();
    let mut walker = q.clone();
    for n in 1..=n_max {
        walker = curve.add_unchecked(&walker, p);
        if walker.is_zero() {
            continue;
        }
        let naive = naive_height(&walker);
        let twice_degree = 2 * divisor_of_point(curve, &walker, seed)?.degree();
        rows.push(HeightGapRow {
            n,
            naive,
            twice_degree,
            gap: naive as i64 - twice_degree as i64,
        });
    }
    Ok(rows)
}

/// Largest |gap| and the first index attaining it.
pub fn max_gap(rows: &[HeightGapRow]) -> Option<(u32, u64)> {
    rows.iter()
        .map(|r| (r.n, r.gap.unsigned_abs()))
        .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
}

// --- canonical height estimator -------------------------------------------------

#[derive(Clone, Debug)]
pub struct HeightTrace {
    /// deg D_(n_max R) / n_max^2, the last trace entry.
    pub estimate: BigRational,
    pub trace: Vec<(u32, BigRational)>,
}

/// Quadratic-normalized degree trace deg D_(nR)/n^2 for n = 1..=n_max.
/// Rejects torsion points, where the limit degenerates to 0.
pub fn canonical_height_estimate<F: Field + PlaceSplit>(
    curve: &CurveModel<F>,
    point: &CurvePoint<F>,
    n_max: u32,
    seed: u64,
) -> Result<HeightTrace, GrowthError> {
    if let TorsionStatus::Torsion { order } = is_torsion(curve, point)? {
        return Err(GrowthError::TorsionPoint(order));
    }
    let mut trace = Vec::with_capacity(n_max as usize);
    let mut walker = CurvePoint::Zero;
    for n in 1..=n_max {
        walker = curve.add_unchecked(&walker, point);
        if walker.is_zero() {
            return Err(GrowthError::HitIdentity);
        }
        let deg = divisor_of_point(curve, &walker, seed)?.degree();
        let value = BigRational::new(BigInt::from(deg), BigInt::from(n as u64 * n as u64));
        trace.push((n, value));
    }
    let estimate = trace.last().map(|(_, v)| v.clone()).unwrap_or_else(BigRational::zero);
    Ok(HeightTrace { estimate, trace })
}

#[derive(Clone, Debug)]
pub struct TraceStability {
    /// max over fitted n of n*|trace(n) - trace(2n)|.
    pub fitted_c: BigRational,
    pub fit_max: u32,
    pub validate_max: u32,
    /// Every validation pair satisfied n*|trace(n) - trace(2n)| <= fitted_c.
    pub ok: bool,
    /// Worst validation pair (n, n*|difference|), when any was checked.
    pub worst: Option<(u32, BigRational)>,
}

/// Fits C := max n*|trace(n) - trace(2n)| over n <= fit_max, then checks the
/// same bound on fit_max < n <= validate_max. Pairs need 2n inside the trace.
pub fn trace_stability(
    trace: &[(u32, BigRational)],
    fit_max: u32,
    validate_max: u32,
) -> TraceStability {
    let lookup: BTreeMap<u32, &BigRational> = trace.iter().map(|(n, v)| (*n, v)).collect();
    let scaled_diff = |n: u32| -> Option<BigRational> {
        let a = lookup.get(&n)?;
        let b = lookup.get(&(2 * n))?;
        Some((*a - *b).abs() * BigRational::from_integer(BigInt::from(n)))
    };
    let mut fitted_c = BigRational::zero();
    for n in 1..=fit_max {
        if let Some(d) = scaled_diff(n) {
            if d > fitted_c {
                fitted_c = d;
            }
        }
    }
    let mut ok = true;
    let mut worst: Option<(u32, BigRational)> = None;
    for n in fit_max + 1..=validate_max {
        if let Some(d) = scaled_diff(n) {
            if d > fitted_c {
                ok = false;
            }
            if worst.as_ref().is_none_or(|(_, w)| d > *w) {
                worst = Some((n, d));
            }
        }
    }
    TraceStability { fitted_c, fit_max, validate_max, ok, worst }
}

/// Symmetrized height pairing estimate est(R+S) - est(R) - est(S) from the
/// degree traces; all three points must be non-torsion.
pub fn pairing_estimate<F: Field + PlaceSplit>(
    curve: &CurveModel<F>,
    r: &CurvePoint<F>,
    s: &CurvePoint<F>,
    n_max: u32,
    seed: u64,
) -> Result<BigRational, GrowthError> {
    let sum = curve.add(r, s)?;
    let est_sum = canonical_height_estimate(curve, &sum, n_max, seed)?.estimate;
    let est_r = canonical_height_estimate(curve, r, n_max, seed)?.estimate;
    let est_s = canonical_height_estimate(curve, s, n_max, seed)?.estimate;
    Ok(est_sum - est_r - est_s)
}

/// Max over the sample of h(R+S) - 2h(R) - 2h(S); bounded above for a fixed
/// curve, which callers assert against a frozen constant.
pub fn quasi_parallelogram_excess<F: Field>(
    curve: &CurveModel<F>,
    sample: &[(CurvePoint<F>, CurvePoint<F>)],
) -> Result<Option<i64>, GrowthError> {
    let mut max: Option<i64> = None;
    for (r, s) in sample {
        let sum = curve.add(r, s)?;
        let excess = naive_height(&sum) as i64
            - 2 * naive_height(r) as i64
            - 2 * naive_height(s) as i64;
        max = Some(max.map_or(excess, |m| m.max(excess)));
    }
    Ok(max)
}

// --- growth law on multiples ----------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GrowthBranch {
    /// m(gamma) does not divide n, so the multiplicity must vanish.
    NotMultiple,
    /// Characteristic zero: constant on multiples of m(gamma).
    CharZero,
    /// h <= p-1: exact closed form.
    Tame,
    /// h >= p: observed only, collected into a DeltaProfile.
    Wild,
}

impl GrowthBranch {
    pub fn label(self) -> &'static str {
        match self {
            GrowthBranch::NotMultiple => "not-multiple",
            GrowthBranch::CharZero => "char-zero",
            GrowthBranch::Tame => "tame",
            GrowthBranch::Wild => "wild",
        }
    }
}

#[derive(Clone, Debug)]
pub struct GrowthRow {
    pub n: u32,
    pub branch: GrowthBranch,
    /// None on wild rows whose exponent e appears for the first time.
    pub expected: Option<u64>,
    pub actual: u64,
    pub matched: bool,
}

#[derive(Clone, Debug)]
pub struct GrowthReport<F: Field> {
    pub place: Place<F>,
    pub apparition: u32,
    /// Local Hasse order at the place; None in characteristic zero.
    pub hasse_order: Option<u32>,
    pub rows: Vec<GrowthRow>,
    pub mismatches: u32,
    /// Filled on wild places: observed delta values keyed by e = ord_p(n/m).
    pub wild_profile: Option<DeltaProfile<F>>,
}

fn pow_u64(p: u64, e: u32) -> u64 {
    (p as u128).pow(e).try_into().expect("exponent within u64")
}

fn ord_p(mut n: u32, p: u64) -> u32 {
    let p = u32::try_from(p).expect("small prime");
    let mut e = 0;
    while n % p == 0 {
        n /= p;
        e += 1;
    }
    e
}

/// Walks n = 1..=n_max and compares ord_gamma D_(nR) to the growth law at
/// one place. Exact assertions on the not-multiple, characteristic-zero and
/// tame branches; wild places are profiled, asserting only that the value
/// depends on n through e = ord_p(n/m) alone.
pub fn growth_law_verify<F: Field + PlaceSplit>(
    curve: &CurveModel<F>,
    point: &CurvePoint<F>,
    place: &Place<F>,
    n_max: u32,
) -> Result<GrowthReport<F>, GrowthError> {
    let p = curve.field().characteristic();
    let hasse_order = match p {
        0 => None,
        _ => Some(hasse_local_order(curve, place)?),
    };
    let wild = matches!(hasse_order, Some(h) if (h as u64) >= p);
    if let CurvePoint::Affine(x, y) = point {
        if !curve.contains(point) {
            return Err(CurveError::OffCurve(x.to_string(), y.to_string()).into());
        }
    }
    let mut orders = Vec::with_capacity(n_max as usize + 1);
    orders.push(0u64);
    let mut walker = CurvePoint::Zero;
    for _ in 1..=n_max {
        walker = curve.add_unchecked(&walker, point);
        if walker.is_zero() {
            return Err(GrowthError::HitIdentity);
        }
        orders.push(ord_of_point_at(curve, &walker, place)? as u64);
    }
    let apparition = match (1..=n_max).find(|n| orders[*n as usize] > 0) {
        Some(m) => m,
        None => {
            return Err(GrowthError::ApparitionNotFound {
                place: place.to_string(),
                n_max,
            })
        }
    };
    let ord_m = orders[apparition as usize];
    let mut observed: BTreeMap<u32, u64> = BTreeMap::new();
    let mut rows = Vec::with_capacity(n_max as usize);
    let mut mismatches = 0;
    for n in 1..=n_max {
        let actual = orders[n as usize];
        let (branch, expected) = if n % apparition != 0 {
            (GrowthBranch::NotMultiple, Some(0))
        } else if p == 0 {
            (GrowthBranch::CharZero, Some(ord_m))
        } else {
            let e = ord_p(n / apparition, p);
            let h = hasse_order.expect("positive characteristic") as u64;
            if !wild {
                let pe = pow_u64(p, e);
                (GrowthBranch::Tame, Some(pe * ord_m + (pe - 1) / (p - 1) * h))
            } else {
                let pe = pow_u64(p, e);
                let delta = actual.checked_sub(pe * ord_m);
                match (observed.get(&e), delta) {
                    (Some(seen), _) => {
                        (GrowthBranch::Wild, Some(pow_u64(p, e) * ord_m + seen))
                    }
                    (None, Some(d)) => {
                        observed.insert(e, d);
                        (GrowthBranch::Wild, None)
                    }
                    // Value below p^e*ord_m: no valid delta, flag as mismatch.
                    (None, None) => (GrowthBranch::Wild, Some(pe * ord_m)),
                }
            }
        };
        let matched = expected.is_none_or(|want| want == actual);
        if !matched {
            mismatches += 1;
        }
        rows.push(GrowthRow { n, branch, expected, actual, matched });
    }
    let wild_profile = if wild {
        observed.entry(0).or_insert(0);
        Some(DeltaProfile {
            place: place.clone(),
            base_index: apparition,
            hasse_order: hasse_order.expect("positive characteristic"),
            observed,
        })
    } else {
        None
    };
    Ok(GrowthReport {
        place: place.clone(),
        apparition,
        hasse_order,
        rows,
        mismatches,
        wild_profile,
    })
}

// --- delta profiles on wild places ----------------------------------------------

/// Observed deviation from pure p^e scaling at one place: observed(s) =
/// ord_gamma D_(p^s W) - p^s * ord_gamma D_W for the base point W.
#[derive(Clone, Debug)]
pub struct DeltaProfile<F: Field> {
    pub place: Place<F>,
    /// W = base_index * R in the ambient sequence.
    pub base_index: u32,
    pub hasse_order: u32,
    pub observed: BTreeMap<u32, u64>,
}

impl<F: Field> DeltaProfile<F> {
    pub fn value(&self, s: u32) -> Option<u64> {
        self.observed.get(&s).copied()
    }
}

/// Extracts observed(s) for s = 0..=s_max at `place` with base point
/// base_index * R, stopping early (with a partial profile) once the naive
/// height of the multiple exceeds `height_budget`.
pub fn extract_delta_profile<F: Field + PlaceSplit>(
    curve: &CurveModel<F>,
    point: &CurvePoint<F>,
    place: &Place<F>,
    base_index: u32,
    s_max: u32,
    height_budget: u64,
) -> Result<DeltaProfile<F>, GrowthError> {
    let p = curve.field().characteristic();
    debug_assert!(p >= 5);
    let hasse_order = hasse_local_order(curve, place)?;
    let base = curve.scalar_mul(base_index as i64, point)?;
    if base.is_zero() {
        return Err(GrowthError::HitIdentity);
    }
    let ord_base = ord_of_point_at(curve, &base, place)? as u64;
    let mut observed = BTreeMap::new();
    observed.insert(0, 0);
    let mut walker = base;
    for s in 1..=s_max {
        walker = curve.scalar_mul(p as i64, &walker)?;
        if walker.is_zero() {
            return Err(GrowthError::HitIdentity);
        }
        if naive_height(&walker) > height_budget {
            break;
        }
        let ord_here = ord_of_point_at(curve, &walker, place)? as u64;
        let scaled = pow_u64(p, s) * ord_base;
        let delta = ord_here.checked_sub(scaled).ok_or_else(|| {
            GrowthError::IncompatibleProfiles(format!(
                "ord at s = {s} fell below p^s times the base order"
            ))
        })?;
        observed.insert(s, delta);
    }
    Ok(DeltaProfile { place: place.clone(), base_index, hasse_order, observed })
}

/// Smallest j such that every observed s >= j satisfies the saturated
/// recursion observed(s+1) = h + p*observed(s); None if the tail never locks.
pub fn saturation_index<F: Field>(profile: &DeltaProfile<F>, p: u64) -> Option<u32> {
    let max_s = *profile.observed.keys().last()?;
    let h = profile.hasse_order as u64;
    'candidate: for j in 0..=max_s {
        for s in j..max_s {
            let (Some(cur), Some(next)) = (profile.value(s), profile.value(s + 1)) else {
                continue 'candidate;
            };
            if next != h + p * cur {
                continue 'candidate;
            }
        }
        return Some(j);
    }
    None
}

/// Checks the transport identity between the profile at nR and the profile
/// at m(gamma)R, where e = ord_p(n/m(gamma)): for every s <= j_observed
/// present in both profiles,
///   delta_n(s) = -p^s*delta_m(e) + delta_m(e+s)                 if e+s <= j,
///   delta_n(s) = -p^s*delta_m(e) + (p^(e+s-j)-1)/(p-1)*h + p^(e+s-j)*delta_m(j)
/// otherwise.
pub fn delta_identity_check<F: Field>(
    profile_n: &DeltaProfile<F>,
    profile_base: &DeltaProfile<F>,
    p: u64,
    e: u32,
    j_observed: u32,
) -> Result<bool, GrowthError> {
    if profile_n.place != profile_base.place {
        return Err(GrowthError::IncompatibleProfiles("place".to_string()));
    }
    if profile_n.hasse_order != profile_base.hasse_order {
        return Err(GrowthError::IncompatibleProfiles("hasse order".to_string()));
    }
    let h = profile_base.hasse_order as i128;
    let delta_base_j = match profile_base.value(j_observed) {
        Some(v) => v as i128,
        None => return Err(GrowthError::IncompatibleProfiles(format!(
            "base profile lacks s = {j_observed}"
        ))),
    };
    for (&s, &delta_n) in &profile_n.observed {
        if s > j_observed {
            continue;
        }
        let Some(delta_base_e) = profile_base.value(e) else {
            return Err(GrowthError::IncompatibleProfiles(format!(
                "base profile lacks s = {e}"
            )));
        };
        let ps = (p as i128).pow(s);
        let tail = if e + s <= j_observed {
            match profile_base.value(e + s) {
                Some(v) => v as i128,
                None => continue,
            }
        } else {
            let shift = (p as i128).pow(e + s - j_observed);
            (shift - 1) / (p as i128 - 1) * h + shift * delta_base_j
        };
        if delta_n as i128 != -ps * delta_base_e as i128 + tail {
            return Ok(false);
        }
    }
    Ok(true)
}

// --- linear bound ---------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct LinearBoundReport {
    /// max over n <= n_max of ord_gamma D_(nR) / n.
    pub max_ratio: BigRational,
    /// First n attaining the max; 0 when the place never appears.
    pub attained_at: u32,
    pub in_first_half: bool,
}

/// Max of ord_gamma D_(nR)/n over n <= n_max; a stable maximum attained in
/// the first half of the range is the desk-scale proxy for linear growth.
pub fn linear_bound_check<F: Field + PlaceSplit>(
    curve: &CurveModel<F>,
    point: &CurvePoint<F>,
    place: &Place<F>,
    n_max: u32,
) -> Result<LinearBoundReport, GrowthError> {
    let mut max_ratio = BigRational::zero();
    let mut attained_at = 0;
    let mut walker = CurvePoint::Zero;
    for n in 1..=n_max {
        walker = curve.add_unchecked(&walker, point);
        if walker.is_zero() {
            return Err(GrowthError::HitIdentity);
        }
        let ord_here = ord_of_point_at(curve, &walker, place)? as u64;
        let ratio = BigRational::new(BigInt::from(ord_here), BigInt::from(n));
        if ratio > max_ratio {
            max_ratio = ratio;
            attained_at = n;
        }
    }
    Ok(LinearBoundReport {
        max_ratio,
        attained_at,
        in_first_half: attained_at <= n_max / 2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};
    use crate::parse::{parse_place, parse_point, parse_ratfunc};
    use crate::ratfunc::RatFunc;

    fn gf(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn sample_curve_fp(p: u64) -> (CurveModel<PrimeField>, CurvePoint<PrimeField>) {
        let f = gf(p);
        let curve = CurveModel::new(
            parse_ratfunc(&f, "-t^2").unwrap(),
            parse_ratfunc(&f, "t^2").unwrap(),
        )
        .unwrap();
        let (x, y) = parse_point(&f, "(t, t)").unwrap().unwrap();
        let pt = curve.point(x, y).unwrap();
        (curve, pt)
    }

    #[test]
    fn naive_height_basics() {
        let (curve, p) = sample_curve_fp(5);
        assert_eq!(naive_height(&CurvePoint::<PrimeField>::Zero), 0);
        assert_eq!(naive_height(&p), 1);
        let p2 = curve.add(&p, &p).unwrap();
        assert_eq!(naive_height(&p2), 2);
    }

    #[test]
    fn torsion_point_rejected_by_estimator() {
        let f7 = gf(7);
        let curve = CurveModel::new(
            RatFunc::zero(f7),
            parse_ratfunc(&f7, "t^2").unwrap(),
        )
        .unwrap();
        let (x, y) = parse_point(&f7, "(0, t)").unwrap().unwrap();
        let pt = curve.point(x, y).unwrap();
        assert!(matches!(
            canonical_height_estimate(&curve, &pt, 8, 1),
            Err(GrowthError::TorsionPoint(3))
        ));
    }

    #[test]
    fn trace_is_nonnegative_and_stable() {
        let (curve, p) = sample_curve_fp(5);
        let ht = canonical_height_estimate(&curve, &p, 16, 1).unwrap();
        assert_eq!(ht.trace.len(), 16);
        for (_, v) in &ht.trace {
            assert!(*v >= BigRational::zero());
        }
        let stability = trace_stability(&ht.trace, 4, 8);
        assert!(stability.ok);
    }

    #[test]
    fn growth_law_tame_place_has_no_mismatches() {
        // Place t + 2 appears first at n = 3 with multiplicity 1 and local
        // Hasse order 0, so ord at n = 15 must be exactly 5.
        let (curve, p) = sample_curve_fp(5);
        let f5 = gf(5);
        let place = parse_place(&f5, "t + 2").unwrap();
        let report = growth_law_verify(&curve, &p, &place, 15).unwrap();
        assert_eq!(report.apparition, 3);
        assert_eq!(report.hasse_order, Some(0));
        assert_eq!(report.mismatches, 0);
        let row15 = report.rows.iter().find(|r| r.n == 15).unwrap();
        assert_eq!(row15.branch, GrowthBranch::Tame);
        assert_eq!(row15.actual, 5);
        let row6 = report.rows.iter().find(|r| r.n == 6).unwrap();
        assert_eq!(row6.actual, 1);
    }

    #[test]
    fn growth_law_char_zero_is_constant_on_multiples() {
        let q = Rationals;
        let curve = CurveModel::new(
            parse_ratfunc(&q, "-t^2").unwrap(),
            parse_ratfunc(&q, "t^2").unwrap(),
        )
        .unwrap();
        let (x, y) = parse_point(&q, "(t, t)").unwrap().unwrap();
        let p = curve.point(x, y).unwrap();
        let place = parse_place(&q, "t - 3").unwrap();
        let report = growth_law_verify(&curve, &p, &place, 6).unwrap();
        assert_eq!(report.apparition, 3);
        assert_eq!(report.hasse_order, None);
        assert_eq!(report.mismatches, 0);
        for row in &report.rows {
            if row.n % 3 == 0 {
                assert_eq!(row.branch, GrowthBranch::CharZero);
                assert_eq!(row.actual, 1);
            } else {
                assert_eq!(row.actual, 0);
            }
        }
    }

    #[test]
    fn missing_apparition_is_an_error() {
        let (curve, p) = sample_curve_fp(5);
        let f5 = gf(5);
        let place = parse_place(&f5, "t").unwrap();
        assert!(matches!(
            growth_law_verify(&curve, &p, &place, 4),
            Err(GrowthError::ApparitionNotFound { .. })
        ));
    }

    #[test]
    fn linear_bound_attained_early() {
        let (curve, p) = sample_curve_fp(5);
        let f5 = gf(5);
        let place = parse_place(&f5, "t + 2").unwrap();
        let report = linear_bound_check(&curve, &p, &place, 15).unwrap();
        assert_eq!(
            report.max_ratio,
            BigRational::new(BigInt::from(1), BigInt::from(3))
        );
        assert_eq!(report.attained_at, 3);
        assert!(report.in_first_half);
        let absent = parse_place(&f5, "t").unwrap();
        let silent = linear_bound_check(&curve, &p, &absent, 10).unwrap();
        assert_eq!(silent.max_ratio, BigRational::zero());
        assert_eq!(silent.attained_at, 0);
    }

    #[test]
    fn parallelogram_excess_bounded_on_small_sample() {
        let (curve, p) = sample_curve_fp(5);
        let p2 = curve.add(&p, &p).unwrap();
        let p3 = curve.add(&p2, &p).unwrap();
        let neg = curve.negate(&p);
        let sample = vec![
            (p.clone(), CurvePoint::Zero),
            (p.clone(), neg),
            (p.clone(), p2.clone()),
            (p2.clone(), p3.clone()),
            (p.clone(), p3),
        ];
        let excess = quasi_parallelogram_excess(&curve, &sample).unwrap().unwrap();
        assert!(excess <= 0, "excess {excess} above sample bound");
    }

    #[test]
    fn delta_identity_degenerate_cases() {
        // e = 0 forces delta_n = delta_base on the shared range.
        let f5 = gf(5);
        let place = parse_place(&f5, "t").unwrap();
        let mk = |vals: &[(u32, u64)]| DeltaProfile {
            place: place.clone(),
            base_index: 1,
            hasse_order: 6,
            observed: vals.iter().copied().collect(),
        };
        let base = mk(&[(0, 0), (1, 2), (2, 16)]);
        let same = mk(&[(0, 0), (1, 2), (2, 16)]);
        assert!(delta_identity_check(&same, &base, 5, 0, 2).unwrap());
        // s = 0 row is forced whenever e <= j.
        let shifted = mk(&[(0, 0)]);
        assert!(delta_identity_check(&shifted, &base, 5, 1, 2).unwrap());
        let wrong = mk(&[(0, 0), (1, 3)]);
        assert!(!delta_identity_check(&wrong, &base, 5, 0, 2).unwrap());
    }

    #[test]
    fn saturation_detects_locked_tail() {
        let f5 = gf(5);
        let place = parse_place(&f5, "t").unwrap();
        // h = 6: tail 2 -> 6 + 5*2 = 16 locks from s = 1 but not s = 0.
        let profile = DeltaProfile {
            place,
            base_index: 1,
            hasse_order: 6,
            observed: [(0, 0), (1, 2), (2, 16), (3, 86)].into_iter().collect(),
        };
        assert_eq!(saturation_index(&profile, 5), Some(1));
    }
}
