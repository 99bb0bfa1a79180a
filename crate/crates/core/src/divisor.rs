//! Effective divisors attached to points: at each place v the multiplicity is
//! max(0, m_v - v(x(R))/2), where m_v = min(floor(v(A)/4), floor(v(B)/6)) is
//! the minimality defect of the model (a vanishing coefficient contributes
//! +infinity). Equivalently, minus half the valuation of x on the v-minimal
//! twist when that is a pole. Pole orders on minimal integral models are even
//! away from characteristics 2 and 3, which is asserted; characteristic 3
//! gets a support-only mode with no halving.

use crate::curve::{CurveError, CurveModel, CurvePoint};
use crate::factor::{FactorError, PlaceSplit};
use crate::field::Field;
use crate::place::{new_support_part, Place, PlaceError, SupportSet};
use crate::poly::{Poly, PolyError};
use crate::ratfunc::{RatFunc, RatFuncError};
use serde_json::json;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DivisorError {
    #[error("exact divisors are unavailable in characteristic {0}; use support-only routines")]
    UnsupportedCharacteristic(u64),
    #[error("the zero point has no attached divisor")]
    ZeroPoint,
    #[error("odd pole order {valuation} of x on the minimal twist at {place}; not an elliptic-curve point divisor")]
    OddPoleOrder { place: String, valuation: i64 },
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    RatFunc(#[from] RatFuncError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Place(#[from] PlaceError),
    #[error(transparent)]
    Factor(#[from] FactorError),
}

/// Effective divisor on P^1: finite places as pairwise-coprime monic
/// polynomials with positive multiplicities, plus a multiplicity at infinity.
#[derive(Clone, PartialEq, Eq)]
pub struct EffDivisor<F: Field> {
    field: F,
    entries: Vec<(Poly<F>, u32)>,
    infinity: u32,
}

impl<F: Field> EffDivisor<F> {
    pub fn zero(field: F) -> Self {
        EffDivisor { field, entries: Vec::new(), infinity: 0 }
    }

    pub fn new(field: F, mut entries: Vec<(Poly<F>, u32)>, infinity: u32) -> Self {
        entries.retain(|(_, m)| *m > 0);
        entries.sort();
        let div = EffDivisor { field, entries, infinity };
        debug_assert!(div.entries_coprime());
        div
    }

    fn entries_coprime(&self) -> bool {
        for (i, (f, _)) in self.entries.iter().enumerate() {
            if f.degree().is_none_or(|d| d == 0) {
                return false;
            }
            for (g, _) in &self.entries[i + 1..] {
                let gcd = f.gcd(g).expect("same field");
                if gcd.degree() != Some(0) {
                    return false;
                }
            }
        }
        true
    }

    pub fn entries(&self) -> &[(Poly<F>, u32)] {
        &self.entries
    }

    pub fn infinity(&self) -> u32 {
        self.infinity
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty() && self.infinity == 0
    }

    pub fn degree(&self) -> u64 {
        let finite: u64 = self
            .entries
            .iter()
            .map(|(f, m)| f.degree().expect("nonconstant entry") as u64 * *m as u64)
            .sum();
        finite + self.infinity as u64
    }

    /// Multiplicity at a place; a finite place reads through the entry it
    /// divides, so queries by irreducible work against pseudo-place entries.
    pub fn ord_at(&self, place: &Place<F>) -> u32 {
        match place {
            Place::Infinity => self.infinity,
            Place::Finite(pi) => self
                .entries
                .iter()
                .find(|(f, _)| f.factor_multiplicity(pi).map_or(false, |m| m > 0))
                .map_or(0, |(_, m)| *m),
        }
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn support_set(&self) -> SupportSet<F> {
        let mut product = Poly::one(self.field.clone());
        for (f, _) in &self.entries {
            product = product.mul(f);
        }
        SupportSet::new(product, self.infinity > 0).expect("coprime squarefree entries")
    }
}

impl<F: Field> fmt::Display for EffDivisor<F> {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(out, "0");
        }
        let mut first = true;
        for (f, m) in &self.entries {
            if !first {
                write!(out, " + ")?;
            }
            write!(out, "{m}*({f})")?;
            first = false;
        }
        if self.infinity > 0 {
            if !first {
                write!(out, " + ")?;
            }
            write!(out, "{}*inf", self.infinity)?;
        }
        Ok(())
    }
}

impl<F: Field> fmt::Debug for EffDivisor<F> {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(out, "EffDivisor({self})")
    }
}

/// Exact arithmetic needs odd residue characteristics above 3 (or zero):
/// pole parity arguments fail at 2 and 3.
fn require_exact_char<F: Field>(field: &F) -> Result<(), DivisorError> {
    match field.characteristic() {
        0 => Ok(()),
        p if p >= 5 => Ok(()),
        p => Err(DivisorError::UnsupportedCharacteristic(p)),
    }
}

/// Finite places that could carry multiplicity: poles of x and places where
/// the defect can be positive (common zeros of A and B, tracked through the
/// numerator of whichever coefficient is nonzero).
fn candidate_basis<F: Field>(
    curve: &CurveModel<F>,
    x: &RatFunc<F>,
) -> Result<Vec<Poly<F>>, DivisorError> {
    let mut inputs = vec![x.den().clone()];
    if !curve.a().is_zero() {
        inputs.push(curve.a().num().clone());
    } else {
        inputs.push(curve.b().num().clone());
    }
    Ok(crate::place::coprime_refine(&inputs)?)
}

/// Multiplicity of the point divisor at one place, in exact characteristics.
pub fn ord_of_point_at<F: Field>(
    curve: &CurveModel<F>,
    point: &CurvePoint<F>,
    place: &Place<F>,
) -> Result<u32, DivisorError> {
    require_exact_char(curve.field())?;
    let x = match point {
        CurvePoint::Zero => return Err(DivisorError::ZeroPoint),
        CurvePoint::Affine(x, _) => x,
    };
    mult_at(curve, x, place, true).map(|m| m.expect("exact mode yields a value"))
}

/// Shared kernel: Some(mult) in exact mode; in support mode Some(1) marks
/// membership and Some(0) absence, with no parity assertions.
fn mult_at<F: Field>(
    curve: &CurveModel<F>,
    x: &RatFunc<F>,
    place: &Place<F>,
    exact: bool,
) -> Result<Option<u32>, DivisorError> {
    let defect = curve.defect_at(place)?;
    let v = match x.valuation(place)? {
        // x identically zero: no pole anywhere, multiplicity 0.
        None => return Ok(Some(0)),
        Some(v) => v,
    };
    let v_min = v - 2 * defect;
    if v_min >= 0 {
        return Ok(Some(0));
    }
    if !exact {
        return Ok(Some(1));
    }
    if v_min.rem_euclid(2) != 0 {
        return Err(DivisorError::OddPoleOrder {
            place: place.to_string(),
            valuation: v_min,
        });
    }
    Ok(Some(u32::try_from(-v_min / 2).expect("positive half-order")))
}

/// The effective divisor of an affine point, exactly.
pub fn divisor_of_point<F: Field + PlaceSplit>(
    curve: &CurveModel<F>,
    point: &CurvePoint<F>,
    seed: u64,
) -> Result<EffDivisor<F>, DivisorError> {
    require_exact_char(curve.field())?;
    let x = match point {
        CurvePoint::Zero => return Err(DivisorError::ZeroPoint),
        CurvePoint::Affine(x, _) => x,
    };
    let mut entries = Vec::new();
    for part in candidate_basis(curve, x)? {
        for piece in F::split_place(&part, seed)? {
            let place = Place::finite(piece.clone())?;
            let m = mult_at(curve, x, &place, true)?.expect("exact mode");
            if m > 0 {
                entries.push((piece, m));
            }
        }
    }
    let inf = mult_at(curve, x, &Place::Infinity, true)?.expect("exact mode");
    Ok(EffDivisor::new(curve.field().clone(), entries, inf))
}

/// The support of the point divisor, valid in every odd characteristic
/// including 3, where only membership (not multiplicity) is defined here.
pub fn support_of_point<F: Field + PlaceSplit>(
    curve: &CurveModel<F>,
    point: &CurvePoint<F>,
    seed: u64,
) -> Result<SupportSet<F>, DivisorError> {
    let x = match point {
        CurvePoint::Zero => return Err(DivisorError::ZeroPoint),
        CurvePoint::Affine(x, _) => x,
    };
    let field = curve.field().clone();
    let mut product = Poly::one(field);
    for part in candidate_basis(curve, x)? {
        for piece in F::split_place(&part, seed)? {
            let place = Place::finite(piece.clone())?;
            if mult_at(curve, x, &place, false)?.expect("support mode") > 0 {
                product = product.mul(&piece);
            }
        }
    }
    let at_inf = mult_at(curve, x, &Place::Infinity, false)?.expect("support mode") > 0;
    Ok(SupportSet::new(product, at_inf)?)
}

/// Smallest n in 1..=n_max with the place in supp D_(nP), if any.
pub fn apparition_index<F: Field>(
    curve: &CurveModel<F>,
    point: &CurvePoint<F>,
    place: &Place<F>,
    n_max: u32,
) -> Result<Option<u32>, DivisorError> {
    let mut acc = CurvePoint::Zero;
    for n in 1..=n_max {
        acc = curve.add(&acc, point)?;
        if acc.is_zero() {
            continue;
        }
        if ord_of_point_at(curve, &acc, place)? > 0 {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

// --- Zsigmondy-style scans ----------------------------------------------------

#[derive(Clone, Copy, Debug)]
pub struct ScanOptions {
    pub n_max: u32,
    pub seed: u64,
    /// Support membership only; required in characteristic 3.
    pub support_only: bool,
}

/// One row of the scan over R_n = nP + Q.
#[derive(Clone, Debug)]
pub struct ScanRecord<F: Field> {
    pub n: u32,
    /// R_n = O; the row is recorded and skipped for support accumulation.
    pub point_is_zero: bool,
    pub divisor: Option<EffDivisor<F>>,
    pub degree: Option<u64>,
    pub support: SupportSet<F>,
    /// Places appearing here for the first time in the sequence.
    pub new_places: SupportSet<F>,
    pub has_primitive: bool,
}

impl<F: Field> ScanRecord<F> {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "n": self.n,
            "zero": self.point_is_zero,
            "degree": self.degree,
            "divisor": self.divisor.as_ref().map(|d| d.to_string()),
            "support": support_json(&self.support),
            "new": support_json(&self.new_places),
            "has_primitive": self.has_primitive,
        })
    }

    pub fn to_csv_row(&self) -> String {
        let divisor = self.divisor.as_ref().map_or(String::new(), |d| d.to_string());
        format!(
            "{},{},{},\"{}\",\"{}\",{},\"{}\",{},{}",
            self.n,
            self.point_is_zero,
            self.degree.map_or(String::new(), |d| d.to_string()),
            divisor,
            self.support.finite_part(),
            self.support.at_infinity(),
            self.new_places.finite_part(),
            self.new_places.at_infinity(),
            self.has_primitive,
        )
    }

    pub fn csv_header() -> &'static str {
        "n,zero,degree,divisor,support_finite,support_infinity,new_finite,new_infinity,has_primitive"
    }
}

fn support_json<F: Field>(set: &SupportSet<F>) -> serde_json::Value {
    json!({
        "finite": set.finite_part().to_string(),
        "infinity": set.at_infinity(),
    })
}

/// Walks R_n = nP + Q for n = 1..=n_max, tracking cumulative support and
/// flagging rows whose divisor meets a place unseen at earlier indices.
pub fn zsigmondy_scan<F: Field + PlaceSplit>(
    curve: &CurveModel<F>,
    p: &CurvePoint<F>,
    q: &CurvePoint<F>,
    opts: &ScanOptions,
) -> Result<Vec<ScanRecord<F>>, DivisorError> {
    for pt in [p, q] {
        if !curve.contains(pt) {
            if let CurvePoint::Affine(x, y) = pt {
                return Err(CurveError::OffCurve(x.to_string(), y.to_string()).into());
            }
        }
    }
    if !opts.support_only {
        require_exact_char(curve.field())?;
    }
    let field = curve.field().clone();
    let mut records = Vec::with_capacity(opts.n_max as usize);
    let mut seen = SupportSet::empty(field.clone());
    let mut walker = q.clone();
    for n in 1..=opts.n_max {
        walker = curve.add_unchecked(&walker, p);
        if walker.is_zero() {
            records.push(ScanRecord {
                n,
                point_is_zero: true,
                divisor: None,
                degree: None,
                support: SupportSet::empty(field.clone()),
                new_places: SupportSet::empty(field.clone()),
                has_primitive: false,
            });
            continue;
        }
        let (divisor, degree, support) = if opts.support_only {
            (None, None, support_of_point(curve, &walker, opts.seed)?)
        } else {
            let d = divisor_of_point(curve, &walker, opts.seed)?;
            let deg = d.degree();
            let supp = d.support_set();
            (Some(d), Some(deg), supp)
        };
        let new_places = new_support_part(&support, &seen)?;
        let has_primitive = !new_places.is_empty();
        seen = seen.union(&support)?;
        records.push(ScanRecord {
            n,
            point_is_zero: false,
            divisor,
            degree,
            support,
            new_places,
            has_primitive,
        });
    }
    Ok(records)
}

// --- divisibility --------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivisibilityViolation {
    pub m: u32,
    pub n: u32,
    pub place: String,
    pub ord_m: u32,
    pub ord_n: u32,
}

#[derive(Clone, Debug)]
pub struct DivisibilityReport {
    pub n_max: u32,
    pub checked_pairs: u32,
    pub violations: Vec<DivisibilityViolation>,
}

/// Checks D_(mP) <= D_(nP) for every m | n <= n_max. Divisors are computed
/// only for the (small) proper divisors m; each comparison reads the larger
/// point through direct per-place queries, so x(nP) is never factored.
pub fn divisibility_check<F: Field + PlaceSplit>(
    curve: &CurveModel<F>,
    point: &CurvePoint<F>,
    n_max: u32,
    seed: u64,
) -> Result<DivisibilityReport, DivisorError> {
    require_exact_char(curve.field())?;
    let mut multiples: Vec<CurvePoint<F>> = Vec::with_capacity(n_max as usize + 1);
    multiples.push(CurvePoint::Zero);
    let mut walker = CurvePoint::Zero;
    for _ in 1..=n_max {
        walker = curve.add(&walker, point)?;
        multiples.push(walker.clone());
    }
    let mut small_divisors: Vec<Option<EffDivisor<F>>> = vec![None; n_max as usize + 1];
    let mut checked_pairs = 0;
    let mut violations = Vec::new();
    for n in 2..=n_max {
        if multiples[n as usize].is_zero() {
            continue;
        }
        for m in 1..n {
            if n % m != 0 || multiples[m as usize].is_zero() {
                continue;
            }
            if small_divisors[m as usize].is_none() {
                small_divisors[m as usize] =
                    Some(divisor_of_point(curve, &multiples[m as usize], seed)?);
            }
            let d_m = small_divisors[m as usize].as_ref().expect("just filled");
            checked_pairs += 1;
            for (f, ord_m) in d_m.entries() {
                let place = Place::finite(f.clone())?;
                let ord_n = ord_of_point_at(curve, &multiples[n as usize], &place)?;
                if ord_n < *ord_m {
                    violations.push(DivisibilityViolation {
                        m,
                        n,
                        place: place.to_string(),
                        ord_m: *ord_m,
                        ord_n,
                    });
                }
            }
            if d_m.infinity() > 0 {
                let ord_n =
                    ord_of_point_at(curve, &multiples[n as usize], &Place::Infinity)?;
                if ord_n < d_m.infinity() {
                    violations.push(DivisibilityViolation {
                        m,
                        n,
                        place: "inf".to_string(),
                        ord_m: d_m.infinity(),
                        ord_n,
                    });
                }
            }
        }
    }
    Ok(DivisibilityReport { n_max, checked_pairs, violations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};
    use crate::parse::{parse_place, parse_point, parse_poly, parse_ratfunc};

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

    fn sample_curve_q() -> (CurveModel<Rationals>, CurvePoint<Rationals>) {
        let q = Rationals;
        let curve = CurveModel::new(
            parse_ratfunc(&q, "-t^2").unwrap(),
            parse_ratfunc(&q, "t^2").unwrap(),
        )
        .unwrap();
        let (x, y) = parse_point(&q, "(t, t)").unwrap().unwrap();
        let pt = curve.point(x, y).unwrap();
        (curve, pt)
    }

    #[test]
    fn first_multiples_have_hand_computed_divisors() {
        // x(P) = t and x(2P) = t^2 - 2t have no contributing places;
        // x(3P) = (t^3 - 2t^2 - 3t + 4)/(t - 3)^2 puts multiplicity 1
        // at t - 3 (= t + 2 mod 5) and nothing at infinity.
        let (curve, p) = sample_curve_fp(5);
        let d1 = divisor_of_point(&curve, &p, 1).unwrap();
        assert!(d1.is_zero());
        let p2 = curve.add(&p, &p).unwrap();
        assert!(divisor_of_point(&curve, &p2, 1).unwrap().is_zero());
        let p3 = curve.add(&p2, &p).unwrap();
        let d3 = divisor_of_point(&curve, &p3, 1).unwrap();
        let f5 = gf(5);
        assert_eq!(
            d3,
            EffDivisor::new(f5, vec![(parse_poly(&f5, "t + 2").unwrap(), 1)], 0)
        );
        assert_eq!(d3.degree(), 1);
    }

    #[test]
    fn rational_curve_matches_prime_reduction() {
        let (curve, p) = sample_curve_q();
        let p3 = curve.scalar_mul(3, &p).unwrap();
        let d3 = divisor_of_point(&curve, &p3, 1).unwrap();
        let q = Rationals;
        assert_eq!(
            d3,
            EffDivisor::new(q, vec![(parse_poly(&q, "t - 3").unwrap(), 1)], 0)
        );
    }

    #[test]
    fn zero_x_coordinate_has_zero_divisor() {
        // (0, t) on y^2 = x^3 + t^2 over F_7.
        let f7 = gf(7);
        let curve = CurveModel::new(
            RatFunc::zero(f7),
            parse_ratfunc(&f7, "t^2").unwrap(),
        )
        .unwrap();
        let (x, y) = parse_point(&f7, "(0, t)").unwrap().unwrap();
        let pt = curve.point(x, y).unwrap();
        assert!(divisor_of_point(&curve, &pt, 1).unwrap().is_zero());
    }

    #[test]
    fn char_three_is_support_only() {
        let (curve, p) = sample_curve_fp(3);
        assert!(matches!(
            divisor_of_point(&curve, &p, 1),
            Err(DivisorError::UnsupportedCharacteristic(3))
        ));
        assert!(support_of_point(&curve, &p, 1).is_ok());
    }

    #[test]
    fn ord_queries_match_divisor() {
        let (curve, p) = sample_curve_fp(5);
        let p3 = curve.scalar_mul(3, &p).unwrap();
        let f5 = gf(5);
        let at = parse_place(&f5, "t + 2").unwrap();
        assert_eq!(ord_of_point_at(&curve, &p3, &at).unwrap(), 1);
        assert_eq!(
            ord_of_point_at(&curve, &p3, &Place::Infinity).unwrap(),
            0
        );
        let elsewhere = parse_place(&f5, "t").unwrap();
        assert_eq!(ord_of_point_at(&curve, &p3, &elsewhere).unwrap(), 0);
    }

    #[test]
    fn apparition_of_first_pole() {
        let (curve, p) = sample_curve_fp(5);
        let f5 = gf(5);
        let at = parse_place(&f5, "t + 2").unwrap();
        assert_eq!(apparition_index(&curve, &p, &at, 10).unwrap(), Some(3));
        let never = parse_place(&f5, "t").unwrap();
        assert_eq!(apparition_index(&curve, &p, &never, 4).unwrap(), None);
    }

    #[test]
    fn scan_flags_first_new_place_rows() {
        let (curve, p) = sample_curve_fp(7);
        let opts = ScanOptions { n_max: 5, seed: 1, support_only: false };
        let rows = zsigmondy_scan(&curve, &p, &CurvePoint::Zero, &opts).unwrap();
        assert_eq!(rows.len(), 5);
        // D_1 = D_2 = 0, so no primitive place; D_3 meets t + 4 first.
        assert!(!rows[0].has_primitive);
        assert!(!rows[1].has_primitive);
        assert!(rows[2].has_primitive);
        let f7 = gf(7);
        assert_eq!(
            rows[2].new_places.finite_part(),
            &parse_poly(&f7, "t + 4").unwrap()
        );
        for row in &rows {
            assert!(!row.point_is_zero);
            let v = row.to_json();
            assert_eq!(v["n"], row.n);
            assert_eq!(v["has_primitive"], row.has_primitive);
        }
    }

    #[test]
    fn scan_skips_torsion_hits() {
        // P = (0, t) has order 3 on y^2 = x^3 + t^2, so 3P + O vanishes.
        let f7 = gf(7);
        let curve = CurveModel::new(
            RatFunc::zero(f7),
            parse_ratfunc(&f7, "t^2").unwrap(),
        )
        .unwrap();
        let (x, y) = parse_point(&f7, "(0, t)").unwrap().unwrap();
        let pt = curve.point(x, y).unwrap();
        let opts = ScanOptions { n_max: 6, seed: 1, support_only: false };
        let rows = zsigmondy_scan(&curve, &pt, &CurvePoint::Zero, &opts).unwrap();
        assert!(rows[2].point_is_zero);
        assert!(rows[5].point_is_zero);
        assert!(!rows[2].has_primitive);
    }

    #[test]
    fn divisibility_holds_on_sample_curve() {
        let (curve, p) = sample_curve_fp(5);
        let report = divisibility_check(&curve, &p, 12, 1).unwrap();
        assert!(report.violations.is_empty());
        assert!(report.checked_pairs > 0);
    }

    #[test]
    fn csv_and_json_round_trip_shape() {
        let (curve, p) = sample_curve_fp(5);
        let opts = ScanOptions { n_max: 3, seed: 1, support_only: false };
        let rows = zsigmondy_scan(&curve, &p, &CurvePoint::Zero, &opts).unwrap();
        let header_fields = ScanRecord::<PrimeField>::csv_header().split(',').count();
        for row in &rows {
            assert_eq!(row.to_csv_row().split(',').count(), header_fields);
        }
        let j = rows[2].to_json();
        assert_eq!(j["degree"], 1);
        assert_eq!(j["support"]["finite"], "t + 2");
    }
}
