//! Short Weierstrass curves y^2 = x^3 + A x + B over a rational function
//! field, with the affine group law, local minimal twists, and the Hasse
//! invariant in odd characteristic.

use crate::factor::{FactorError, PlaceSplit};
use crate::field::Field;
use crate::place::{Place, PlaceError};
use crate::poly::{Poly, PolyError};
use crate::ratfunc::{RatFunc, RatFuncError};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CurveError {
    #[error("singular model: 4A^3 + 27B^2 = 0")]
    Singular,
    #[error("point ({0}, {1}) is not on the curve")]
    OffCurve(String, String),
    #[error("operation needs positive characteristic")]
    NeedsPositiveCharacteristic,
    #[error("supersingular curve: the Hasse invariant vanishes")]
    Supersingular,
    #[error("local order of the Hasse invariant came out negative at {0}; model bookkeeping is inconsistent")]
    NegativeHasseOrder(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    RatFunc(#[from] RatFuncError),
    #[error(transparent)]
    Place(#[from] PlaceError),
    #[error(transparent)]
    Factor(#[from] FactorError),
}

#[derive(Clone, PartialEq, Eq)]
pub struct CurveModel<F: Field> {
    a: RatFunc<F>,
    b: RatFunc<F>,
}

impl<F: Field> fmt::Debug for CurveModel<F> {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(out, "CurveModel(A = {}, B = {})", self.a, self.b)
    }
}

#[derive(Clone, PartialEq, Eq)]
pub enum CurvePoint<F: Field> {
    Zero,
    Affine(RatFunc<F>, RatFunc<F>),
}

impl<F: Field> CurvePoint<F> {
    pub fn is_zero(&self) -> bool {
        matches!(self, CurvePoint::Zero)
    }

    pub fn x(&self) -> Option<&RatFunc<F>> {
        match self {
            CurvePoint::Zero => None,
            CurvePoint::Affine(x, _) => Some(x),
        }
    }

    pub fn y(&self) -> Option<&RatFunc<F>> {
        match self {
            CurvePoint::Zero => None,
            CurvePoint::Affine(_, y) => Some(y),
        }
    }
}

impl<F: Field> fmt::Display for CurvePoint<F> {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurvePoint::Zero => write!(out, "O"),
            CurvePoint::Affine(x, y) => write!(out, "({x}, {y})"),
        }
    }
}

impl<F: Field> fmt::Debug for CurvePoint<F> {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(out, "CurvePoint({self})")
    }
}

/// Local data of the v-minimal twist: A_min = pi^(-4m) A, B_min = pi^(-6m) B
/// where m is the minimality defect at the place.
#[derive(Clone, Debug)]
pub struct LocalModel<F: Field> {
    pub place: Place<F>,
    pub defect: i64,
    pub a_min: RatFunc<F>,
    pub b_min: RatFunc<F>,
}

/// Hasse invariant of a polynomial model plus the nonzero local orders of its
/// minimal twists, built eagerly so growth checks can look places up.
#[derive(Clone, Debug)]
pub struct HasseData<F: Field> {
    pub hasse: Poly<F>,
    pub local_orders: BTreeMap<Place<F>, u32>,
}

impl<F: Field> CurveModel<F> {
    pub fn new(a: RatFunc<F>, b: RatFunc<F>) -> Result<Self, CurveError> {
        a.num().same_field(b.num())?;
        let curve = CurveModel { a, b };
        if curve.disc_core().is_zero() {
            return Err(CurveError::Singular);
        }
        Ok(curve)
    }

    pub fn field(&self) -> &F {
        self.a.field()
    }

    pub fn a(&self) -> &RatFunc<F> {
        &self.a
    }

    pub fn b(&self) -> &RatFunc<F> {
        &self.b
    }

    /// 4A^3 + 27B^2; the discriminant is -16 times this.
    fn disc_core(&self) -> RatFunc<F> {
        let four = RatFunc::from_int(self.field().clone(), 4);
        let twenty_seven = RatFunc::from_int(self.field().clone(), 27);
        four.mul(&self.a.pow(3)).add(&twenty_seven.mul(&self.b.pow(2)))
    }

    pub fn discriminant(&self) -> RatFunc<F> {
        RatFunc::from_int(self.field().clone(), -16).mul(&self.disc_core())
    }

    /// j = 6912 A^3 / (4A^3 + 27B^2).
    pub fn j_invariant(&self) -> RatFunc<F> {
        let num = RatFunc::from_int(self.field().clone(), 6912).mul(&self.a.pow(3));
        num.div(&self.disc_core()).expect("nonsingular curve")
    }

    /// Isotrivial curves are computed with but flagged; callers surface the
    /// caveat.
    pub fn has_constant_j(&self) -> bool {
        self.j_invariant().is_constant()
    }

    pub fn contains(&self, pt: &CurvePoint<F>) -> bool {
        match pt {
            CurvePoint::Zero => true,
            CurvePoint::Affine(x, y) => {
                let lhs = y.mul(y);
                let rhs = x.pow(3).add(&self.a.mul(x)).add(&self.b);
                lhs == rhs
            }
        }
    }

    /// Validated affine point constructor.
    pub fn point(&self, x: RatFunc<F>, y: RatFunc<F>) -> Result<CurvePoint<F>, CurveError> {
        let pt = CurvePoint::Affine(x, y);
        if self.contains(&pt) {
            Ok(pt)
        } else if let CurvePoint::Affine(x, y) = pt {
            Err(CurveError::OffCurve(x.to_string(), y.to_string()))
        } else {
            unreachable!()
        }
    }

    pub fn negate(&self, pt: &CurvePoint<F>) -> CurvePoint<F> {
        match pt {
            CurvePoint::Zero => CurvePoint::Zero,
            CurvePoint::Affine(x, y) => CurvePoint::Affine(x.clone(), y.neg()),
        }
    }

    /// Group law with input validation; see `add_unchecked` for the chain
    /// step used inside scalar multiplication.
    pub fn add(&self, p: &CurvePoint<F>, q: &CurvePoint<F>) -> Result<CurvePoint<F>, CurveError> {
        for pt in [p, q] {
            if !self.contains(pt) {
                if let CurvePoint::Affine(x, y) = pt {
                    return Err(CurveError::OffCurve(x.to_string(), y.to_string()));
                }
            }
        }
        Ok(self.add_unchecked(p, q))
    }

    pub(crate) fn add_unchecked(&self, p: &CurvePoint<F>, q: &CurvePoint<F>) -> CurvePoint<F> {
        let (x1, y1) = match p {
            CurvePoint::Zero => return q.clone(),
            CurvePoint::Affine(x, y) => (x, y),
        };
        let (x2, y2) = match q {
            CurvePoint::Zero => return p.clone(),
            CurvePoint::Affine(x, y) => (x, y),
        };
        let lambda = if x1 == x2 {
            if *y1 == y2.neg() {
                return CurvePoint::Zero;
            }
            // Tangent: (3x^2 + A) / 2y; valid in any odd characteristic.
            let three = RatFunc::from_int(self.field().clone(), 3);
            let two = RatFunc::from_int(self.field().clone(), 2);
            let num = three.mul(&x1.mul(x1)).add(&self.a);
            num.div(&two.mul(y1)).expect("nonzero ordinate on doubling")
        } else {
            y2.sub(y1).div(&x2.sub(x1)).expect("distinct abscissae")
        };
        let x3 = lambda.mul(&lambda).sub(x1).sub(x2);
        let y3 = lambda.mul(&x1.sub(&x3)).sub(y1);
        CurvePoint::Affine(x3, y3)
    }

    /// n P for any integer n; validates P once.
    pub fn scalar_mul(&self, n: i64, p: &CurvePoint<F>) -> Result<CurvePoint<F>, CurveError> {
        if !self.contains(p) {
            if let CurvePoint::Affine(x, y) = p {
                return Err(CurveError::OffCurve(x.to_string(), y.to_string()));
            }
        }
        let (n, base) = if n < 0 {
            (n.unsigned_abs(), self.negate(p))
        } else {
            (n as u64, p.clone())
        };
        let mut acc = CurvePoint::Zero;
        if n == 0 {
            return Ok(acc);
        }
        let mut bit = 1u64 << (63 - n.leading_zeros());
        while bit > 0 {
            acc = self.add_unchecked(&acc, &acc);
            if n & bit != 0 {
                acc = self.add_unchecked(&acc, &base);
            }
            bit >>= 1;
        }
        Ok(acc)
    }

    /// Quartic/sextic twist by u: (A, B) -> (u^-4 A, u^-6 B); the map
    /// (x, y) -> (u^-2 x, u^-3 y) carries points across.
    pub fn twist(&self, u: &RatFunc<F>) -> Result<Self, CurveError> {
        let u4 = u.pow(4);
        let u6 = u.pow(6);
        CurveModel::new(self.a.div(&u4)?, self.b.div(&u6)?)
    }

    /// Minimality defect at a place: min(floor(v(A)/4), floor(v(B)/6)), with
    /// a vanishing coefficient contributing +infinity.
    pub fn defect_at(&self, place: &Place<F>) -> Result<i64, CurveError> {
        let va = self.a.valuation(place)?;
        let vb = self.b.valuation(place)?;
        let da = va.map(|v| v.div_euclid(4));
        let db = vb.map(|v| v.div_euclid(6));
        match (da, db) {
            (Some(a), Some(b)) => Ok(a.min(b)),
            (Some(a), None) => Ok(a),
            (None, Some(b)) => Ok(b),
            (None, None) => Err(CurveError::Singular),
        }
    }

    pub fn local_model(&self, place: &Place<F>) -> Result<LocalModel<F>, CurveError> {
        let defect = self.defect_at(place)?;
        let uniformizer = match place {
            Place::Finite(pi) => RatFunc::from_poly(pi.clone()),
            // 1/t uniformizes infinity.
            Place::Infinity => RatFunc::from_poly(Poly::var(self.field().clone())).inv()?,
        };
        let (a_min, b_min) = scale_model(&self.a, &self.b, &uniformizer, defect)?;
        debug_assert!(
            a_min.valuation(place).unwrap().map_or(true, |v| v >= 0)
                && b_min.valuation(place).unwrap().map_or(true, |v| v >= 0),
            "minimal model must be integral at its place"
        );
        Ok(LocalModel { place: place.clone(), defect, a_min, b_min })
    }

    /// Twist clearing all finite denominators, leaving polynomial A and B.
    pub fn integral_model(&self) -> Result<Self, CurveError> {
        if self.a.is_poly() && self.b.is_poly() {
            return Ok(self.clone());
        }
        let g = self.a.den().gcd(self.b.den())?;
        let c = self.a.den().mul(&self.b.den().div_exact(&g)?);
        let c4 = RatFunc::from_poly(c.pow(4));
        let c6 = RatFunc::from_poly(c.pow(6));
        CurveModel::new(self.a.mul(&c4), self.b.mul(&c6))
    }
}

fn scale_model<F: Field>(
    a: &RatFunc<F>,
    b: &RatFunc<F>,
    uniformizer: &RatFunc<F>,
    defect: i64,
) -> Result<(RatFunc<F>, RatFunc<F>), CurveError> {
    let scale = |f: &RatFunc<F>, k: i64| -> Result<RatFunc<F>, CurveError> {
        let power = uniformizer.pow(k.unsigned_abs());
        Ok(if k >= 0 { f.mul(&power) } else { f.div(&power)? })
    };
    Ok((scale(a, -4 * defect)?, scale(b, -6 * defect)?))
}

/// Coefficient of x^(p-1) in (x^3 + Ax + B)^((p-1)/2) for a polynomial model.
/// Zero exactly at the supersingular curves.
pub fn hasse_invariant<F: Field>(curve: &CurveModel<F>) -> Result<Poly<F>, CurveError> {
    let field = curve.field().clone();
    let p = field.characteristic();
    if p == 0 {
        return Err(CurveError::NeedsPositiveCharacteristic);
    }
    let a = curve.a().as_poly()?.clone();
    let b = curve.b().as_poly()?.clone();
    // Cubic in x with coefficients in F[t], raised to (p-1)/2.
    let cubic = vec![b, a, Poly::zero(field.clone()), Poly::one(field.clone())];
    let power = bivar_pow(&cubic, (p - 1) / 2, &field);
    Ok(power.get(p as usize - 1).cloned().unwrap_or_else(|| Poly::zero(field)))
}

fn bivar_mul<F: Field>(a: &[Poly<F>], b: &[Poly<F>], field: &F) -> Vec<Poly<F>> {
    let mut out = vec![Poly::zero(field.clone()); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            out[i + j] = out[i + j].add(&ai.mul(bj));
        }
    }
    out
}

fn bivar_pow<F: Field>(base: &[Poly<F>], mut e: u64, field: &F) -> Vec<Poly<F>> {
    let mut acc = vec![Poly::one(field.clone())];
    let mut b = base.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            acc = bivar_mul(&acc, &b, field);
        }
        e >>= 1;
        if e > 0 {
            b = bivar_mul(&b, &b, field);
        }
    }
    acc
}

/// True when the reduction is ordinary; vacuously true in characteristic 0.
pub fn is_ordinary<F: Field>(curve: &CurveModel<F>) -> Result<bool, CurveError> {
    if curve.field().characteristic() == 0 {
        return Ok(true);
    }
    let integral = curve.integral_model()?;
    Ok(!hasse_invariant(&integral)?.is_zero())
}

/// Local order of the Hasse invariant of the v-minimal model:
/// v(H) - (p-1) * defect, computed on a denominator-free twist. Twisting by u
/// scales H by u^(1-p), so the result does not depend on the chosen model.
pub fn hasse_local_order<F: Field>(
    curve: &CurveModel<F>,
    place: &Place<F>,
) -> Result<u32, CurveError> {
    let integral = curve.integral_model()?;
    let h = hasse_invariant(&integral)?;
    if h.is_zero() {
        return Err(CurveError::Supersingular);
    }
    let p = curve.field().characteristic();
    let defect = integral.defect_at(place)?;
    let vh = RatFunc::from_poly(h)
        .valuation(place)?
        .expect("nonzero Hasse invariant");
    let order = vh - (p as i64 - 1) * defect;
    u32::try_from(order).map_err(|_| CurveError::NegativeHasseOrder(place.to_string()))
}

/// Eagerly computed nonzero local orders: finite places from the irreducible
/// factors of the Hasse invariant, plus infinity.
pub fn hasse_data<F: Field + PlaceSplit>(
    curve: &CurveModel<F>,
    seed: u64,
) -> Result<HasseData<F>, CurveError> {
    let integral = curve.integral_model()?;
    let h = hasse_invariant(&integral)?;
    if h.is_zero() {
        return Err(CurveError::Supersingular);
    }
    let mut local_orders = BTreeMap::new();
    for part in F::split_place(&h.squarefree_part()?, seed)? {
        let place = Place::finite(part)?;
        let order = hasse_local_order(curve, &place)?;
        if order > 0 {
            local_orders.insert(place, order);
        }
    }
    let inf_order = hasse_local_order(curve, &Place::Infinity)?;
    if inf_order > 0 {
        local_orders.insert(Place::Infinity, inf_order);
    }
    Ok(HasseData { hasse: h, local_orders })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};
    use crate::parse::{parse_point, parse_ratfunc};

    fn gf(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    /// y^2 = x^3 - t^2 x + t^2 with the point (t, t).
    fn sample_curve(p: u64) -> (CurveModel<PrimeField>, CurvePoint<PrimeField>) {
        let f = gf(p);
        let a = parse_ratfunc(&f, "-t^2").unwrap();
        let b = parse_ratfunc(&f, "t^2").unwrap();
        let curve = CurveModel::new(a, b).unwrap();
        let (x, y) = parse_point(&f, "(t, t)").unwrap().unwrap();
        let pt = curve.point(x, y).unwrap();
        (curve, pt)
    }

    #[test]
    fn rejects_singular_model() {
        let f5 = gf(5);
        let zero = RatFunc::zero(f5);
        assert!(matches!(
            CurveModel::new(zero.clone(), zero),
            Err(CurveError::Singular)
        ));
    }

    #[test]
    fn doubling_hand_example() {
        // 2(t, t) = (t^2 - 2t, -t^3 + 3t^2 - t) via lambda = t over F_5.
        let (curve, pt) = sample_curve(5);
        let double = curve.add(&pt, &pt).unwrap();
        let f5 = gf(5);
        let expect = parse_point(&f5, "(t^2 - 2*t, -t^3 + 3*t^2 - t)").unwrap().unwrap();
        assert_eq!(double, CurvePoint::Affine(expect.0, expect.1));
    }

    #[test]
    fn order_three_point() {
        // (0, t) on y^2 = x^3 + t^2 over F_7 has order 3.
        let f7 = gf(7);
        let curve = CurveModel::new(
            RatFunc::zero(f7),
            parse_ratfunc(&f7, "t^2").unwrap(),
        )
        .unwrap();
        let (x, y) = parse_point(&f7, "(0, t)").unwrap().unwrap();
        let q = curve.point(x, y).unwrap();
        assert!(!curve.scalar_mul(2, &q).unwrap().is_zero());
        assert!(curve.scalar_mul(3, &q).unwrap().is_zero());
    }

    #[test]
    fn off_curve_rejected() {
        let (curve, _) = sample_curve(5);
        let f5 = gf(5);
        let bad = CurvePoint::Affine(
            RatFunc::from_int(f5, 1),
            RatFunc::from_int(f5, 2),
        );
        assert!(matches!(curve.add(&bad, &bad), Err(CurveError::OffCurve(_, _))));
    }

    #[test]
    fn scalar_mul_matches_repeated_add() {
        let (curve, pt) = sample_curve(5);
        let mut acc = CurvePoint::Zero;
        for _ in 0..7 {
            acc = curve.add(&acc, &pt).unwrap();
        }
        assert_eq!(curve.scalar_mul(7, &pt).unwrap(), acc);
        assert_eq!(
            curve.scalar_mul(-7, &pt).unwrap(),
            curve.negate(&acc)
        );
    }

    #[test]
    fn j_invariant_formula() {
        let (curve, _) = sample_curve(5);
        // j = -6912 t^6 / (-4 t^6 + 27 t^4) = 6912 t^2 / (4 t^2 - 27).
        let f5 = gf(5);
        let expect = parse_ratfunc(&f5, "(6912*t^2)/(4*t^2 - 27)").unwrap();
        assert_eq!(curve.j_invariant(), expect);
        assert!(!curve.has_constant_j());
    }

    #[test]
    fn hasse_invariant_hand_example() {
        // (x^3 - t^2 x + t^2)^2 has x^4 coefficient -2t^2 = 3t^2 over F_5.
        let (curve, _) = sample_curve(5);
        let h = hasse_invariant(&curve).unwrap();
        assert_eq!(h, Poly::from_ints(gf(5), &[0, 0, 3]));
        assert!(is_ordinary(&curve).unwrap());
    }

    #[test]
    fn defects_of_sample_curve() {
        let (curve, _) = sample_curve(5);
        // v_inf(A) = v_inf(B) = -2: defect floor(-2/4) = floor(-2/6) = -1.
        assert_eq!(curve.defect_at(&Place::Infinity).unwrap(), -1);
        let t = Place::finite(Poly::var(gf(5))).unwrap();
        assert_eq!(curve.defect_at(&t).unwrap(), 0);
        let lm = curve.local_model(&Place::Infinity).unwrap();
        assert_eq!(lm.defect, -1);
        assert_eq!(curve.local_model(&t).unwrap().defect, 0);
    }

    #[test]
    fn hasse_local_orders() {
        let (curve, _) = sample_curve(5);
        // H = 3t^2; at t: v = 2, defect 0, order 2. At infinity: v = -2,
        // defect -1, order -2 + 4 = 2.
        let t = Place::finite(Poly::var(gf(5))).unwrap();
        assert_eq!(hasse_local_order(&curve, &t).unwrap(), 2);
        assert_eq!(hasse_local_order(&curve, &Place::Infinity).unwrap(), 2);
        let data = hasse_data(&curve, 1).unwrap();
        assert_eq!(data.local_orders.len(), 2);
    }

    #[test]
    fn hasse_order_is_twist_invariant() {
        let (curve, _) = sample_curve(5);
        let f5 = gf(5);
        let u = parse_ratfunc(&f5, "(t + 1)/(t^2 + 2)").unwrap();
        let twisted = curve.twist(&u).unwrap();
        for place in [
            Place::finite(Poly::var(f5)).unwrap(),
            Place::finite(Poly::from_ints(f5, &[1, 1])).unwrap(),
            Place::Infinity,
        ] {
            assert_eq!(
                hasse_local_order(&curve, &place).unwrap(),
                hasse_local_order(&twisted, &place).unwrap()
            );
        }
    }

    #[test]
    fn char_zero_curve_ordinary_and_no_hasse() {
        let q = Rationals;
        let curve = CurveModel::new(
            RatFunc::from_int(q, -1),
            parse_ratfunc(&q, "t").unwrap(),
        )
        .unwrap();
        assert!(is_ordinary(&curve).unwrap());
        assert!(matches!(
            hasse_invariant(&curve),
            Err(CurveError::NeedsPositiveCharacteristic)
        ));
    }
}
