//! Primitive-divisor failure on supersingular twists: from a supersingular
//! constant curve y^2 = x^3 + alpha*x + beta over F_p, the sextic twist by
//! s = t^3 + alpha*t + beta carries P = (ts, s^2), and multiplication by p
//! acts on x through x([p^k]R) = s*(x(R)/s)^(p^(2k)). Poles of x([p^k]R)
//! therefore never leave a fixed set of places, so the divisors D_(p^l P + Q)
//! for a 2-torsion Q share one support forever and stop producing new places.

use crate::curve::{is_ordinary, CurveError, CurveModel, CurvePoint};
use crate::divisor::{support_of_point, DivisorError};
use crate::factor::{FactorError, PlaceSplit};
use crate::field::{Field, PrimeField};
use crate::growth::naive_height;
use crate::place::{new_support_part, Place, PlaceError, SupportSet};
use crate::poly::{Poly, PolyError};
use crate::ratfunc::{RatFunc, RatFuncError};
use serde_json::json;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DemoError {
    #[error("the 2-torsion cubic X^3 + {alpha}X + {beta} has no root in F_{p}; a rational 2-torsion point needs a field extension, which this demonstration does not cover")]
    NoRationalTwoTorsion { p: u64, alpha: u64, beta: u64 },
    #[error("multiple unexpectedly hit the identity at index {0}")]
    UnexpectedIdentity(u64),
    #[error("support routes disagree at l = {ell}: direct {direct}, transported {transported}")]
    RouteMismatch { ell: u32, direct: String, transported: String },
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Divisor(#[from] DivisorError),
    #[error(transparent)]
    RatFunc(#[from] RatFuncError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Place(#[from] PlaceError),
    #[error(transparent)]
    Factor(#[from] FactorError),
}

/// Smallest (alpha, beta) in lexicographic order with y^2 = x^3 + alpha*x +
/// beta nonsingular and supersingular over F_p. In characteristic 3 every
/// nonsingular short-form curve qualifies, so the scan lands on (1, 0).
pub fn find_supersingular(field: PrimeField) -> Result<(u64, u64), DemoError> {
    let p = field.characteristic();
    for alpha in 0..p {
        for beta in 0..p {
            let a = RatFunc::constant(field, alpha);
            let b = RatFunc::constant(field, beta);
            let curve = match CurveModel::new(a, b) {
                Ok(c) => c,
                Err(_) => continue,
            };
            if !is_ordinary(&curve)? {
                return Ok((alpha, beta));
            }
        }
    }
    unreachable!("a supersingular curve exists over every prime field");
}

#[derive(Clone, Debug)]
pub struct SupersingularDemo {
    pub field: PrimeField,
    pub alpha: u64,
    pub beta: u64,
    /// s = t^3 + alpha*t + beta, the twisting cubic.
    pub s: Poly<PrimeField>,
    /// y^2 = x^3 + alpha*s^2*x + beta*s^3.
    pub curve: CurveModel<PrimeField>,
    /// P = (ts, s^2); on-curve since (ts)^3 + alpha*s^2(ts) + beta*s^3 = s^4.
    pub point: CurvePoint<PrimeField>,
}

pub fn build_demo(field: PrimeField) -> Result<SupersingularDemo, DemoError> {
    let (alpha, beta) = find_supersingular(field)?;
    let t = Poly::var(field);
    let s = t
        .pow(3)
        .add(&t.mul_scalar(&alpha))
        .add(&Poly::constant(field, beta));
    let s_rat = RatFunc::from_poly(s.clone());
    let a = s_rat.pow(2).mul_scalar(&alpha);
    let b = s_rat.pow(3).mul_scalar(&beta);
    let curve = CurveModel::new(a, b)?;
    let x = RatFunc::from_poly(t.mul(&s));
    let y = s_rat.pow(2);
    let point = curve.point(x, y)?;
    Ok(SupersingularDemo { field, alpha, beta, s, curve, point })
}

/// The rational 2-torsion point (c*s, 0), c a root of X^3 + alpha*X + beta
/// in F_p: (cs)^3 + alpha*s^2(cs) + beta*s^3 = s^3(c^3 + alpha*c + beta).
pub fn build_torsion_q(demo: &SupersingularDemo) -> Result<CurvePoint<PrimeField>, DemoError> {
    let field = demo.field;
    let p = field.characteristic();
    for c in 0..p {
        let value = field.add(
            &field.add(&field.mul(&field.mul(&c, &c), &c), &field.mul(&demo.alpha, &c)),
            &demo.beta,
        );
        if field.is_zero(&value) {
            let x = RatFunc::from_poly(demo.s.clone()).mul_scalar(&c);
            let y = RatFunc::zero(field);
            return Ok(demo.curve.point(x, y)?);
        }
    }
    Err(DemoError::NoRationalTwoTorsion { p, alpha: demo.alpha, beta: demo.beta })
}

fn pow_u64(p: u64, e: u32) -> u64 {
    (p as u128).pow(e).try_into().expect("index fits u64")
}

/// x(R) composed through l steps of multiplication by p: s*(x(R)/s)^(p^(2l)).
fn transported_x(
    demo: &SupersingularDemo,
    x: &RatFunc<PrimeField>,
    l: u32,
) -> Result<RatFunc<PrimeField>, DemoError> {
    let p = demo.field.characteristic();
    let s_rat = RatFunc::from_poly(demo.s.clone());
    let ratio = x.div(&s_rat)?;
    Ok(s_rat.mul(&ratio.pow(pow_u64(p, 2 * l))))
}

/// Direct check of x([p^k]R) = s*(x(R)/s)^(p^(2k)): the left side by honest
/// scalar multiplication, the right side materialized independently.
pub fn frobenius_identity_check(
    demo: &SupersingularDemo,
    k: u32,
    r: &CurvePoint<PrimeField>,
) -> Result<bool, DemoError> {
    let p = demo.field.characteristic();
    let n = i64::try_from(pow_u64(p, k)).expect("small index");
    let multiple = demo.curve.scalar_mul(n, r)?;
    let (Some(x_r), Some(x_n)) = (r.x(), multiple.x()) else {
        return Err(DemoError::UnexpectedIdentity(n as u64));
    };
    Ok(transported_x(demo, x_r, k)? == *x_n)
}

/// Support of D_R for x(R) = s*(x0/s)^N read off place by place: at every
/// candidate place v(x(R)) = v(s) + N*(v(x0) - v(s)), and no place outside
/// the poles of x0 and the zeros of s can contribute, because the model's
/// defects are 0 at finite places (s is squarefree, so v(A) <= 2, v(B) <= 3).
fn transported_support(
    demo: &SupersingularDemo,
    x0: &RatFunc<PrimeField>,
    l: u32,
    seed: u64,
) -> Result<SupportSet<PrimeField>, DemoError> {
    let p = demo.field.characteristic();
    let n = pow_u64(p, 2 * l) as i128;
    let mut candidates: Vec<Place<PrimeField>> = Vec::new();
    for part in crate::place::coprime_refine(&[x0.den().clone(), demo.s.clone()])? {
        for piece in PrimeField::split_place(&part, seed)? {
            candidates.push(Place::finite(piece)?);
        }
    }
    candidates.push(Place::Infinity);
    let s_rat = RatFunc::from_poly(demo.s.clone());
    let mut product = Poly::one(demo.field);
    let mut at_infinity = false;
    for place in candidates {
        let v_s = s_rat.valuation(&place)?.expect("s is nonzero") as i128;
        let v_x0 = x0.valuation(&place)?.expect("x0 is nonzero") as i128;
        let v = v_s + n * (v_x0 - v_s);
        let defect = demo.curve.defect_at(&place)? as i128;
        if v - 2 * defect < 0 {
            match place {
                Place::Infinity => at_infinity = true,
                Place::Finite(f) => product = product.mul(&f),
            }
        }
    }
    Ok(SupportSet::new(product, at_infinity)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SupportRoute {
    /// Honest scalar multiplication and the generic support routine.
    Direct,
    /// Valuations transported through the multiplication-by-p formula.
    Transported,
    /// Both computed and cross-checked equal.
    Both,
}

impl SupportRoute {
    pub fn label(self) -> &'static str {
        match self {
            SupportRoute::Direct => "direct",
            SupportRoute::Transported => "transported",
            SupportRoute::Both => "both",
        }
    }
}

#[derive(Clone, Debug)]
pub struct FailureRow {
    pub ell: u32,
    /// The sequence index p^ell.
    pub index: u64,
    pub route: SupportRoute,
    pub support: SupportSet<PrimeField>,
    /// supp D_(p^ell P + Q) inside the fixed set.
    pub contained: bool,
    pub new_places: SupportSet<PrimeField>,
    pub has_primitive: bool,
}

#[derive(Clone, Debug)]
pub struct FailureReport {
    pub p: u64,
    /// F = poles of x(P+Q), zeros of s, and infinity.
    pub fixed_set: SupportSet<PrimeField>,
    pub rows: Vec<FailureRow>,
    pub all_contained: bool,
}

impl FailureReport {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "p": self.p,
            "fixed_set": {
                "finite": self.fixed_set.finite_part().to_string(),
                "infinity": self.fixed_set.at_infinity(),
            },
            "all_contained": self.all_contained,
            "rows": self.rows.iter().map(|row| json!({
                "l": row.ell,
                "index": row.index,
                "route": row.route.label(),
                "support": {
                    "finite": row.support.finite_part().to_string(),
                    "infinity": row.support.at_infinity(),
                },
                "contained": row.contained,
                "has_primitive": row.has_primitive,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Above this naive height the direct route is skipped and only transported
/// valuations are used; below it both routes run and must agree.
const DIRECT_HEIGHT_BUDGET: u64 = 4000;

/// Walks l = 0..=l_max over R_l = p^l*(P + Q) = p^l*P + Q (Q has order 2 and
/// p is odd, so p^l*Q = Q), recording supp D_(R_l), its containment in the
/// fixed set F, and whether any place is new against the accumulated
/// support. Supports come from honest scalar multiplication while degrees
/// stay within budget, always cross-checked against the transported
/// valuations; past the budget the transported route alone is used.
pub fn failure_demonstration(
    demo: &SupersingularDemo,
    q: &CurvePoint<PrimeField>,
    l_max: u32,
    seed: u64,
) -> Result<FailureReport, DemoError> {
    let p = demo.field.characteristic();
    let base = demo.curve.add(&demo.point, q)?;
    let Some(x0) = base.x() else {
        return Err(DemoError::UnexpectedIdentity(1));
    };
    let den_radical = x0.den().squarefree_part()?;
    let fixed_set = SupportSet::new(den_radical, true)?
        .union(&SupportSet::new(demo.s.clone(), false)?)?;
    let mut rows = Vec::with_capacity(l_max as usize + 1);
    let mut accumulated = SupportSet::empty(demo.field);
    let mut all_contained = true;
    let mut direct_point = Some(base.clone());
    for ell in 0..=l_max {
        if ell > 0 {
            direct_point = match direct_point {
                Some(prev) if naive_height(&prev) * p * p <= DIRECT_HEIGHT_BUDGET => {
                    Some(demo.curve.scalar_mul(p as i64, &prev)?)
                }
                _ => None,
            };
        }
        let transported = transported_support(demo, x0, ell, seed)?;
        let (route, support) = match &direct_point {
            Some(pt) => {
                if pt.is_zero() {
                    return Err(DemoError::UnexpectedIdentity(pow_u64(p, ell)));
                }
                let direct = support_of_point(&demo.curve, pt, seed)?;
                if direct != transported {
                    return Err(DemoError::RouteMismatch {
                        ell,
                        direct: format!(
                            "{} inf:{}",
                            direct.finite_part(),
                            direct.at_infinity()
                        ),
                        transported: format!(
                            "{} inf:{}",
                            transported.finite_part(),
                            transported.at_infinity()
                        ),
                    });
                }
                (SupportRoute::Both, direct)
            }
            None => (SupportRoute::Transported, transported),
        };
        let contained = support.is_subset(&fixed_set)?;
        all_contained &= contained;
        let new_places = new_support_part(&support, &accumulated)?;
        let has_primitive = !new_places.is_empty();
        accumulated = accumulated.union(&support)?;
        rows.push(FailureRow {
            ell,
            index: pow_u64(p, ell),
            route,
            support,
            contained,
            new_places,
            has_primitive,
        });
    }
    Ok(FailureReport { p, fixed_set, rows, all_contained })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torsion::{is_torsion, TorsionStatus};

    fn gf(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn smallest_supersingular_pairs() {
        assert_eq!(find_supersingular(gf(3)).unwrap(), (1, 0));
        assert_eq!(find_supersingular(gf(5)).unwrap(), (0, 1));
        assert_eq!(find_supersingular(gf(7)).unwrap(), (1, 0));
    }

    #[test]
    fn demo_curve_shape() {
        let demo = build_demo(gf(3)).unwrap();
        assert!(demo.curve.contains(&demo.point));
        assert!(demo.curve.has_constant_j());
        assert!(!is_ordinary(&demo.curve).unwrap());
        let demo5 = build_demo(gf(5)).unwrap();
        assert!(demo5.curve.contains(&demo5.point));
        assert!(demo5.curve.has_constant_j());
    }

    #[test]
    fn two_torsion_points() {
        let demo3 = build_demo(gf(3)).unwrap();
        let q3 = build_torsion_q(&demo3).unwrap();
        assert_eq!(*q3.x().unwrap(), RatFunc::zero(gf(3)));
        let demo5 = build_demo(gf(5)).unwrap();
        let q5 = build_torsion_q(&demo5).unwrap();
        let minus_s = RatFunc::from_poly(demo5.s.clone()).mul_scalar(&4);
        assert_eq!(*q5.x().unwrap(), minus_s);
        let doubled = demo5.curve.add(&q5, &q5).unwrap();
        assert!(doubled.is_zero());
    }

    #[test]
    fn multiplication_by_p_identity() {
        for p in [3u64, 5] {
            let demo = build_demo(gf(p)).unwrap();
            let q = build_torsion_q(&demo).unwrap();
            assert!(frobenius_identity_check(&demo, 1, &demo.point).unwrap());
            let pq = demo.curve.add(&demo.point, &q).unwrap();
            assert!(frobenius_identity_check(&demo, 1, &pq).unwrap());
            assert!(frobenius_identity_check(&demo, 1, &q).unwrap());
            let double = demo.curve.add(&demo.point, &demo.point).unwrap();
            assert!(frobenius_identity_check(&demo, 1, &double).unwrap());
        }
    }

    #[test]
    fn demo_point_is_non_torsion() {
        let demo = build_demo(gf(5)).unwrap();
        let status = is_torsion(&demo.curve, &demo.point).unwrap();
        assert_eq!(status, TorsionStatus::NonTorsion);
    }

    #[test]
    fn support_never_leaves_fixed_set() {
        let demo = build_demo(gf(3)).unwrap();
        let q = build_torsion_q(&demo).unwrap();
        let report = failure_demonstration(&demo, &q, 2, 1).unwrap();
        assert!(report.all_contained);
        assert_eq!(report.rows.len(), 3);
        for row in &report.rows {
            assert!(row.contained);
        }
        // Once the early indices cover the fixed set, nothing new appears.
        assert!(!report.rows[2].has_primitive);
        let json = report.to_json();
        assert_eq!(json["all_contained"], true);
    }

    #[test]
    fn routes_cross_check_where_both_run() {
        let demo = build_demo(gf(5)).unwrap();
        let q = build_torsion_q(&demo).unwrap();
        let report = failure_demonstration(&demo, &q, 1, 1).unwrap();
        assert!(report.all_contained);
        assert_eq!(report.rows[0].route, SupportRoute::Both);
        assert_eq!(report.rows[1].route, SupportRoute::Both);
    }
}
