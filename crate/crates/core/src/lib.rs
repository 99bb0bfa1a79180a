//! Exact arithmetic for sequences of effective divisors attached to points
//! on elliptic curves over rational function fields F_p(t) and Q(t):
//! polynomial and rational-function arithmetic, places of P^1, curve models
//! with local minimal twists and Hasse data, and the divisor, growth, and
//! admissibility machinery built on top.

pub mod criterion;
pub mod curve;
pub mod divisor;
pub mod factor;
pub mod field;
pub mod growth;
pub mod parse;
pub mod place;
pub mod poly;
pub mod ratfunc;
pub mod supersingular;
pub mod torsion;

pub use criterion::{
    closed_bound, divisor_set, divisor_sum_identity, is_prime, one_half, pair_admissible, s_sum,
    worst_case_dominance, zeta2_enclosure, CriterionError, DivisorSet, Enclosure,
};
pub use curve::{
    hasse_data, hasse_invariant, hasse_local_order, is_ordinary, CurveError, CurveModel,
    CurvePoint, HasseData, LocalModel,
};
pub use divisor::{
    apparition_index, divisibility_check, divisor_of_point, ord_of_point_at, support_of_point,
    zsigmondy_scan, DivisibilityReport, DivisibilityViolation, DivisorError, EffDivisor,
    ScanOptions, ScanRecord,
};
pub use factor::{factor_irreducible, is_irreducible, PlaceSplit, DEFAULT_SEED};
pub use field::{Field, FieldError, PrimeField, Rationals};
pub use growth::{
    canonical_height_estimate, delta_identity_check, extract_delta_profile, growth_law_verify,
    height_gap_report, linear_bound_check, max_gap, naive_height, pairing_estimate,
    quasi_parallelogram_excess, saturation_index, trace_stability, DeltaProfile, GrowthBranch,
    GrowthError, GrowthReport, GrowthRow, HeightGapRow, HeightTrace, LinearBoundReport,
    TraceStability,
};
pub use parse::{parse_place, parse_point, parse_poly, parse_ratfunc, ParseError};
pub use place::{coprime_refine, new_support_part, Place, PlaceError, SupportSet};
pub use poly::{Poly, PolyError};
pub use ratfunc::{RatFunc, RatFuncError};
pub use supersingular::{
    build_demo, build_torsion_q, failure_demonstration, find_supersingular,
    frobenius_identity_check, DemoError, FailureReport, FailureRow, SupersingularDemo,
    SupportRoute,
};
pub use torsion::{is_torsion, TorsionStatus};

pub type PolyFp = Poly<PrimeField>;
pub type PolyQ = Poly<Rationals>;
pub type RatFuncFp = RatFunc<PrimeField>;
pub type RatFuncQ = RatFunc<Rationals>;
pub type PlaceFp = Place<PrimeField>;
pub type PlaceQ = Place<Rationals>;
pub type CurveFp = CurveModel<PrimeField>;
pub type CurveQ = CurveModel<Rationals>;
pub type PointFp = CurvePoint<PrimeField>;
pub type PointQ = CurvePoint<Rationals>;
