mod common;

use jordan_ext::counterexample::{build_svc, width, SvcSet};
use jordan_ext::geometry::{disk_automorphism, hyperbolic_dist_disk, hyperbolic_dist_halfplane, JordanDomain, Point};
use jordan_ext::metrics::{quasihyperbolic_field, MetricField, MetricGrid};
use num_complex::Complex64;
use proptest::prelude::*;
use std::sync::{Arc, OnceLock};

fn disk_point() -> impl Strategy<Value = Complex64> {
    (0.0f64..0.97, 0.0f64..std::f64::consts::TAU).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

fn square_point() -> impl Strategy<Value = Point> {
    (-0.8f64..0.8, -0.8f64..0.8).prop_map(|(x, y)| Point::new(x, y))
}

/// Fields on the unit square `[-1/2, 1/2]²` and on the `2 × 2` square,
/// both from the origin.
fn nested_fields() -> &'static (MetricField, MetricField) {
    static CELL: OnceLock<(MetricField, MetricField)> = OnceLock::new();
    CELL.get_or_init(|| {
        let h = 1.0 / 128.0;
        let small = MetricGrid::build(common::rectangle(1.0, 1.0), h).unwrap();
        let big = MetricGrid::build(common::square(), h).unwrap();
        (
            quasihyperbolic_field(&small, Point::ORIGIN).unwrap(),
            quasihyperbolic_field(&big, Point::ORIGIN).unwrap(),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn disk_distance_is_a_metric(z in disk_point(), w in disk_point(), v in disk_point()) {
        let d = |a, b| hyperbolic_dist_disk(a, b).unwrap();
        prop_assert!(d(z, w) >= 0.0);
        prop_assert!((d(z, w) - d(w, z)).abs() <= 1e-12 * (1.0 + d(z, w)));
        prop_assert!(d(z, v) <= d(z, w) + d(w, v) + 1e-9);
    }

    #[test]
    fn automorphisms_are_isometries(z in disk_point(), w in disk_point(), c in disk_point()) {
        let d = hyperbolic_dist_disk(z, w).unwrap();
        let e = hyperbolic_dist_disk(disk_automorphism(c, z), disk_automorphism(c, w)).unwrap();
        prop_assert!((d - e).abs() <= 1e-8 * (1.0 + d));
    }

    #[test]
    fn halfplane_distance_is_dilation_invariant(x in -3.0f64..3.0, y in 0.01f64..5.0, u in -3.0f64..3.0, v in 0.01f64..5.0, s in 0.1f64..10.0) {
        let (a, b) = (Complex64::new(x, y), Complex64::new(u, v));
        let d = hyperbolic_dist_halfplane(a, b).unwrap();
        let e = hyperbolic_dist_halfplane(a * s, b * s).unwrap();
        prop_assert!((d - e).abs() <= 1e-9 * (1.0 + d));
    }

    #[test]
    fn svc_measure_matches_geometric_sum(depth in 0u32..=20) {
        let s = build_svc(depth).unwrap();
        let closed = 0.5 * (1.0 - (-(depth as f64)).exp2());
        prop_assert!((s.removed_measure() - closed).abs() < 1e-12);
        prop_assert!((SvcSet::removed_measure_formula(depth) - closed).abs() < 1e-15);
    }

    #[test]
    fn finger_width_squares_per_doubling(t in 0.0f64..5.5) {
        // log g(t + ln 2) = 2 log g(t) + M.
        let m = 5.0;
        let lhs = width(t + std::f64::consts::LN_2, m).ln();
        let rhs = 2.0 * width(t, m).ln() + m;
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs());
    }

    #[test]
    fn scaling_a_domain_scales_boundary_distance(p in square_point(), s in 0.25f64..4.0) {
        let d = common::square();
        let big = d.scaled(s).unwrap();
        let r = d.dist_to_boundary(p);
        prop_assert!((big.dist_to_boundary(p * s) - s * r).abs() < 1e-12 * s);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn field_is_symmetric_in_source_and_target(a in square_point(), b in square_point()) {
        prop_assume!(a.dist(b) > 0.05);
        let g = MetricGrid::build(common::square(), 1.0 / 32.0).unwrap();
        let from_a = quasihyperbolic_field(&g, a).unwrap().value_at(b).unwrap();
        let from_b = quasihyperbolic_field(&g, b).unwrap().value_at(a).unwrap();
        prop_assert!((from_a - from_b).abs() <= 0.05 * from_a.max(from_b), "{from_a} vs {from_b}");
    }

    #[test]
    fn enlarging_the_domain_never_increases_distance(x in -0.45f64..0.45, y in -0.45f64..0.45) {
        let (small, big) = nested_fields();
        let p = Point::new(x, y);
        let (ks, kb) = (small.value_at(p).unwrap(), big.value_at(p).unwrap());
        prop_assert!(kb <= ks * (1.0 + 1e-9) + 1e-12, "{kb} > {ks}");
    }
}

#[test]
fn refinement_changes_values_by_at_most_five_percent() {
    let d: Arc<JordanDomain> = common::rectangle(2.0, 1.0);
    let coarse = quasihyperbolic_field(&MetricGrid::build(d.clone(), 1.0 / 64.0).unwrap(), Point::ORIGIN).unwrap();
    let fine = quasihyperbolic_field(&MetricGrid::build(d, 1.0 / 128.0).unwrap(), Point::ORIGIN).unwrap();
    for p in [Point::new(0.5, 0.1), Point::new(-0.9, 0.0), Point::new(0.3, -0.45), Point::new(0.95, 0.45)] {
        let (a, b) = (coarse.value_at(p).unwrap(), fine.value_at(p).unwrap());
        assert!((a - b).abs() <= 0.05 * b, "{p:?}: {a} vs {b}");
    }
}
