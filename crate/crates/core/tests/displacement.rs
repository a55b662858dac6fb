mod common;

use growfem::displacement::{uniform_displacement_field, DisplacementError, Keying, Query};
use growfem::fixture::generate_fixture;
use growfem::geometry::{
    resample_segment, segment_at_intersections, Curve, CurveSegment, Point2, INTERSECTION_TOL,
};
use proptest::prelude::*;

fn open(points: Vec<Point2>) -> CurveSegment {
    Curve::new("c", points, false).unwrap().as_segment()
}

fn scaled_arc(n: usize, r: f64, from_deg: f64, to_deg: f64) -> Vec<Point2> {
    common::arc(n, from_deg, to_deg)
        .into_iter()
        .map(|p| p * r)
        .collect()
}

/// Max interpolation error of each keying against the exact arc-fraction map
/// from the unit quarter arc onto a radius-2 arc spanning 120 degrees, and
/// the max disagreement between the keyings.
fn keying_errors(n: usize) -> (f64, f64, f64) {
    let from = open(common::arc(4001, 0.0, 90.0));
    let to = open(scaled_arc(4001, 2.0, 0.0, 120.0));
    let fp = uniform_displacement_field(&from, &to, n, Keying::Parameter).unwrap();
    let fc = uniform_displacement_field(&from, &to, n, Keying::Coordinate).unwrap();
    let (mut ep, mut ec, mut gap) = (0.0f64, 0.0f64, 0.0f64);
    for k in 0..=1000 {
        let s = k as f64 / 1000.0;
        let th = (90.0 * s).to_radians();
        let p = Point2::new(th.cos(), th.sin());
        let exact = (
            2.0 * (th * 4.0 / 3.0).cos() - p.x,
            2.0 * (th * 4.0 / 3.0).sin() - p.y,
        );
        let a = fp.evaluate(Query::Param(s)).unwrap();
        let b = fc.evaluate(Query::Point(p)).unwrap();
        ep = ep.max((a.0 - exact.0).hypot(a.1 - exact.1));
        ec = ec.max((b.0 - exact.0).hypot(b.1 - exact.1));
        gap = gap.max((a.0 - b.0).hypot(a.1 - b.1));
    }
    (ep, ec, gap)
}

#[test]
fn keyings_agree_within_second_order_interpolation_error() {
    let (p16, c16, gap16) = keying_errors(16);
    let (p64, c64, gap64) = keying_errors(64);
    for (coarse, fine) in [(p16, p64), (c16, c64)] {
        let ratio = coarse / fine;
        assert!((8.0..=24.0).contains(&ratio), "error ratio {ratio}");
    }
    assert!(gap16 <= p16.max(c16));
    assert!(gap64 <= p64.max(c64));
}

#[test]
fn fixture_segment_endpoints_map_exactly() {
    let (g0, g1) = generate_fixture(1.0).unwrap();
    let s0 = segment_at_intersections(&g0, INTERSECTION_TOL).unwrap();
    let s1 = segment_at_intersections(&g1, INTERSECTION_TOL).unwrap();
    for from in &s0.segments {
        let to = s1
            .segments
            .iter()
            .find(|t| t.segment_ref() == from.segment_ref())
            .unwrap();
        for keying in [Keying::Parameter, Keying::Coordinate] {
            let f = uniform_displacement_field(from, to, 41, keying).unwrap();
            let ends = [
                (0.0, from.points[0], to.points[0]),
                (
                    1.0,
                    *from.points.last().unwrap(),
                    *to.points.last().unwrap(),
                ),
            ];
            for (s, a, b) in ends {
                let (dx, dy) = f.at_param(s).unwrap();
                assert_eq!(
                    (a.x + dx, a.y + dy),
                    (b.x, b.y),
                    "{} at s={s}",
                    from.segment_ref()
                );
            }
        }
    }
}

#[test]
fn queries_outside_the_domain_are_rejected() {
    let from = open(common::pts(&[(0.0, 0.0), (1.0, 0.0)]));
    let to = open(common::pts(&[(0.0, 1.0), (1.0, 1.0)]));
    let fp = uniform_displacement_field(&from, &to, 5, Keying::Parameter).unwrap();
    let fc = uniform_displacement_field(&from, &to, 5, Keying::Coordinate).unwrap();
    for s in [-1e-9, 1.0 + 1e-9] {
        assert!(matches!(
            fp.evaluate(Query::Param(s)),
            Err(DisplacementError::OutOfDomain { .. })
        ));
    }
    assert!(matches!(
        fc.evaluate(Query::Point(Point2::new(0.5, 0.1))),
        Err(DisplacementError::OutOfDomain { .. })
    ));
    assert!(matches!(
        fp.evaluate(Query::Point(Point2::new(0.5, 0.0))),
        Err(DisplacementError::WrongKeying(_))
    ));
}

fn wavy(amp: f64, freq: f64, stretch: f64, n: usize) -> Vec<Point2> {
    (0..n)
        .map(|k| {
            let x = k as f64 / (n - 1) as f64;
            Point2::new(stretch * x, amp * (freq * x).sin())
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn field_composes_resampled_stages(
        a0 in -0.2f64..0.2, a1 in -0.4f64..0.4,
        f0 in 0.5f64..4.0, f1 in 0.5f64..4.0,
        stretch in 0.5f64..2.0,
        n in 2usize..60,
    ) {
        let from = open(wavy(a0, f0, 1.0, 50));
        let to = open(wavy(a1, f1, stretch, 70));
        let src = resample_segment(&from, n).unwrap();
        let dst = resample_segment(&to, n).unwrap();
        for keying in [Keying::Parameter, Keying::Coordinate] {
            let f = uniform_displacement_field(&from, &to, n, keying).unwrap();
            prop_assert_eq!(f.len(), n);
            for ((s, d), r) in src.iter().zip(&dst).zip(f.rows()) {
                prop_assert!((s.x + r.dx - d.x).abs() <= 1e-12);
                prop_assert!((s.y + r.dy - d.y).abs() <= 1e-12);
            }
            if keying == Keying::Coordinate {
                for (s, d) in src.iter().zip(&dst) {
                    let (dx, dy) = f.evaluate(Query::Point(*s)).unwrap();
                    prop_assert!((s.x + dx - d.x).abs() <= 1e-12 && (s.y + dy - d.y).abs() <= 1e-12);
                }
            }
        }
    }
}
