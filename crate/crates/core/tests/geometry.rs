mod common;

use common::{arc, piece, pts};
use growfem::geometry::{
    find_intersections, polygon_area, resample_uniform, segment_at_intersections, ArcTable, Curve,
    GeometryError, Point2, StagedGeometry, Subdomain, INTERSECTION_TOL,
};
use proptest::prelude::*;

fn open(id: &str, xy: &[(f64, f64)]) -> Curve {
    Curve::new(id, pts(xy), false).unwrap()
}

#[test]
fn resample_straight_segment() {
    let c = open("c", &[(0.0, 0.0), (1.0, 0.0)]);
    let r = resample_uniform(&c, 5).unwrap();
    let expect = [0.0, 0.25, 0.5, 0.75, 1.0];
    for (p, x) in r.points().iter().zip(expect) {
        assert!((p.x - x).abs() < 1e-15 && p.y == 0.0);
    }
}

#[test]
fn resample_l_polyline_hits_corner() {
    let c = open("c", &[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0)]);
    let r = resample_uniform(&c, 3).unwrap();
    let p = r.points();
    assert_eq!(p[0], Point2::new(0.0, 0.0));
    assert!(p[1].distance(Point2::new(1.0, 0.0)) < 1e-12);
    assert_eq!(p[2], Point2::new(1.0, 1.0));
}

/// Oracle: invert the cumulative arc-length table of the dense input.
#[test]
fn resample_quarter_circle_matches_arc_table_oracle() {
    let dense = arc(1000, 0.0, 90.0);
    let c = Curve::new("q", dense.clone(), false).unwrap();
    let r = resample_uniform(&c, 5).unwrap();
    let table = ArcTable::new(&dense);
    for (k, p) in r.points().iter().enumerate() {
        let oracle = table.point_at(table.length() * k as f64 / 4.0);
        let angle = Point2::new(
            (22.5 * k as f64).to_radians().cos(),
            (22.5 * k as f64).to_radians().sin(),
        );
        assert!(p.distance(oracle) < 1e-3, "k={k}: {p} vs table {oracle}");
        assert!(p.distance(angle) < 1e-3, "k={k}: {p} vs angle {angle}");
    }
}

#[test]
fn resample_errors() {
    let c = open("c", &[(0.0, 0.0), (1.0, 0.0)]);
    assert!(matches!(
        resample_uniform(&c, 1),
        Err(GeometryError::TooFewSamples(1))
    ));
}

#[test]
fn circle_length_converges_monotonically() {
    let circle = Curve::new("o", arc(4001, 0.0, 360.0)[..4000].to_vec(), true).unwrap();
    let full = circle.length();
    let mut prev = 0.0;
    for n in [8, 32, 128] {
        let l = resample_uniform(&circle, n).unwrap().length();
        assert!(l <= full + 1e-12);
        assert!(l > prev, "n={n}: {l} not above {prev}");
        prev = l;
    }
    assert!((full - prev) / full < 1e-3);
}

#[test]
fn intersection_examples() {
    let v = open("v", &[(0.0, -1.0), (0.0, 1.0)]);
    let h = open("h", &[(-1.0, 0.0), (1.0, 0.0)]);
    let hits = find_intersections(&v, &h, 1e-9);
    assert_eq!(hits.len(), 1);
    assert_eq!(hits[0].point, Point2::new(0.0, 0.0));
    assert!((hits[0].param_a - 0.5).abs() < 1e-15 && (hits[0].param_b - 0.5).abs() < 1e-15);

    let a = open("a", &[(0.0, 0.0), (1.0, 0.0)]);
    let b = open("b", &[(0.0, 1.0), (1.0, 1.0)]);
    assert!(find_intersections(&a, &b, 1e-9).is_empty());

    let b = open("b", &[(0.0, 0.0), (0.0, 1.0)]);
    let hits = find_intersections(&a, &b, 1e-9);
    assert_eq!(hits.len(), 1);
    assert_eq!(hits[0].point, Point2::new(0.0, 0.0));
    assert_eq!((hits[0].param_a, hits[0].param_b), (0.0, 0.0));
}

/// Three curves with two junctions: curve1 is cut by curve2, curve3 is cut
/// by both ends of curve1, curve2 only touches.
fn figure4_like() -> StagedGeometry {
    let c1 = open("curve1", &[(-1.0, 0.0), (0.0, 0.05), (1.0, 0.0)]);
    let c2 = open("curve2", &[(0.0, 0.05), (0.0, 0.6)]);
    let c3 = open(
        "curve3",
        &[
            (-1.2, -0.5),
            (-1.0, 0.0),
            (-1.0, 0.8),
            (1.0, 0.8),
            (1.0, 0.0),
            (1.2, -0.5),
        ],
    );
    StagedGeometry::new(0, vec![c1, c2, c3], vec![]).unwrap()
}

#[test]
fn figure4_segment_counts() {
    let s = segment_at_intersections(&figure4_like(), INTERSECTION_TOL).unwrap();
    let count = |id: &str| s.segments_of(&id.into()).count();
    assert_eq!(count("curve1"), 2);
    assert_eq!(count("curve3"), 3);
    assert_eq!(count("curve2"), 1);
}

#[test]
fn disjoint_curves_stay_whole() {
    let g = StagedGeometry::new(
        0,
        vec![
            open("a", &[(0.0, 0.0), (1.0, 0.0)]),
            open("b", &[(0.0, 1.0), (1.0, 1.0)]),
        ],
        vec![],
    )
    .unwrap();
    let s = segment_at_intersections(&g, INTERSECTION_TOL).unwrap();
    assert_eq!(s.segments.len(), 2);
    assert_eq!(s.segments[0].points, g.curves[0].points());
}

#[test]
fn crossing_at_existing_vertex_adds_nothing() {
    let g = StagedGeometry::new(
        0,
        vec![
            open("a", &[(-1.0, 0.0), (0.0, 0.0), (1.0, 0.0)]),
            open("b", &[(0.0, -1.0), (0.0, 1.0)]),
        ],
        vec![],
    )
    .unwrap();
    let s = segment_at_intersections(&g, INTERSECTION_TOL).unwrap();
    assert_eq!(s.curves[0].points().len(), 3);
    assert_eq!(s.curves[1].points().len(), 3);
    let a: Vec<_> = s.segments_of(&"a".into()).collect();
    assert_eq!(a.len(), 2);
    assert_eq!(a[0].end(), Point2::new(0.0, 0.0));
}

#[test]
fn polygon_area_examples() {
    let sq = pts(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
    assert_eq!(polygon_area(&sq).unwrap(), 1.0);
    assert_eq!(
        polygon_area(&pts(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)])).unwrap(),
        0.5
    );
    let mut cw = sq.clone();
    cw.reverse();
    assert_eq!(polygon_area(&cw).unwrap(), 1.0);
}

#[test]
fn subdomain_loops_of_split_square() {
    let s = segment_at_intersections(&common::split_square(), INTERSECTION_TOL).unwrap();
    let loops = s.loop_polygons().unwrap();
    for l in &loops {
        assert!((polygon_area(l).unwrap() - 0.5).abs() < 1e-15);
    }
}

#[test]
fn open_loop_is_rejected() {
    let g = StagedGeometry::new(
        0,
        vec![
            open("a", &[(0.0, 0.0), (1.0, 0.0)]),
            open("b", &[(1.0, 0.0), (0.0, 1.0)]),
        ],
        vec![Subdomain {
            id: "d".into(),
            pieces: vec![piece("a", 0, false), piece("b", 0, false)],
        }],
    )
    .unwrap();
    assert!(matches!(
        segment_at_intersections(&g, INTERSECTION_TOL),
        Err(GeometryError::OpenLoop { .. })
    ));
}

fn wavy(coeffs: &[f64], n: usize, shift: f64) -> Vec<Point2> {
    (0..n)
        .map(|k| {
            let x = k as f64 / (n - 1) as f64;
            let y = shift
                + coeffs
                    .iter()
                    .enumerate()
                    .map(|(j, c)| c * (std::f64::consts::PI * (j + 1) as f64 * x).sin())
                    .sum::<f64>();
            Point2::new(x, y)
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn resampling_is_idempotent(
        coeffs in prop::collection::vec(-0.3f64..0.3, 1..4),
        n_in in 5usize..40,
        n in 2usize..30,
    ) {
        let c = Curve::new("c", wavy(&coeffs, n_in, 0.0), false).unwrap();
        let once = resample_uniform(&c, n).unwrap();
        let twice = resample_uniform(&once, n).unwrap();
        for (p, q) in once.points().iter().zip(twice.points()) {
            prop_assert!((p.x - q.x).abs() <= 1e-12 && (p.y - q.y).abs() <= 1e-12);
        }
        prop_assert!(once.length() <= c.length() + 1e-12);
        prop_assert_eq!(once.points()[0], c.points()[0]);
        prop_assert_eq!(*once.points().last().unwrap(), *c.points().last().unwrap());
    }

    #[test]
    fn segmentation_conserves_vertices_and_flags_junctions(
        coeffs in prop::collection::vec(-0.2f64..0.2, 1..3),
        n_in in 5usize..30,
        x0 in 0.1f64..0.9,
        tilt in -0.5f64..0.5,
    ) {
        let a = Curve::new("a", wavy(&coeffs, n_in, 0.0), false).unwrap();
        let b = Curve::new("b", pts(&[(x0 - tilt, -2.0), (x0 + tilt, 2.0)]), false).unwrap();
        let hits = find_intersections(&a, &b, INTERSECTION_TOL);
        let g = StagedGeometry::new(0, vec![a.clone(), b], vec![]).unwrap();
        let s = match segment_at_intersections(&g, INTERSECTION_TOL) {
            Ok(s) => s,
            // tangencies are rejected by design
            Err(GeometryError::Grazing { .. }) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        for c in &s.curves {
            let mut joined: Vec<Point2> = Vec::new();
            for seg in s.segments_of(c.id()) {
                if let Some(last) = joined.last() {
                    prop_assert_eq!(*last, seg.points[0]);
                    joined.extend_from_slice(&seg.points[1..]);
                } else {
                    joined.extend_from_slice(&seg.points);
                }
            }
            prop_assert_eq!(&joined[..], c.points());
        }
        // the original vertices survive in order
        let refined = s.curves[0].points();
        let mut it = refined.iter();
        for p in a.points() {
            prop_assert!(it.any(|q| q == p));
        }
        for h in &hits {
            let flagged = s.segments.iter().any(|seg| {
                (seg.start_is_junction && seg.start() == h.point)
                    || (seg.end_is_junction && seg.end() == h.point)
            });
            prop_assert!(flagged, "intersection {} not a flagged endpoint", h.point);
        }
    }
}
