mod common;

use growfem::displacement::{uniform_displacement_field, DisplacementField, Keying};
use growfem::fixture::generate_fixture;
use growfem::geometry::{
    polygon_area, segment_at_intersections, CurveId, Point2, SegmentedGeometry, StagedGeometry,
    INTERSECTION_TOL,
};
use growfem::mesh::{
    default_edge_length, move_mesh, prepare_motion, quality_report, triangulate, Mesh,
};

fn segmented(g: &StagedGeometry) -> SegmentedGeometry {
    segment_at_intersections(g, INTERSECTION_TOL).unwrap()
}

fn corresponding_fields(s0: &SegmentedGeometry, s1: &SegmentedGeometry) -> Vec<DisplacementField> {
    s0.segments
        .iter()
        .map(|f| {
            let t = s1.segment_by_ref(&f.segment_ref()).unwrap();
            uniform_displacement_field(f, t, 100, Keying::Parameter).unwrap()
        })
        .collect()
}

fn fixture_mesh(scale: f64) -> (Mesh, SegmentedGeometry, SegmentedGeometry) {
    let (g0, g1) = generate_fixture(scale).unwrap();
    let (s0, s1) = (segmented(&g0), segmented(&g1));
    let mesh = triangulate(&s0, default_edge_length(&s0)).unwrap();
    (mesh, s0, s1)
}

fn outer_polygon(seg: &SegmentedGeometry) -> f64 {
    let outer = CurveId("curve3".into());
    let mut pts: Vec<Point2> = Vec::new();
    for s in seg.segments_of(&outer) {
        pts.extend_from_slice(&s.points[..s.points.len() - 1]);
    }
    polygon_area(&pts).unwrap()
}

#[test]
fn unit_square_at_half_edge_length() {
    let mesh = triangulate(&segmented(&common::square(0, 0.0, 0.0, 1.0, 1)), 0.5).unwrap();
    assert!(mesh.element_count() >= 4);
    assert!(mesh.element_labels.iter().all(|&l| l == 0));
    assert!((0..mesh.element_count()).all(|e| mesh.signed_area(e) > 0.0));
    let q = quality_report(&mesh);
    assert_eq!(q.inverted_count, 0);
    assert!(q.min_quality > 0.0);
    assert!((mesh.total_area() - 1.0).abs() < 1e-12);
}

#[test]
fn split_square_has_no_straddling_elements() {
    let seg = segmented(&common::split_square());
    let mesh = triangulate(&seg, default_edge_length(&seg)).unwrap();
    let left = mesh.label_index(&"left".into()).unwrap();
    for (e, t) in mesh.triangles.iter().enumerate() {
        let xs = t.map(|i| mesh.nodes[i].x);
        let on_left = xs.iter().all(|&x| x <= 0.5 + 1e-12);
        let on_right = xs.iter().all(|&x| x >= 0.5 - 1e-12);
        assert!(on_left || on_right, "element {e} straddles the midline");
        assert_eq!(mesh.element_labels[e] == left, on_left);
    }
    for a in mesh.labeled_areas() {
        assert!((a - 0.5).abs() <= 0.005, "labeled area {a}");
    }
    let mid_edges = mesh
        .boundary_edges
        .iter()
        .filter(|e| e.segment.parent_id.0 == "mid")
        .count();
    assert!(mid_edges >= 2);
}

#[test]
fn fixture_labels_partition_the_outer_polygon() {
    let (mesh, s0, _) = fixture_mesh(1.0);
    let areas = mesh.labeled_areas();
    assert_eq!(areas.len(), 3);
    assert!(areas.iter().all(|&a| a > 0.0));
    let outer = outer_polygon(&s0);
    let sum: f64 = areas.iter().sum();
    assert!(((sum - outer) / outer).abs() <= 1e-6, "{sum} vs {outer}");
    for (a, poly) in areas.iter().zip(s0.loop_polygons().unwrap()) {
        let target = polygon_area(&poly).unwrap();
        assert!(((a - target) / target).abs() <= 0.01, "{a} vs {target}");
    }
    let q = quality_report(&mesh);
    assert_eq!(q.inverted_count, 0);
    assert!(q.min_quality > 0.0);
}

#[test]
fn self_intersecting_input_is_rejected() {
    let rejected = growfem::geometry::Curve::new(
        "outer",
        common::pts(&[(0.0, 0.0), (1.0, 1.0), (1.0, 0.0), (0.0, 1.0)]),
        true,
    )
    .map_err(|e| e.to_string())
    .and_then(|c| {
        StagedGeometry::new(
            0,
            vec![c],
            vec![growfem::geometry::Subdomain {
                id: "d".into(),
                pieces: vec![common::piece("outer", 0, false)],
            }],
        )
        .map_err(|e| e.to_string())
    })
    .and_then(|g| segment_at_intersections(&g, INTERSECTION_TOL).map_err(|e| e.to_string()))
    .and_then(|seg| triangulate(&seg, 0.2).map_err(|e| e.to_string()));
    assert!(rejected.is_err());
}

#[test]
fn constant_displacement_moves_every_node_exactly() {
    let seg = segmented(&common::split_square());
    let mesh = triangulate(&seg, 0.1).unwrap();
    let fields = common::vertex_fields(&seg, |_| (1.0, 0.0));
    let moved = move_mesh(&mesh, &fields, 1.0).unwrap();
    for (p, q) in mesh.nodes.iter().zip(&moved.nodes) {
        assert_eq!(q.x, p.x + 1.0);
        assert_eq!(q.y, p.y);
    }
}

#[test]
fn zero_fraction_is_identity() {
    let (mesh, s0, s1) = fixture_mesh(1.0);
    let moved = move_mesh(&mesh, &corresponding_fields(&s0, &s1), 0.0).unwrap();
    assert_eq!(moved.nodes, mesh.nodes);
}

#[test]
fn affine_boundary_data_is_reproduced_inside() {
    for g in [common::square(0, 0.0, 0.0, 1.0, 4), common::split_square()] {
        let seg = segmented(&g);
        let mesh = triangulate(&seg, 0.08).unwrap();
        let map = |p: Point2| (0.1 * p.x, 0.2 * p.y);
        let moved = move_mesh(&mesh, &common::vertex_fields(&seg, map), 1.0).unwrap();
        for (p, q) in mesh.nodes.iter().zip(&moved.nodes) {
            let (dx, dy) = map(*p);
            assert!((q.x - p.x - dx).abs() <= 1e-10 && (q.y - p.y - dy).abs() <= 1e-10);
        }
    }
}

#[test]
fn segmented_motion_lands_junctions_and_conserves_labels() {
    let (mesh, s0, s1) = fixture_mesh(1.0);
    let fields = corresponding_fields(&s0, &s1);
    let motion = prepare_motion(&mesh, &fields).unwrap();
    assert!(motion.max_principle_violation <= 1e-12);
    let mut labels_before = mesh.element_labels.clone();
    labels_before.sort_unstable();
    for k in 1..=4 {
        let moved = motion.apply(&mesh, k as f64 / 4.0).unwrap();
        let mut labels = moved.element_labels.clone();
        labels.sort_unstable();
        assert_eq!(labels, labels_before);
        assert_eq!(quality_report(&moved).inverted_count, 0);
    }
    let last = motion.apply(&mesh, 1.0).unwrap();
    let targets: Vec<Point2> = s1
        .segments
        .iter()
        .flat_map(|s| {
            let mut v = Vec::new();
            if s.start_is_junction {
                v.push(s.start());
            }
            if s.end_is_junction {
                v.push(s.end());
            }
            v
        })
        .collect();
    assert!(!mesh.junction_nodes.is_empty());
    for &j in &mesh.junction_nodes {
        let err = targets
            .iter()
            .map(|t| t.distance(last.nodes[j]))
            .fold(f64::INFINITY, f64::min);
        assert!(err <= 1e-9, "junction node {j} misses by {err}");
    }
    let absolute: f64 = (0..last.element_count())
        .map(|e| last.signed_area(e).abs())
        .sum();
    let target = outer_polygon(&s1);
    assert!(
        ((absolute - target) / target).abs() <= 0.005,
        "{absolute} vs {target}"
    );
}

#[test]
fn whole_curve_motion_inverts_elements() {
    let (mesh, s0, s1) = fixture_mesh(1.0);
    let whole = mesh.retag(&s0.whole_curve_segments(), INTERSECTION_TOL);
    let fields: Vec<DisplacementField> = s0
        .whole_curve_segments()
        .iter()
        .zip(s1.whole_curve_segments())
        .map(|(f, t)| uniform_displacement_field(f, &t, 100, Keying::Parameter).unwrap())
        .collect();
    let moved = move_mesh(&whole, &fields, 1.0).unwrap();
    assert!(quality_report(&moved).inverted_count >= 1);
}

#[test]
fn bad_fraction_and_missing_field_are_errors() {
    let (mesh, s0, s1) = fixture_mesh(1.0);
    let fields = corresponding_fields(&s0, &s1);
    assert!(move_mesh(&mesh, &fields, 1.5).is_err());
    assert!(move_mesh(&mesh, &fields[1..], 0.5).is_err());
}
