#![allow(dead_code)]

use growfem::displacement::{DisplacementField, DisplacementRow, RowKey};
use growfem::geometry::{
    ArcTable, Curve, LoopPiece, Point2, SegmentedGeometry, StagedGeometry, Subdomain,
};

pub fn pts(xy: &[(f64, f64)]) -> Vec<Point2> {
    xy.iter().map(|&(x, y)| Point2::new(x, y)).collect()
}

pub fn piece(curve: &str, segment_index: usize, reversed: bool) -> LoopPiece {
    LoopPiece {
        curve_id: curve.into(),
        segment_index,
        reversed,
    }
}

/// Axis-aligned square `[x0, x0+side] × [y0, y0+side]` as one closed curve
/// with `per_side` vertices per side, forming a single subdomain.
pub fn square(stage: i64, x0: f64, y0: f64, side: f64, per_side: usize) -> StagedGeometry {
    let mut p = Vec::new();
    let corners = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];
    for k in 0..4 {
        let (ax, ay) = corners[k];
        let (bx, by) = corners[(k + 1) % 4];
        for i in 0..per_side {
            let t = i as f64 / per_side as f64;
            p.push(Point2::new(
                x0 + side * (ax + t * (bx - ax)),
                y0 + side * (ay + t * (by - ay)),
            ));
        }
    }
    StagedGeometry::new(
        stage,
        vec![Curve::new("outer", p, true).unwrap()],
        vec![Subdomain {
            id: "domain".into(),
            pieces: vec![piece("outer", 0, false)],
        }],
    )
    .unwrap()
}

/// Unit square split by the vertical line x = 0.5 into `left` and `right`.
pub fn split_square() -> StagedGeometry {
    StagedGeometry::new(
        0,
        vec![
            Curve::new(
                "outer",
                pts(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]),
                true,
            )
            .unwrap(),
            Curve::new("mid", pts(&[(0.5, 0.0), (0.5, 1.0)]), false).unwrap(),
        ],
        vec![
            Subdomain {
                id: "left".into(),
                pieces: vec![piece("outer", 1, false), piece("mid", 0, false)],
            },
            Subdomain {
                id: "right".into(),
                pieces: vec![piece("outer", 0, false), piece("mid", 0, true)],
            },
        ],
    )
    .unwrap()
}

/// Dense polyline of the unit-radius arc from `from_deg` to `to_deg`.
pub fn arc(n: usize, from_deg: f64, to_deg: f64) -> Vec<Point2> {
    (0..n)
        .map(|k| {
            let th = (from_deg + (to_deg - from_deg) * k as f64 / (n - 1) as f64).to_radians();
            Point2::new(th.cos(), th.sin())
        })
        .collect()
}

/// Parameter-keyed rows at every segment vertex carrying `map(vertex)`.
pub fn vertex_fields(
    seg: &SegmentedGeometry,
    map: impl Fn(Point2) -> (f64, f64),
) -> Vec<DisplacementField> {
    seg.segments
        .iter()
        .map(|s| {
            let table = ArcTable::new(&s.points);
            let length = table.length();
            let rows = s
                .points
                .iter()
                .zip(table.cumulative())
                .map(|(p, c)| {
                    let (dx, dy) = map(*p);
                    DisplacementRow {
                        key: RowKey::Param(c / length),
                        dx,
                        dy,
                    }
                })
                .collect();
            DisplacementField::from_rows(s.segment_ref(), rows).unwrap()
        })
        .collect()
}
