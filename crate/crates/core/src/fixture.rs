//! Deterministic synthetic limb-bud geometry at two stages.
//!
//! A half-ellipse on a flat base is split into three subdomains by two
//! interior arcs. `curve1` runs from the base to the left side of the outer
//! boundary; `curve2` leaves `curve1` at its midpoint and ends on the right
//! side. The outer boundary is `curve3`, stored counterclockwise from the
//! distal-right base corner.

use thiserror::Error;

use crate::geometry::{Curve, GeometryError, LoopPiece, Point2, StagedGeometry, Subdomain};

pub const SEMI_MINOR: f64 = 0.6;
const ARC_INTERVALS: usize = 96;
const BASE_INTERVALS: usize = 40;
const INNER_INTERVALS: usize = 40;

#[derive(Debug, Error, PartialEq)]
pub enum FixtureError {
    #[error("deformation scale {0} is outside (0, 2]")]
    BadScale(f64),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Shape parameters of one stage.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Stage {
    semi_major: f64,
    right_deg: f64,
    left_deg: f64,
    base_fraction: f64,
}

impl Stage {
    fn at(&self, deg: f64) -> Point2 {
        let th = deg.to_radians();
        Point2::new(self.semi_major * th.cos(), SEMI_MINOR * th.sin())
    }

    fn j_right(&self) -> Point2 {
        self.at(self.right_deg)
    }

    fn j_left(&self) -> Point2 {
        self.at(self.left_deg)
    }

    fn j_base(&self) -> Point2 {
        Point2::new(-self.base_fraction * self.semi_major, 0.0)
    }
}

fn bezier(p0: Point2, c: Point2, p2: Point2, t: f64) -> Point2 {
    let u = 1.0 - t;
    p0 * (u * u) + c * (2.0 * u * t) + p2 * (t * t)
}

/// Control point offset from the chord midpoint along the chord's right
/// normal by `bulge` times the chord length.
fn control(p0: Point2, p2: Point2, bulge: f64) -> Point2 {
    let d = p2 - p0;
    let mid = p0.lerp(p2, 0.5);
    Point2::new(mid.x + bulge * d.y, mid.y - bulge * d.x)
}

fn bezier_points(p0: Point2, c: Point2, p2: Point2) -> Vec<Point2> {
    let mut pts: Vec<Point2> = (0..=INNER_INTERVALS)
        .map(|k| bezier(p0, c, p2, k as f64 / INNER_INTERVALS as f64))
        .collect();
    pts[0] = p0;
    pts[INNER_INTERVALS] = p2;
    pts
}

fn outer_boundary(s: &Stage) -> Vec<Point2> {
    let a = s.semi_major;
    let step = 180.0 / ARC_INTERVALS as f64;
    let mut angles: Vec<f64> = (0..ARC_INTERVALS).map(|k| k as f64 * step).collect();
    angles.retain(|&d| (d - s.right_deg).abs() > 1e-6 && (d - s.left_deg).abs() > 1e-6);
    angles.push(s.right_deg);
    angles.push(s.left_deg);
    angles.sort_by(f64::total_cmp);

    let mut pts: Vec<Point2> = angles.iter().map(|&d| s.at(d)).collect();
    pts[0] = Point2::new(a, 0.0);
    pts.push(Point2::new(-a, 0.0));

    let jb = s.j_base();
    let mut xs: Vec<f64> = (1..BASE_INTERVALS)
        .map(|k| -a + 2.0 * a * k as f64 / BASE_INTERVALS as f64)
        .filter(|x| (x - jb.x).abs() > 1e-6 * a)
        .collect();
    xs.push(jb.x);
    xs.sort_by(f64::total_cmp);
    pts.extend(xs.into_iter().map(|x| Point2::new(x, 0.0)));
    pts
}

fn stage_geometry(stage_time: i64, s: &Stage) -> Result<StagedGeometry, FixtureError> {
    let (jb, jl, jr) = (s.j_base(), s.j_left(), s.j_right());
    let c1 = bezier_points(jb, control(jb, jl, 0.25), jl);
    let p = c1[INNER_INTERVALS / 2];
    let c2 = bezier_points(p, control(p, jr, -0.2), jr);

    let curves = vec![
        Curve::new("curve1", c1, false)?,
        Curve::new("curve2", c2, false)?,
        Curve::new("curve3", outer_boundary(s), true)?,
    ];
    let piece = |curve: &str, segment_index, reversed| LoopPiece {
        curve_id: curve.into(),
        segment_index,
        reversed,
    };
    let subdomains = vec![
        Subdomain {
            id: "domain1".into(),
            pieces: vec![
                piece("curve3", 1, false),
                piece("curve1", 0, false),
                piece("curve1", 1, false),
            ],
        },
        Subdomain {
            id: "domain2".into(),
            pieces: vec![
                piece("curve3", 2, false),
                piece("curve2", 0, true),
                piece("curve1", 0, true),
            ],
        },
        Subdomain {
            id: "domain3".into(),
            pieces: vec![
                piece("curve3", 0, false),
                piece("curve1", 1, true),
                piece("curve2", 0, false),
            ],
        },
    ];
    Ok(StagedGeometry::new(stage_time, curves, subdomains)?)
}

/// The stage-t and stage-(t+1) geometries. The outer boundary grows by
/// `1 + 0.3·scale` along its major axis and the junctions on its arc move
/// distally by `12·scale` degrees.
pub fn generate_fixture(
    deformation_scale: f64,
) -> Result<(StagedGeometry, StagedGeometry), FixtureError> {
    if !(deformation_scale > 0.0 && deformation_scale <= 2.0) {
        return Err(FixtureError::BadScale(deformation_scale));
    }
    let t = Stage {
        semi_major: 1.0,
        right_deg: 40.0,
        left_deg: 145.0,
        base_fraction: 0.35,
    };
    let t1 = Stage {
        semi_major: 1.0 + 0.3 * deformation_scale,
        right_deg: 40.0 + 12.0 * deformation_scale,
        left_deg: 145.0 - 12.0 * deformation_scale,
        base_fraction: 0.35,
    };
    Ok((stage_geometry(0, &t)?, stage_geometry(1, &t1)?))
}
