//! Boundary curves, their intersections, and junction-preserving segmentation.

mod intersect;
mod point;
pub(crate) mod polyline;
mod segment;

use std::fmt;

use thiserror::Error;

pub use intersect::{find_intersections, Intersection};
pub use point::{orient2d, project_on_segment, Point2};
pub use polyline::{ArcTable, Projection};
pub use segment::{segment_at_intersections, SegmentedGeometry};

/// Default tolerance for treating two points as the same junction.
pub const INTERSECTION_TOL: f64 = 1e-9;

/// Consecutive vertices closer than this are rejected.
pub const MIN_VERTEX_SPACING: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("curve `{0}` needs at least {1} points")]
    TooFewPoints(CurveId, usize),
    #[error("curve `{0}` has a non-finite coordinate at vertex {1}")]
    NonFinite(CurveId, usize),
    #[error("curve `{0}` repeats vertex {1} (consecutive points closer than 1e-12)")]
    RepeatedVertex(CurveId, usize),
    #[error("closed curve `{0}` stores its first point again at the end")]
    ExplicitClosure(CurveId),
    #[error("curve `{0}` has zero length")]
    Degenerate(CurveId),
    #[error("resampling needs n >= 2, got {0}")]
    TooFewSamples(usize),
    #[error("tangential contact between `{a}` and `{b}` near {at}: {detail}")]
    Grazing {
        a: CurveId,
        b: CurveId,
        at: Point2,
        detail: String,
    },
    #[error("unknown curve `{0}`")]
    UnknownCurve(CurveId),
    #[error("duplicate curve id `{0}`")]
    DuplicateCurve(CurveId),
    #[error("subdomain `{0}` references segment {1}:{2} which does not exist")]
    UnknownSegment(SubdomainId, CurveId, usize),
    #[error(
        "subdomain `{id}` loop is not closed: piece {piece} ends at {end}, next starts at {next}"
    )]
    OpenLoop {
        id: SubdomainId,
        piece: usize,
        end: Point2,
        next: Point2,
    },
    #[error("polygon needs at least 3 points, got {0}")]
    PolygonTooSmall(usize),
    #[error("point {point} is not on segment {segment} (distance {distance:e})")]
    NotOnSegment {
        segment: SegmentRef,
        point: Point2,
        distance: f64,
    },
    #[error("stage topology differs: {0}")]
    TopologyMismatch(String),
}

pub type Result<T> = std::result::Result<T, GeometryError>;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CurveId(pub String);

impl fmt::Display for CurveId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for CurveId {
    fn from(s: &str) -> Self {
        CurveId(s.to_owned())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubdomainId(pub String);

impl fmt::Display for SubdomainId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for SubdomainId {
    fn from(s: &str) -> Self {
        SubdomainId(s.to_owned())
    }
}

/// An ordered boundary polyline. Closed curves do not repeat their first point.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    id: CurveId,
    points: Vec<Point2>,
    closed: bool,
}

impl Curve {
    pub fn new(id: impl Into<CurveId>, points: Vec<Point2>, closed: bool) -> Result<Self> {
        let id = id.into();
        let min = if closed { 3 } else { 2 };
        if points.len() < min {
            return Err(GeometryError::TooFewPoints(id, min));
        }
        if let Some(i) = points.iter().position(|p| !p.is_finite()) {
            return Err(GeometryError::NonFinite(id, i));
        }
        for (i, w) in points.windows(2).enumerate() {
            if w[0].distance(w[1]) <= MIN_VERTEX_SPACING {
                return Err(GeometryError::RepeatedVertex(id, i + 1));
            }
        }
        if closed && points[0].distance(points[points.len() - 1]) <= MIN_VERTEX_SPACING {
            return Err(GeometryError::ExplicitClosure(id));
        }
        Ok(Self { id, points, closed })
    }

    pub fn id(&self) -> &CurveId {
        &self.id
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    /// Vertex list with the closing point appended for closed curves.
    pub fn traversal(&self) -> Vec<Point2> {
        let mut pts = self.points.clone();
        if self.closed {
            pts.push(self.points[0]);
        }
        pts
    }

    pub fn length(&self) -> f64 {
        ArcTable::new(&self.traversal()).length()
    }

    /// The whole curve as a single segment (index 0, no junction flags).
    pub fn as_segment(&self) -> CurveSegment {
        CurveSegment {
            parent_id: self.id.clone(),
            segment_index: 0,
            points: self.traversal(),
            start_is_junction: false,
            end_is_junction: false,
            closed_loop: self.closed,
        }
    }
}

/// Identifies one segment of a parent curve.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SegmentRef {
    pub parent_id: CurveId,
    pub segment_index: usize,
}

impl fmt::Display for SegmentRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.parent_id, self.segment_index)
    }
}

/// A piece of a parent curve between consecutive split points.
///
/// Points are always stored as an open polyline; a segment that spans an
/// entire closed curve repeats the start point at the end and sets
/// `closed_loop`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSegment {
    pub parent_id: CurveId,
    pub segment_index: usize,
    pub points: Vec<Point2>,
    pub start_is_junction: bool,
    pub end_is_junction: bool,
    pub closed_loop: bool,
}

impl CurveSegment {
    pub fn segment_ref(&self) -> SegmentRef {
        SegmentRef {
            parent_id: self.parent_id.clone(),
            segment_index: self.segment_index,
        }
    }

    pub fn start(&self) -> Point2 {
        self.points[0]
    }

    pub fn end(&self) -> Point2 {
        self.points[self.points.len() - 1]
    }

    pub fn length(&self) -> f64 {
        ArcTable::new(&self.points).length()
    }
}

/// One constituent of a subdomain boundary loop.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoopPiece {
    pub curve_id: CurveId,
    pub segment_index: usize,
    pub reversed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Subdomain {
    pub id: SubdomainId,
    pub pieces: Vec<LoopPiece>,
}

/// Boundary curves and subdomain loops at one developmental stage.
///
/// Subdomain loops reference segments by `(curve_id, segment_index)` as
/// produced by [`segment_at_intersections`], so loops are only assembled
/// after segmentation.
#[derive(Debug, Clone, PartialEq)]
pub struct StagedGeometry {
    pub stage_time: i64,
    pub curves: Vec<Curve>,
    pub subdomains: Vec<Subdomain>,
}

impl StagedGeometry {
    pub fn new(stage_time: i64, curves: Vec<Curve>, subdomains: Vec<Subdomain>) -> Result<Self> {
        for (i, c) in curves.iter().enumerate() {
            if curves[..i].iter().any(|o| o.id == c.id) {
                return Err(GeometryError::DuplicateCurve(c.id.clone()));
            }
        }
        for sd in &subdomains {
            for piece in &sd.pieces {
                if !curves.iter().any(|c| c.id == piece.curve_id) {
                    return Err(GeometryError::UnknownCurve(piece.curve_id.clone()));
                }
            }
        }
        Ok(Self {
            stage_time,
            curves,
            subdomains,
        })
    }

    pub fn curve(&self, id: &CurveId) -> Option<&Curve> {
        self.curves.iter().find(|c| &c.id == id)
    }
}

/// Resample a curve to `n` points with equal consecutive chord lengths.
///
/// Open curves keep their exact end points. Closed curves start at their
/// first stored point and the closing chord has the same length as the rest.
pub fn resample_uniform(curve: &Curve, n: usize) -> Result<Curve> {
    if n < 2 {
        return Err(GeometryError::TooFewSamples(n));
    }
    let trav = curve.traversal();
    if ArcTable::new(&trav).length() <= 0.0 {
        return Err(GeometryError::Degenerate(curve.id.clone()));
    }
    if curve.closed {
        if n < 3 {
            return Err(GeometryError::TooFewSamples(n));
        }
        let mut pts = polyline::equal_chord_points(&trav, n + 1);
        pts.pop();
        Curve::new(curve.id.clone(), pts, true)
    } else {
        Curve::new(
            curve.id.clone(),
            polyline::equal_chord_points(&trav, n),
            false,
        )
    }
}

/// Resample an open segment polyline to `n` points (ends pinned).
pub fn resample_segment(segment: &CurveSegment, n: usize) -> Result<Vec<Point2>> {
    if n < 2 {
        return Err(GeometryError::TooFewSamples(n));
    }
    if segment.length() <= 0.0 {
        return Err(GeometryError::Degenerate(segment.parent_id.clone()));
    }
    Ok(polyline::equal_chord_points(&segment.points, n))
}

/// Signed shoelace area; positive for counterclockwise loops.
pub fn signed_area(points: &[Point2]) -> f64 {
    let n = points.len();
    let mut acc = 0.0;
    for i in 0..n {
        let a = points[i];
        let b = points[(i + 1) % n];
        acc += a.x * b.y - b.x * a.y;
    }
    0.5 * acc
}

/// Absolute shoelace area of an implicitly closed loop.
///
/// Self-intersecting loops are still measured; a warning is logged.
pub fn polygon_area(points: &[Point2]) -> Result<f64> {
    if points.len() < 3 {
        return Err(GeometryError::PolygonTooSmall(points.len()));
    }
    if is_self_intersecting(points) {
        log::warn!(
            "polygon with {} vertices is self-intersecting; shoelace area is a signed sum",
            points.len()
        );
    }
    Ok(signed_area(points).abs())
}

/// Proper crossings between non-adjacent edges of a closed loop.
pub fn is_self_intersecting(points: &[Point2]) -> bool {
    let n = points.len();
    for i in 0..n {
        let (a0, a1) = (points[i], points[(i + 1) % n]);
        for j in (i + 2)..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (b0, b1) = (points[j], points[(j + 1) % n]);
            let d1 = orient2d(a0, a1, b0);
            let d2 = orient2d(a0, a1, b1);
            let d3 = orient2d(b0, b1, a0);
            let d4 = orient2d(b0, b1, a1);
            if d1 * d2 < 0.0 && d3 * d4 < 0.0 {
                return true;
            }
        }
    }
    false
}

/// Even-odd point-in-polygon test.
pub fn point_in_polygon(p: Point2, poly: &[Point2]) -> bool {
    let n = poly.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (pi, pj) = (poly[i], poly[j]);
        if (pi.y > p.y) != (pj.y > p.y) {
            let x = (pj.x - pi.x) * (p.y - pi.y) / (pj.y - pi.y) + pi.x;
            if p.x < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}
