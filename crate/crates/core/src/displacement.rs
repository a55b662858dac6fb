//! Uniform displacement fields between corresponding curve segments.
//!
//! A field pairs the i-th of `n` equal-chord samples on the stage-t segment
//! with the i-th sample on the stage-(t+1) segment. Rows are keyed either
//! by the stage-t coordinates or by the normalized boundary parameter.

use thiserror::Error;

use crate::geometry::{
    resample_segment, ArcTable, CurveSegment, GeometryError, Point2, SegmentRef, INTERSECTION_TOL,
};

/// Points per segment when no override is configured.
pub const DEFAULT_POINTS_PER_SEGMENT: usize = 100;

#[derive(Debug, Error, PartialEq)]
pub enum DisplacementError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("segment {0} is a closed loop at one stage and open at the other")]
    ClosedMismatch(SegmentRef),
    #[error("segments {0} and {1} do not correspond")]
    Mismatch(SegmentRef, SegmentRef),
    #[error("query {query} is outside the field domain of {segment}")]
    OutOfDomain { segment: SegmentRef, query: String },
    #[error("query kind does not match the field keying of {0}")]
    WrongKeying(SegmentRef),
}

pub type Result<T> = std::result::Result<T, DisplacementError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Keying {
    Coordinate,
    #[default]
    Parameter,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RowKey {
    Point(Point2),
    Param(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisplacementRow {
    pub key: RowKey,
    pub dx: f64,
    pub dy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Query {
    Param(f64),
    Point(Point2),
}

/// One segment's displacement table.
#[derive(Debug, Clone, PartialEq)]
pub struct DisplacementField {
    segment: SegmentRef,
    keying: Keying,
    rows: Vec<DisplacementRow>,
    /// Stage-t sample points (the row sources) regardless of keying.
    sources: Vec<Point2>,
    /// Normalized arc parameter of each source on the stage-t segment.
    params: Vec<f64>,
    /// Distance within which a coordinate query counts as on the curve.
    point_tol: f64,
}

/// Build the uniform displacement field from `from` (stage t) to `to`
/// (stage t+1) using `n` samples on each.
pub fn uniform_displacement_field(
    from: &CurveSegment,
    to: &CurveSegment,
    n: usize,
    keying: Keying,
) -> Result<DisplacementField> {
    if from.closed_loop != to.closed_loop {
        return Err(DisplacementError::ClosedMismatch(from.segment_ref()));
    }
    if from.parent_id != to.parent_id || from.segment_index != to.segment_index {
        return Err(DisplacementError::Mismatch(
            from.segment_ref(),
            to.segment_ref(),
        ));
    }
    let src = resample_segment(from, n)?;
    let dst = resample_segment(to, n)?;

    let table = ArcTable::new(&from.points);
    let length = table.length();
    let mut params: Vec<f64> = src.iter().map(|p| table.project(*p).arc / length).collect();
    params[0] = 0.0;
    params[n - 1] = 1.0;
    for k in 1..n {
        // projection noise must not reorder the keys
        if params[k] < params[k - 1] {
            params[k] = params[k - 1];
        }
    }

    let rows = src
        .iter()
        .zip(&dst)
        .zip(&params)
        .map(|((s, d), &u)| DisplacementRow {
            key: match keying {
                Keying::Coordinate => RowKey::Point(*s),
                Keying::Parameter => RowKey::Param(u),
            },
            dx: d.x - s.x,
            dy: d.y - s.y,
        })
        .collect();

    // sagitta between the source polyline and the sample chords
    let chords = ArcTable::new(&src);
    let sag = from
        .points
        .iter()
        .map(|p| chords.project(*p).distance)
        .fold(0.0, f64::max);

    Ok(DisplacementField {
        segment: from.segment_ref(),
        keying,
        rows,
        sources: src,
        params,
        point_tol: sag + INTERSECTION_TOL,
    })
}

/// Normalized arc length from the segment start to `p`.
pub fn boundary_parameter(
    segment: &CurveSegment,
    p: Point2,
) -> std::result::Result<f64, GeometryError> {
    let table = ArcTable::new(&segment.points);
    let length = table.length();
    let tol = INTERSECTION_TOL * length.max(1.0);
    match table.locate(p, tol) {
        Some(arc) => Ok((arc / length).clamp(0.0, 1.0)),
        None => Err(GeometryError::NotOnSegment {
            segment: segment.segment_ref(),
            point: p,
            distance: table.project(p).distance,
        }),
    }
}

impl DisplacementField {
    /// Build a field directly from rows (e.g. read back from CSV).
    pub fn from_rows(segment: SegmentRef, rows: Vec<DisplacementRow>) -> Result<Self> {
        let keying = match rows.first().map(|r| r.key) {
            Some(RowKey::Point(_)) => Keying::Coordinate,
            _ => Keying::Parameter,
        };
        let mut sources = Vec::new();
        let mut params = Vec::new();
        for r in &rows {
            match (keying, r.key) {
                (Keying::Coordinate, RowKey::Point(p)) => sources.push(p),
                (Keying::Parameter, RowKey::Param(s)) => params.push(s),
                _ => return Err(DisplacementError::WrongKeying(segment)),
            }
        }
        if keying == Keying::Coordinate {
            let t = ArcTable::new(&sources);
            let l = t.length();
            params = t.cumulative().iter().map(|c| c / l).collect();
        }
        Ok(Self {
            segment,
            keying,
            rows,
            sources,
            params,
            point_tol: INTERSECTION_TOL,
        })
    }

    pub fn segment_ref(&self) -> &SegmentRef {
        &self.segment
    }

    pub fn keying(&self) -> Keying {
        self.keying
    }

    pub fn rows(&self) -> &[DisplacementRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn sources(&self) -> &[Point2] {
        &self.sources
    }

    /// Piecewise-linear interpolation; no extrapolation.
    pub fn evaluate(&self, query: Query) -> Result<(f64, f64)> {
        match (self.keying, query) {
            (Keying::Parameter, Query::Param(s)) => self.at_param(s),
            (Keying::Coordinate, Query::Point(p)) => self.at_point(p),
            _ => Err(DisplacementError::WrongKeying(self.segment.clone())),
        }
    }

    /// Parameter lookup works for either keying.
    pub fn at_param(&self, s: f64) -> Result<(f64, f64)> {
        if !(0.0..=1.0).contains(&s) || self.params.len() != self.rows.len() {
            return Err(DisplacementError::OutOfDomain {
                segment: self.segment.clone(),
                query: format!("s={s}"),
            });
        }
        let hi = self.params.partition_point(|&u| u < s);
        if hi < self.params.len() && self.params[hi] == s {
            let r = &self.rows[hi];
            return Ok((r.dx, r.dy));
        }
        let hi = hi.min(self.rows.len() - 1).max(1);
        let lo = hi - 1;
        let (s0, s1) = (self.params[lo], self.params[hi]);
        let t = if s1 > s0 { (s - s0) / (s1 - s0) } else { 0.0 };
        let (a, b) = (&self.rows[lo], &self.rows[hi]);
        Ok((a.dx + t * (b.dx - a.dx), a.dy + t * (b.dy - a.dy)))
    }

    fn at_point(&self, p: Point2) -> Result<(f64, f64)> {
        if let Some(k) = self.sources.iter().position(|q| *q == p) {
            let r = &self.rows[k];
            return Ok((r.dx, r.dy));
        }
        let table = ArcTable::new(&self.sources);
        let proj = table.project(p);
        if proj.distance > self.point_tol {
            return Err(DisplacementError::OutOfDomain {
                segment: self.segment.clone(),
                query: p.to_string(),
            });
        }
        let cum = table.cumulative();
        let hi = cum
            .partition_point(|&c| c < proj.arc)
            .clamp(1, cum.len() - 1);
        let lo = hi - 1;
        let t = (proj.arc - cum[lo]) / (cum[hi] - cum[lo]);
        let (a, b) = (&self.rows[lo], &self.rows[hi]);
        Ok((a.dx + t * (b.dx - a.dx), a.dy + t * (b.dy - a.dy)))
    }
}
