use super::intersect::{contacts, crosses, neighbours};
use super::point::Point2;
use super::polyline::ArcTable;
use super::{
    Curve, CurveId, CurveSegment, GeometryError, Result, SegmentRef, StagedGeometry, Subdomain,
};

/// A staged geometry whose curves have been split at every junction.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentedGeometry {
    pub stage_time: i64,
    /// Parent curves with junction vertices inserted (or snapped).
    pub curves: Vec<Curve>,
    /// Segments in curve order, then traversal order.
    pub segments: Vec<CurveSegment>,
    /// Junction points, as inserted into every curve that meets there.
    pub junctions: Vec<Point2>,
    pub subdomains: Vec<Subdomain>,
}

struct JunctionOnCurve {
    arc: f64,
    junction: usize,
}

/// Split every curve at its intersections with the other curves, so that
/// each junction becomes a shared segment endpoint.
///
/// Transversal crossings and T-contacts (where one curve ends on another)
/// are accepted. Tangential touching and collinear overlap are rejected.
pub fn segment_at_intersections(geometry: &StagedGeometry, tol: f64) -> Result<SegmentedGeometry> {
    let curves = &geometry.curves;
    let travs: Vec<Vec<Point2>> = curves.iter().map(Curve::traversal).collect();
    let mut junctions: Vec<Point2> = Vec::new();
    let mut per_curve: Vec<Vec<JunctionOnCurve>> = curves.iter().map(|_| Vec::new()).collect();

    for i in 0..curves.len() {
        for j in (i + 1)..curves.len() {
            let (a, b) = (&curves[i], &curves[j]);
            let la = ArcTable::new(&travs[i]).length();
            let lb = ArcTable::new(&travs[j]).length();
            for c in contacts(&travs[i], a.is_closed(), &travs[j], b.is_closed(), tol) {
                if c.run_length > tol {
                    return Err(GeometryError::Grazing {
                        a: a.id().clone(),
                        b: b.id().clone(),
                        at: c.point,
                        detail: format!("curves overlap over arc length {:e}", c.run_length),
                    });
                }
                let a_end = !a.is_closed() && (c.arc_a <= tol || c.arc_a >= la - tol);
                let b_end = !b.is_closed() && (c.arc_b <= tol || c.arc_b >= lb - tol);
                if !a_end && !b_end {
                    let ha = probe_step(&travs[i], tol);
                    let hb = probe_step(&travs[j], tol);
                    let (ap, an) = neighbours(&travs[i], a.is_closed(), c.arc_a, ha);
                    let (bp, bn) = neighbours(&travs[j], b.is_closed(), c.arc_b, hb);
                    let transversal = match (ap, an, bp, bn) {
                        (Some(ap), Some(an), Some(bp), Some(bn)) => {
                            crosses(c.point, (ap, an), (bp, bn))
                        }
                        _ => true,
                    };
                    if !transversal {
                        return Err(GeometryError::Grazing {
                            a: a.id().clone(),
                            b: b.id().clone(),
                            at: c.point,
                            detail: "curves touch without crossing".to_owned(),
                        });
                    }
                }
                let jid = match junctions.iter().position(|p| p.distance(c.point) <= tol) {
                    Some(k) => k,
                    None => {
                        junctions.push(c.point);
                        junctions.len() - 1
                    }
                };
                per_curve[i].push(JunctionOnCurve {
                    arc: c.arc_a,
                    junction: jid,
                });
                per_curve[j].push(JunctionOnCurve {
                    arc: c.arc_b,
                    junction: jid,
                });
            }
        }
    }

    let mut new_curves = Vec::with_capacity(curves.len());
    let mut segments = Vec::new();
    for (ci, curve) in curves.iter().enumerate() {
        let mut on = std::mem::take(&mut per_curve[ci]);
        on.sort_by(|x, y| x.arc.total_cmp(&y.arc));
        on.dedup_by_key(|j| j.junction);
        let (points, split) = insert_junctions(curve, &on, &junctions, tol);
        let split_curve = Curve::new(curve.id().clone(), points, curve.is_closed())?;
        segments.extend(split_into_segments(&split_curve, &split));
        new_curves.push(split_curve);
    }

    let seg = SegmentedGeometry {
        stage_time: geometry.stage_time,
        curves: new_curves,
        segments,
        junctions,
        subdomains: geometry.subdomains.clone(),
    };
    for sd in &seg.subdomains {
        seg.loop_polygon_of(sd, tol)?;
    }
    Ok(seg)
}

fn probe_step(trav: &[Point2], tol: f64) -> f64 {
    let min_edge = trav
        .windows(2)
        .map(|w| w[0].distance(w[1]))
        .fold(f64::INFINITY, f64::min);
    (0.25 * min_edge).max(10.0 * tol)
}

/// Vertex list with junctions inserted, plus the vertex indices to split at.
fn insert_junctions(
    curve: &Curve,
    on: &[JunctionOnCurve],
    junctions: &[Point2],
    tol: f64,
) -> (Vec<Point2>, Vec<usize>) {
    let mut pts = curve.points().to_vec();
    let mut split = Vec::new();
    for j in on {
        let p = junctions[j.junction];
        if let Some(k) = pts.iter().position(|v| v.distance(p) <= tol) {
            pts[k] = p;
            split.push(k);
            continue;
        }
        // insert into the edge that carries the junction
        let trav: Vec<Point2> = if curve.is_closed() {
            pts.iter().copied().chain(std::iter::once(pts[0])).collect()
        } else {
            pts.clone()
        };
        let proj = ArcTable::new(&trav).project(p);
        let cum = ArcTable::new(&trav).cumulative().to_vec();
        let edge = cum.partition_point(|&c| c <= proj.arc).saturating_sub(1);
        let at = edge + 1;
        for s in split.iter_mut() {
            if *s >= at {
                *s += 1;
            }
        }
        pts.insert(at, p);
        split.push(at);
    }
    split.sort_unstable();
    split.dedup();
    (pts, split)
}

fn split_into_segments(curve: &Curve, split: &[usize]) -> Vec<CurveSegment> {
    let pts = curve.points();
    let n = pts.len();
    let make = |index: usize, points: Vec<Point2>, start: bool, end: bool| CurveSegment {
        parent_id: curve.id().clone(),
        segment_index: index,
        points,
        start_is_junction: start,
        end_is_junction: end,
        closed_loop: false,
    };
    if curve.is_closed() {
        if split.is_empty() {
            return vec![curve.as_segment()];
        }
        let m = split.len();
        (0..m)
            .map(|k| {
                let from = split[k];
                let to = split[(k + 1) % m];
                let mut seg = Vec::new();
                let mut i = from;
                loop {
                    seg.push(pts[i]);
                    if seg.len() > 1 && i == to {
                        break;
                    }
                    i = (i + 1) % n;
                }
                make(k, seg, true, true)
            })
            .collect()
    } else {
        let mut cuts: Vec<usize> = split
            .iter()
            .copied()
            .filter(|&k| k > 0 && k < n - 1)
            .collect();
        cuts.insert(0, 0);
        cuts.push(n - 1);
        let start_flag = split.contains(&0);
        let end_flag = split.contains(&(n - 1));
        let last = cuts.len() - 2;
        cuts.windows(2)
            .enumerate()
            .map(|(k, w)| {
                make(
                    k,
                    pts[w[0]..=w[1]].to_vec(),
                    k > 0 || start_flag,
                    k < last || end_flag,
                )
            })
            .collect()
    }
}

impl SegmentedGeometry {
    pub fn segment(&self, curve: &CurveId, index: usize) -> Option<&CurveSegment> {
        self.segments
            .iter()
            .find(|s| &s.parent_id == curve && s.segment_index == index)
    }

    pub fn segment_by_ref(&self, r: &SegmentRef) -> Option<&CurveSegment> {
        self.segment(&r.parent_id, r.segment_index)
    }

    pub fn segments_of(&self, curve: &CurveId) -> impl Iterator<Item = &CurveSegment> + '_ {
        let curve = curve.clone();
        self.segments.iter().filter(move |s| s.parent_id == curve)
    }

    /// Closed vertex loop of a subdomain (last point not repeated).
    pub fn loop_polygon(&self, id: &super::SubdomainId) -> Result<Vec<Point2>> {
        let sd = self
            .subdomains
            .iter()
            .find(|s| &s.id == id)
            .ok_or_else(|| GeometryError::UnknownCurve(CurveId(id.0.clone())))?;
        self.loop_polygon_of(sd, super::INTERSECTION_TOL)
    }

    pub(crate) fn loop_polygon_of(&self, sd: &Subdomain, tol: f64) -> Result<Vec<Point2>> {
        let mut pieces = Vec::with_capacity(sd.pieces.len());
        for piece in &sd.pieces {
            let seg = self
                .segment(&piece.curve_id, piece.segment_index)
                .ok_or_else(|| {
                    GeometryError::UnknownSegment(
                        sd.id.clone(),
                        piece.curve_id.clone(),
                        piece.segment_index,
                    )
                })?;
            let mut pts = seg.points.clone();
            if piece.reversed {
                pts.reverse();
            }
            pieces.push(pts);
        }
        let mut out: Vec<Point2> = Vec::new();
        for (k, pts) in pieces.iter().enumerate() {
            let next = &pieces[(k + 1) % pieces.len()];
            let end = *pts.last().unwrap();
            if end.distance(next[0]) > tol {
                return Err(GeometryError::OpenLoop {
                    id: sd.id.clone(),
                    piece: k,
                    end,
                    next: next[0],
                });
            }
            out.extend_from_slice(&pts[..pts.len() - 1]);
        }
        Ok(out)
    }

    /// All subdomain loops in declaration order.
    pub fn loop_polygons(&self) -> Result<Vec<Vec<Point2>>> {
        self.subdomains
            .iter()
            .map(|sd| self.loop_polygon_of(sd, super::INTERSECTION_TOL))
            .collect()
    }

    /// The same stage with every curve as one unsplit segment.
    pub fn whole_curve_segments(&self) -> Vec<CurveSegment> {
        self.curves.iter().map(Curve::as_segment).collect()
    }

    /// Both stages must split every curve into the same number of segments.
    pub fn check_correspondence(&self, other: &SegmentedGeometry) -> Result<()> {
        if self.curves.len() != other.curves.len() {
            return Err(GeometryError::TopologyMismatch(format!(
                "{} curves vs {}",
                self.curves.len(),
                other.curves.len()
            )));
        }
        for c in &self.curves {
            let other_curve = other
                .curves
                .iter()
                .find(|o| o.id() == c.id())
                .ok_or_else(|| GeometryError::UnknownCurve(c.id().clone()))?;
            if other_curve.is_closed() != c.is_closed() {
                return Err(GeometryError::TopologyMismatch(format!(
                    "curve `{}` changes closedness",
                    c.id()
                )));
            }
            let n0 = self.segments_of(c.id()).count();
            let n1 = other.segments_of(c.id()).count();
            if n0 != n1 {
                return Err(GeometryError::TopologyMismatch(format!(
                    "curve `{}` has {n0} segments vs {n1}",
                    c.id()
                )));
            }
        }
        if self.junctions.len() != other.junctions.len() {
            return Err(GeometryError::TopologyMismatch(format!(
                "{} junctions vs {}",
                self.junctions.len(),
                other.junctions.len()
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::find_intersections;

    fn curve(id: &str, v: &[(f64, f64)]) -> Curve {
        Curve::new(
            id,
            v.iter().map(|&(x, y)| Point2::new(x, y)).collect(),
            false,
        )
        .unwrap()
    }

    fn staged(curves: Vec<Curve>) -> StagedGeometry {
        StagedGeometry::new(0, curves, vec![]).unwrap()
    }

    #[test]
    fn no_intersection_keeps_single_segments() {
        let g = staged(vec![
            curve("a", &[(0.0, 0.0), (1.0, 0.0)]),
            curve("b", &[(0.0, 1.0), (1.0, 1.0)]),
        ]);
        let s = segment_at_intersections(&g, 1e-9).unwrap();
        assert_eq!(s.segments.len(), 2);
        assert!(s.junctions.is_empty());
        assert!(!s.segments[0].start_is_junction && !s.segments[0].end_is_junction);
    }

    #[test]
    fn crossing_mid_edge_inserts_vertex_in_both() {
        let g = staged(vec![
            curve("a", &[(-1.0, 0.0), (1.0, 0.0)]),
            curve("b", &[(0.0, -1.0), (0.0, 1.0)]),
        ]);
        let s = segment_at_intersections(&g, 1e-9).unwrap();
        assert_eq!(s.segments_of(&"a".into()).count(), 2);
        assert_eq!(s.segments_of(&"b".into()).count(), 2);
        assert_eq!(s.curves[0].points().len(), 3);
        let a0 = s.segment(&"a".into(), 0).unwrap();
        assert_eq!(a0.end(), Point2::new(0.0, 0.0));
        assert!(a0.end_is_junction && !a0.start_is_junction);
    }

    #[test]
    fn crossing_at_existing_vertex_does_not_duplicate() {
        let g = staged(vec![
            curve("a", &[(-1.0, 0.0), (0.0, 0.0), (1.0, 0.0)]),
            curve("b", &[(0.0, -1.0), (0.0, 1.0)]),
        ]);
        let s = segment_at_intersections(&g, 1e-9).unwrap();
        assert_eq!(s.curves[0].points().len(), 3);
        assert_eq!(s.curves[1].points().len(), 3);
    }

    #[test]
    fn flagged_endpoints_are_bitwise_intersections() {
        let a = curve("a", &[(-1.0, 0.1), (1.0, -0.2)]);
        let b = curve("b", &[(0.3, -1.0), (-0.1, 1.0)]);
        let hits = find_intersections(&a, &b, 1e-9);
        assert_eq!(hits.len(), 1);
        let g = staged(vec![a, b]);
        let s = segment_at_intersections(&g, 1e-9).unwrap();
        for seg in &s.segments {
            let p = if seg.start_is_junction {
                seg.start()
            } else {
                seg.end()
            };
            assert_eq!(p, hits[0].point);
        }
    }

    #[test]
    fn tangential_touch_rejected() {
        let g = staged(vec![
            curve("a", &[(-1.0, 0.0), (1.0, 0.0)]),
            curve("b", &[(-1.0, 1.0), (0.0, 0.0), (1.0, 1.0)]),
        ]);
        let e = segment_at_intersections(&g, 1e-9).unwrap_err();
        assert!(matches!(e, GeometryError::Grazing { .. }), "{e}");
    }

    #[test]
    fn overlap_rejected() {
        let g = staged(vec![
            curve("a", &[(0.0, 0.0), (2.0, 0.0)]),
            curve("b", &[(0.5, 0.0), (1.5, 0.0)]),
        ]);
        assert!(matches!(
            segment_at_intersections(&g, 1e-9),
            Err(GeometryError::Grazing { .. })
        ));
    }

    #[test]
    fn closed_curve_split_twice_gives_two_segments() {
        let sq = Curve::new(
            "sq",
            vec![
                Point2::new(0.0, 0.0),
                Point2::new(1.0, 0.0),
                Point2::new(1.0, 1.0),
                Point2::new(0.0, 1.0),
            ],
            true,
        )
        .unwrap();
        let cut = curve("cut", &[(0.5, 0.0), (0.5, 1.0)]);
        let s = segment_at_intersections(&staged(vec![sq, cut]), 1e-9).unwrap();
        let parts: Vec<_> = s.segments_of(&"sq".into()).collect();
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0].start(), Point2::new(0.5, 0.0));
        assert_eq!(parts[0].end(), Point2::new(0.5, 1.0));
        assert_eq!(parts[1].end(), Point2::new(0.5, 0.0));
        assert_eq!(s.segments_of(&"cut".into()).count(), 1);
        assert_eq!(s.junctions.len(), 2);
    }
}
