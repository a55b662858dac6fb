use super::point::{orient2d, project_on_segment, Point2};
use super::polyline::ArcTable;
use super::Curve;

/// A junction between two curves. Parameters are normalized arc length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Intersection {
    pub point: Point2,
    pub param_a: f64,
    pub param_b: f64,
}

/// A deduplicated contact with the extra detail segmentation needs.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Contact {
    pub point: Point2,
    pub arc_a: f64,
    pub arc_b: f64,
    /// Arc extent (along `a`) of the contiguous near-contact run.
    pub run_length: f64,
}

#[derive(Debug, Clone, Copy)]
struct Hit {
    point: Point2,
    arc_a: f64,
    arc_b: f64,
}

/// All places where the polylines of `a` and `b` come within `tol`.
///
/// Contiguous near-contact runs are reported once. Shared vertices and
/// vertex-on-edge contacts report the vertex coordinates exactly.
pub fn find_intersections(a: &Curve, b: &Curve, tol: f64) -> Vec<Intersection> {
    let ta = a.traversal();
    let tb = b.traversal();
    let la = ArcTable::new(&ta).length();
    let lb = ArcTable::new(&tb).length();
    contacts(&ta, a.is_closed(), &tb, b.is_closed(), tol)
        .into_iter()
        .map(|c| Intersection {
            point: c.point,
            param_a: (c.arc_a / la).clamp(0.0, 1.0),
            param_b: (c.arc_b / lb).clamp(0.0, 1.0),
        })
        .collect()
}

pub(crate) fn contacts(
    ta: &[Point2],
    a_closed: bool,
    tb: &[Point2],
    b_closed: bool,
    tol: f64,
) -> Vec<Contact> {
    let arc_a = ArcTable::new(ta);
    let arc_b = ArcTable::new(tb);
    let ca = arc_a.cumulative();
    let cb = arc_b.cumulative();
    let mut hits = Vec::new();

    for i in 0..ta.len() - 1 {
        let (a0, a1) = (ta[i], ta[i + 1]);
        let la = ca[i + 1] - ca[i];
        for j in 0..tb.len() - 1 {
            let (b0, b1) = (tb[j], tb[j + 1]);
            let lb = cb[j + 1] - cb[j];
            // cheap reject on bounding boxes
            if a0.x.min(a1.x) > b0.x.max(b1.x) + tol
                || b0.x.min(b1.x) > a0.x.max(a1.x) + tol
                || a0.y.min(a1.y) > b0.y.max(b1.y) + tol
                || b0.y.min(b1.y) > a0.y.max(a1.y) + tol
            {
                continue;
            }
            // vertex contacts first so exact coordinates win; all of them
            // count so that a collinear overlap reports both of its ends
            let before = hits.len();
            for (k, &v) in [a0, a1].iter().enumerate() {
                let (u, d) = project_on_segment(v, b0, b1);
                if d <= tol {
                    hits.push(Hit {
                        point: v,
                        arc_a: ca[i + k],
                        arc_b: cb[j] + u * lb,
                    });
                }
            }
            for (k, &v) in [b0, b1].iter().enumerate() {
                let (t, d) = project_on_segment(v, a0, a1);
                if d <= tol {
                    hits.push(Hit {
                        point: v,
                        arc_a: ca[i] + t * la,
                        arc_b: cb[j + k],
                    });
                }
            }
            if hits.len() > before {
                continue;
            }
            let d1 = orient2d(a0, a1, b0);
            let d2 = orient2d(a0, a1, b1);
            let d3 = orient2d(b0, b1, a0);
            let d4 = orient2d(b0, b1, a1);
            if d1 * d2 < 0.0 && d3 * d4 < 0.0 {
                let da = a1 - a0;
                let db = b1 - b0;
                let t = (b0 - a0).cross(db) / da.cross(db);
                let u = (b0 - a0).cross(da) / da.cross(db);
                hits.push(Hit {
                    point: a0 + da * t,
                    arc_a: ca[i] + t * la,
                    arc_b: cb[j] + u * lb,
                });
            }
        }
    }

    merge_runs(hits, a_closed, &arc_a, &arc_b, b_closed, tol)
}

fn merge_runs(
    mut hits: Vec<Hit>,
    a_closed: bool,
    arc_a: &ArcTable<'_>,
    arc_b: &ArcTable<'_>,
    b_closed: bool,
    tol: f64,
) -> Vec<Contact> {
    if hits.is_empty() {
        return Vec::new();
    }
    hits.sort_by(|x, y| x.arc_a.total_cmp(&y.arc_a));
    let ca = arc_a.cumulative();
    let la = arc_a.length();

    // does `a` stay within tol of `b` between arc positions s0 < s1?
    let stays_close = |s0: f64, s1: f64| -> bool {
        if s1 - s0 <= tol {
            return true;
        }
        let mut probes = vec![0.25, 0.5, 0.75]
            .into_iter()
            .map(|f| s0 + f * (s1 - s0))
            .collect::<Vec<_>>();
        probes.extend(ca.iter().copied().filter(|&c| c > s0 && c < s1));
        probes
            .into_iter()
            .all(|s| arc_b.project(arc_a.point_at(s)).distance <= tol)
    };

    let mut groups: Vec<Vec<Hit>> = vec![vec![hits[0]]];
    for h in hits.into_iter().skip(1) {
        let g = groups.last_mut().unwrap();
        let last = *g.last().unwrap();
        if last.point.distance(h.point) <= tol || stays_close(last.arc_a, h.arc_a) {
            g.push(h);
        } else {
            groups.push(vec![h]);
        }
    }
    // a closed `a` may see the same contact at arc 0 and arc L
    if a_closed && groups.len() > 1 {
        let first = groups[0][0];
        let last = *groups.last().unwrap().last().unwrap();
        if first.point.distance(last.point) <= tol {
            let tail = groups.pop().unwrap();
            groups[0].splice(0..0, tail);
        }
    }
    let lb = arc_b.length();
    groups
        .into_iter()
        .map(|g| {
            let lo = g.iter().map(|h| h.arc_a).fold(f64::INFINITY, f64::min);
            let hi = g.iter().map(|h| h.arc_a).fold(f64::NEG_INFINITY, f64::max);
            let mut run = hi - lo;
            if a_closed && run > 0.5 * la {
                // wrapped group: measure the short way round
                run = la - run;
            }
            let rep = g[g.len() / 2];
            let mut arc_b_rep = rep.arc_b;
            if b_closed && (arc_b_rep - lb).abs() <= tol {
                arc_b_rep = 0.0;
            }
            let mut arc_a_rep = rep.arc_a;
            if a_closed && (arc_a_rep - la).abs() <= tol {
                arc_a_rep = 0.0;
            }
            Contact {
                point: rep.point,
                arc_a: arc_a_rep,
                arc_b: arc_b_rep,
                run_length: run,
            }
        })
        .collect()
}

/// Points at arc distance `h` before and after `arc` (wrapping on loops).
/// `None` marks an open-curve end.
pub(crate) fn neighbours(
    trav: &[Point2],
    closed: bool,
    arc: f64,
    h: f64,
) -> (Option<Point2>, Option<Point2>) {
    let t = ArcTable::new(trav);
    let l = t.length();
    let end_tol = 1e-12 * l.max(1.0);
    if closed {
        let prev = (arc - h).rem_euclid(l);
        let next = (arc + h).rem_euclid(l);
        (Some(t.point_at(prev)), Some(t.point_at(next)))
    } else {
        let prev = (arc > end_tol + 0.0).then(|| t.point_at((arc - h).max(0.0)));
        let next = (arc < l - end_tol).then(|| t.point_at((arc + h).min(l)));
        (prev, next)
    }
}

/// True when the two curves cross at `p` (their local directions alternate
/// around the contact point).
pub(crate) fn crosses(p: Point2, a: (Point2, Point2), b: (Point2, Point2)) -> bool {
    let ang = |q: Point2| (q - p).y.atan2((q - p).x);
    let mut dirs = [
        (ang(a.0), 0u8),
        (ang(b.0), 1u8),
        (ang(a.1), 0u8),
        (ang(b.1), 1u8),
    ];
    dirs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let distinct = dirs.windows(2).all(|w| (w[1].0 - w[0].0).abs() > 1e-9);
    distinct && dirs[0].1 != dirs[1].1 && dirs[1].1 != dirs[2].1 && dirs[2].1 != dirs[3].1
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(id: &str, v: &[(f64, f64)]) -> Curve {
        Curve::new(
            id,
            v.iter().map(|&(x, y)| Point2::new(x, y)).collect(),
            false,
        )
        .unwrap()
    }

    #[test]
    fn perpendicular_bisectors() {
        let a = curve("a", &[(0.0, -1.0), (0.0, 1.0)]);
        let b = curve("b", &[(-1.0, 0.0), (1.0, 0.0)]);
        let hits = find_intersections(&a, &b, 1e-9);
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].point, Point2::new(0.0, 0.0));
        assert!((hits[0].param_a - 0.5).abs() < 1e-15);
        assert!((hits[0].param_b - 0.5).abs() < 1e-15);
    }

    #[test]
    fn disjoint_parallels() {
        let a = curve("a", &[(0.0, 0.0), (1.0, 0.0)]);
        let b = curve("b", &[(0.0, 1.0), (1.0, 1.0)]);
        assert!(find_intersections(&a, &b, 1e-9).is_empty());
    }

    #[test]
    fn shared_endpoint() {
        let a = curve("a", &[(0.0, 0.0), (1.0, 0.0)]);
        let b = curve("b", &[(0.0, 0.0), (0.0, 1.0)]);
        let hits = find_intersections(&a, &b, 1e-9);
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].point, Point2::new(0.0, 0.0));
        assert_eq!((hits[0].param_a, hits[0].param_b), (0.0, 0.0));
    }

    #[test]
    fn crossing_at_shared_vertex_reported_once() {
        let a = curve("a", &[(-1.0, 0.0), (0.0, 0.0), (1.0, 0.0)]);
        let b = curve("b", &[(0.0, -1.0), (0.0, 0.0), (0.0, 1.0)]);
        let hits = find_intersections(&a, &b, 1e-9);
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].point, Point2::new(0.0, 0.0));
    }

    #[test]
    fn t_junction_uses_vertex_coordinates() {
        let a = curve("a", &[(0.0, 0.0), (1.0, 0.0)]);
        let b = curve("b", &[(0.3, 0.0), (0.3, 1.0)]);
        let hits = find_intersections(&a, &b, 1e-9);
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].point, Point2::new(0.3, 0.0));
        assert!((hits[0].param_a - 0.3).abs() < 1e-15);
        assert_eq!(hits[0].param_b, 0.0);
    }

    #[test]
    fn collinear_overlap_is_one_run() {
        let a = curve("a", &[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)]);
        let b = curve("b", &[(0.5, 0.0), (1.5, 0.0)]);
        let ta = a.traversal();
        let tb = b.traversal();
        let c = contacts(&ta, false, &tb, false, 1e-9);
        assert_eq!(c.len(), 1);
        assert!((c[0].run_length - 1.0).abs() < 1e-12);
    }

    #[test]
    fn crossing_classification() {
        let p = Point2::new(0.0, 0.0);
        let horiz = (Point2::new(-1.0, 0.0), Point2::new(1.0, 0.0));
        let vert = (Point2::new(0.0, -1.0), Point2::new(0.0, 1.0));
        assert!(crosses(p, horiz, vert));
        // b touches from above and leaves upwards again
        let touch = (Point2::new(-1.0, 1.0), Point2::new(1.0, 1.0));
        assert!(!crosses(p, horiz, touch));
    }
}
