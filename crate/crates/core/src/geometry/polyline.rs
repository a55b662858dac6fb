//! Arc-length bookkeeping and equal-chord walking on open polylines.
//!
//! Closed curves are handled by the callers, which pass an explicit loop
//! (first point repeated at the end).

use super::point::{project_on_segment, Point2};

/// Cumulative arc-length table over an open polyline.
#[derive(Debug, Clone)]
pub struct ArcTable<'a> {
    points: &'a [Point2],
    cum: Vec<f64>,
}

/// Nearest point on a polyline.
#[derive(Debug, Clone, Copy)]
pub struct Projection {
    pub arc: f64,
    pub distance: f64,
    pub point: Point2,
}

impl<'a> ArcTable<'a> {
    pub fn new(points: &'a [Point2]) -> Self {
        let mut cum = Vec::with_capacity(points.len());
        let mut acc = 0.0;
        cum.push(0.0);
        for w in points.windows(2) {
            acc += w[0].distance(w[1]);
            cum.push(acc);
        }
        Self { points, cum }
    }

    pub fn length(&self) -> f64 {
        *self.cum.last().unwrap_or(&0.0)
    }

    pub fn cumulative(&self) -> &[f64] {
        &self.cum
    }

    /// Point at arc-length position `arc`, clamped to the polyline.
    pub fn point_at(&self, arc: f64) -> Point2 {
        let n = self.points.len();
        if arc <= 0.0 {
            return self.points[0];
        }
        if arc >= self.length() {
            return self.points[n - 1];
        }
        // first index with cum > arc
        let hi = self.cum.partition_point(|&c| c <= arc);
        let k = hi - 1;
        if self.cum[k] == arc {
            return self.points[k];
        }
        let t = (arc - self.cum[k]) / (self.cum[k + 1] - self.cum[k]);
        self.points[k].lerp(self.points[k + 1], t)
    }

    /// Unit tangent of the edge containing `arc`, taking the later edge at
    /// a vertex.
    pub fn tangent_at(&self, arc: f64) -> Point2 {
        let edges = self.points.len() - 1;
        let mut k = self
            .cum
            .partition_point(|&c| c <= arc)
            .saturating_sub(1)
            .min(edges - 1);
        while k > 0 && self.cum[k + 1] == self.cum[k] {
            k -= 1;
        }
        let v = self.points[k + 1] - self.points[k];
        let len = v.norm();
        if len > 0.0 {
            v * (1.0 / len)
        } else {
            v
        }
    }

    /// Nearest point. Ties resolve to the earliest edge.
    pub fn project(&self, p: Point2) -> Projection {
        let mut best = Projection {
            arc: 0.0,
            distance: f64::INFINITY,
            point: self.points[0],
        };
        for (k, w) in self.points.windows(2).enumerate() {
            let (t, d) = project_on_segment(p, w[0], w[1]);
            if d < best.distance {
                let point = w[0].lerp(w[1], t);
                let arc = if t == 1.0 {
                    self.cum[k + 1]
                } else {
                    self.cum[k] + t * (self.cum[k + 1] - self.cum[k])
                };
                best = Projection {
                    arc,
                    distance: d,
                    point,
                };
            }
        }
        best
    }

    /// Arc position of `p` if it lies within `tol` of the polyline.
    ///
    /// Points within `tol` of a vertex snap to that vertex's exact arc position.
    pub fn locate(&self, p: Point2, tol: f64) -> Option<f64> {
        let proj = self.project(p);
        if proj.distance > tol {
            return None;
        }
        for (k, v) in self.points.iter().enumerate() {
            if v.distance(p) <= tol && (self.cum[k] - proj.arc).abs() <= 2.0 * tol {
                return Some(self.cum[k]);
            }
        }
        Some(proj.arc)
    }
}

/// Walk `steps` chords of length `d` from the start. Returns the visited
/// points (start included) and a residual that is negative when `d` is too
/// short to reach the end and nonnegative otherwise.
fn chord_walk(points: &[Point2], steps: usize, d: f64) -> (Vec<Point2>, f64) {
    let table = ArcTable::new(points);
    let end = *points.last().unwrap();
    let mut out = Vec::with_capacity(steps + 1);
    let mut q = points[0];
    out.push(q);
    let mut edge = 0usize;
    let mut t0 = 0.0;
    let mut arc = 0.0;
    for step in 0..steps {
        let mut found = None;
        let mut j = edge;
        while j + 1 < points.len() {
            let a = if j == edge {
                points[j].lerp(points[j + 1], t0)
            } else {
                points[j]
            };
            let b = points[j + 1];
            let w = a - q;
            let v = b - a;
            let vv = v.norm_sq();
            if vv > 0.0 {
                let wv = w.dot(v);
                let c = w.norm_sq() - d * d;
                let disc = (wv * wv - vv * c).max(0.0);
                let u = (-wv + disc.sqrt()) / vv;
                if u <= 1.0 {
                    let p = a + v * u;
                    // re-express on the full edge j
                    let full = points[j + 1] - points[j];
                    let tt = (p - points[j]).dot(full) / full.norm_sq();
                    found = Some((j, tt.clamp(0.0, 1.0), p));
                    break;
                }
            }
            j += 1;
        }
        match found {
            Some((j, tt, p)) => {
                edge = j;
                t0 = tt;
                q = p;
                let cum = table.cumulative();
                arc = cum[j] + tt * (cum[j + 1] - cum[j]);
                out.push(p);
            }
            None => {
                let remaining = (steps - step - 1) as f64 * d + (d - q.distance(end));
                return (out, remaining);
            }
        }
    }
    (out, arc - table.length())
}

/// Points on the polyline with equal consecutive chord lengths, first and
/// last points pinned to the polyline ends. Returns `count` points.
///
/// The arc positions are solved for by Newton from uniform arc spacing, so an
/// input whose vertices already have equal chords comes back unchanged. If
/// that stalls, chord walks are bracketed on a grid of lengths and a bracket is
/// accepted only if its walk closes onto the end point, longest chord first.
pub fn equal_chord_points(points: &[Point2], count: usize) -> Vec<Point2> {
    debug_assert!(count >= 2);
    let steps = count - 1;
    let end = *points.last().unwrap();
    let length = ArcTable::new(points).length();
    let uniform: Vec<f64> = (0..=steps)
        .map(|i| length * i as f64 / steps as f64)
        .collect();
    let (mut best, mut err) = newton_chords(points, uniform.clone());
    if err <= 1e-13 * length {
        return best;
    }
    let (p, e) = newton_chords(points, relax_chords(points, uniform));
    if e <= 1e-13 * length {
        return p;
    }
    if e < err {
        (best, err) = (p, e);
    }

    let upper = length / steps as f64;
    let tol = 1e-12 * length.max(1.0);
    let closes = |walk: &[Point2]| {
        walk.len() == count && walk.last().is_some_and(|q| q.distance(end) <= tol)
    };
    let finish = |mut out: Vec<Point2>| {
        out[steps] = end;
        out
    };
    let grid: Vec<(f64, f64)> = (0..=GRID)
        .map(|k| {
            let d = upper * k as f64 / GRID as f64;
            (
                d,
                if k == 0 {
                    -1.0
                } else {
                    chord_walk(points, steps, d).1
                },
            )
        })
        .collect();
    for w in grid.windows(2).rev() {
        let ((mut lo, r_lo), (mut hi, r_hi)) = (w[0], w[1]);
        if !(r_lo < 0.0 && r_hi >= 0.0) {
            continue;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if chord_walk(points, steps, mid).1 < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (walk, _) = chord_walk(points, steps, lo);
        if closes(&walk) {
            return finish(walk);
        }
        if walk.len() == count {
            let (p, e) = newton_chords(points, walk_arcs(points, &walk));
            if e <= 1e-13 * length {
                return p;
            }
            if e < err {
                (best, err) = (p, e);
            }
        }
    }
    log::warn!("equal-chord resampling converged only to {err:.3e}");
    best
}

/// Gauss-Seidel sweeps moving each interior point to where it is equidistant
/// from its neighbours, searching on the side its current position favours.
/// Any fixed point has equal chords.
fn relax_chords(points: &[Point2], mut s: Vec<f64>) -> Vec<f64> {
    let table = ArcTable::new(points);
    let n = s.len() - 1;
    let length = table.length();
    for _ in 0..RELAX_SWEEPS {
        for i in 1..n {
            let (a, b) = (table.point_at(s[i - 1]), table.point_at(s[i + 1]));
            let g = |t: f64| {
                let p = table.point_at(t);
                p.distance(a) - p.distance(b)
            };
            let (mut lo, mut hi) = if g(s[i]) > 0.0 {
                (s[i - 1], s[i])
            } else {
                (s[i], s[i + 1])
            };
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if g(mid) > 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            s[i] = 0.5 * (lo + hi);
        }
        let p: Vec<Point2> = s.iter().map(|&t| table.point_at(t)).collect();
        let chords: Vec<f64> = p.windows(2).map(|w| w[0].distance(w[1])).collect();
        let spread = chords.iter().cloned().fold(f64::MIN, f64::max)
            - chords.iter().cloned().fold(f64::MAX, f64::min);
        if spread <= 1e-9 * length {
            break;
        }
    }
    s
}

const RELAX_SWEEPS: usize = 5000;

/// Arc positions of walk points, which lie on the polyline in order.
fn walk_arcs(points: &[Point2], walk: &[Point2]) -> Vec<f64> {
    let table = ArcTable::new(points);
    let mut arcs: Vec<f64> = walk.iter().map(|p| table.project(*p).arc).collect();
    arcs[0] = 0.0;
    *arcs.last_mut().unwrap() = table.length();
    for i in 1..arcs.len() {
        if arcs[i] <= arcs[i - 1] {
            arcs[i] = arcs[i - 1] + f64::EPSILON * table.length();
        }
    }
    arcs
}

const GRID: usize = 128;

/// Damped Newton on the interior arc positions and the common chord length,
/// started from the arc positions `start` (both ends included). Returns the
/// points and the largest chord deviation.
fn newton_chords(points: &[Point2], start: Vec<f64>) -> (Vec<Point2>, f64) {
    let table = ArcTable::new(points);
    let length = table.length();
    let n = start.len() - 1;
    let place = |s: &[f64]| s.iter().map(|&a| table.point_at(a)).collect::<Vec<_>>();
    let residual = |s: &[f64], d: f64| -> Vec<f64> {
        let p = place(s);
        p.windows(2).map(|w| w[0].distance(w[1]) - d).collect()
    };
    let norm = |r: &[f64]| r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let merit = |r: &[f64]| r.iter().map(|v| v * v).sum::<f64>();

    let mut s = start;
    let mut d = {
        let p = place(&s);
        p.windows(2).map(|w| w[0].distance(w[1])).sum::<f64>() / n as f64
    };
    let mut r = residual(&s, d);
    for _ in 0..200 {
        if norm(&r) <= 1e-15 * length {
            break;
        }
        // unknowns: s_1..s_{n-1}, d; rows: chord i minus d
        let p = place(&s);
        let mut jac = vec![vec![0.0; n]; n];
        for i in 0..n {
            let chord = p[i + 1] - p[i];
            let c = chord.norm();
            if c > 0.0 {
                let u = chord * (1.0 / c);
                if i + 1 < n {
                    jac[i][i] = u.dot(table.tangent_at(s[i + 1]));
                }
                if i > 0 {
                    jac[i][i - 1] = -u.dot(table.tangent_at(s[i]));
                }
            }
            jac[i][n - 1] = -1.0;
        }
        let rhs: Vec<f64> = r.iter().map(|v| -v).collect();
        let Some(delta) = solve_dense(jac, rhs) else {
            break;
        };
        let mut lambda = 1.0;
        let current = merit(&r);
        let mut accepted = false;
        for _ in 0..40 {
            let mut trial = s.clone();
            for i in 1..n {
                trial[i] += lambda * delta[i - 1];
            }
            let ordered = trial.windows(2).all(|w| w[0] < w[1]);
            let td = d + lambda * delta[n - 1];
            if ordered && td > 0.0 {
                let tr = residual(&trial, td);
                if merit(&tr) < current {
                    s = trial;
                    d = td;
                    r = tr;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    let mut out = place(&s);
    out[0] = points[0];
    out[n] = *points.last().unwrap();
    (out, norm(&r))
}

/// Gaussian elimination with partial pivoting; `None` when singular.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        let pivot = a[col].clone();
        for row in col + 1..n {
            let f = a[row][col] / pivot[col];
            if f != 0.0 {
                for (x, p) in a[row][col..].iter_mut().zip(&pivot[col..]) {
                    *x -= f * p;
                }
                b[row] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let tail: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    Some(x)
}
