//! Triangle meshes conforming to the segmented geometry, their motion, and
//! element quality.

mod motion;
mod triangulate;

use std::collections::{BTreeMap, VecDeque};

use thiserror::Error;

use crate::displacement::{boundary_parameter, DisplacementError};
use crate::geometry::{CurveSegment, GeometryError, Point2, SegmentRef, SubdomainId};
use crate::linalg::LinalgError;

pub use motion::{move_mesh, prepare_motion, MeshMotion};
pub use triangulate::{default_edge_length, triangulate};

#[derive(Debug, Error, PartialEq)]
pub enum MeshError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Displacement(#[from] DisplacementError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(
        "constraint edge {from} -> {to} crosses another boundary edge (self-intersecting input)"
    )]
    SelfIntersecting { from: Point2, to: Point2 },
    #[error("triangulation failed: {0}")]
    Triangulation(String),
    #[error("element {0} has non-positive area at creation")]
    DegenerateElement(usize),
    #[error("boundary node {node} at {at} has no displacement field")]
    UncoveredNode { node: usize, at: Point2 },
    #[error("invalid target edge length {0}")]
    BadEdgeLength(f64),
    #[error("fraction {0} outside [0, 1]")]
    BadFraction(f64),
}

pub type Result<T> = std::result::Result<T, MeshError>;

/// A mesh node's position along one boundary track.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeTag {
    pub segment: SegmentRef,
    pub s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryEdge {
    pub nodes: [usize; 2],
    pub segment: SegmentRef,
    pub s_range: (f64, f64),
}

/// Linear triangle mesh whose elements keep their creation orientation
/// (counterclockwise) and subdomain label for life.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub nodes: Vec<Point2>,
    /// Node positions at creation; motion is always measured from here.
    pub reference: Vec<Point2>,
    pub triangles: Vec<[usize; 3]>,
    /// Index into `subdomain_ids` per triangle.
    pub element_labels: Vec<usize>,
    pub subdomain_ids: Vec<SubdomainId>,
    /// Boundary tracks each node lies on (empty for interior nodes).
    pub node_tags: Vec<Vec<NodeTag>>,
    pub boundary_edges: Vec<BoundaryEdge>,
    /// Node index per geometry junction, in junction order.
    pub junction_nodes: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QualityReport {
    pub per_element_quality: Vec<f64>,
    pub min_quality: f64,
    pub inverted_count: usize,
}

impl Mesh {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn element_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn corners(&self, e: usize) -> [Point2; 3] {
        let [a, b, c] = self.triangles[e];
        [self.nodes[a], self.nodes[b], self.nodes[c]]
    }

    /// Signed area in creation orientation; negative once inverted.
    pub fn signed_area(&self, e: usize) -> f64 {
        let [a, b, c] = self.corners(e);
        0.5 * (b - a).cross(c - a)
    }

    pub fn node_displacement(&self) -> Vec<Point2> {
        self.nodes
            .iter()
            .zip(&self.reference)
            .map(|(p, q)| *p - *q)
            .collect()
    }

    pub fn is_boundary_node(&self, i: usize) -> bool {
        !self.node_tags[i].is_empty()
    }

    /// Sum of absolute element areas per subdomain label.
    pub fn labeled_areas(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.subdomain_ids.len()];
        for e in 0..self.triangles.len() {
            out[self.element_labels[e]] += self.signed_area(e).abs();
        }
        out
    }

    pub fn total_area(&self) -> f64 {
        (0..self.triangles.len())
            .map(|e| self.signed_area(e).abs())
            .sum()
    }

    pub fn label_index(&self, id: &SubdomainId) -> Option<usize> {
        self.subdomain_ids.iter().position(|s| s == id)
    }

    /// Node adjacency through triangle edges, sorted per node.
    pub fn node_neighbours(&self) -> Vec<Vec<usize>> {
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); self.nodes.len()];
        for t in &self.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        for row in &mut adj {
            row.sort_unstable();
            row.dedup();
        }
        adj
    }

    /// Graph distance (in mesh edges) from the nearest seed node.
    pub fn graph_distance_from(&self, seeds: &[usize]) -> Vec<Option<usize>> {
        let adj = self.node_neighbours();
        let mut dist = vec![None; self.nodes.len()];
        let mut queue = VecDeque::new();
        for &s in seeds {
            dist[s] = Some(0);
            queue.push_back(s);
        }
        while let Some(i) = queue.pop_front() {
            let d = dist[i].unwrap();
            for &j in &adj[i] {
                if dist[j].is_none() {
                    dist[j] = Some(d + 1);
                    queue.push_back(j);
                }
            }
        }
        dist
    }

    /// Replace the boundary tags with positions along `tracks`.
    ///
    /// A node lying on several tracks keeps them in track order.
    pub fn retag(&self, tracks: &[CurveSegment], tol: f64) -> Mesh {
        let mut mesh = self.clone();
        let (tags, edges) = compute_tags(&self.reference, &self.triangles, tracks, tol);
        mesh.node_tags = tags;
        mesh.boundary_edges = edges;
        mesh
    }
}

pub(crate) fn compute_tags(
    nodes: &[Point2],
    triangles: &[[usize; 3]],
    tracks: &[CurveSegment],
    tol: f64,
) -> (Vec<Vec<NodeTag>>, Vec<BoundaryEdge>) {
    let mut tags: Vec<Vec<NodeTag>> = vec![Vec::new(); nodes.len()];
    for track in tracks {
        let (lo, hi) = bbox(&track.points);
        for (i, p) in nodes.iter().enumerate() {
            if p.x < lo.x - tol || p.x > hi.x + tol || p.y < lo.y - tol || p.y > hi.y + tol {
                continue;
            }
            if let Ok(s) = boundary_parameter(track, *p) {
                tags[i].push(NodeTag {
                    segment: track.segment_ref(),
                    s,
                });
            }
        }
    }

    let mut seen = BTreeMap::new();
    for t in triangles {
        for k in 0..3 {
            let (a, b) = (t[k].min(t[(k + 1) % 3]), t[k].max(t[(k + 1) % 3]));
            seen.entry((a, b)).or_insert(());
        }
    }
    let mut edges = Vec::new();
    for &(a, b) in seen.keys() {
        for ta in &tags[a] {
            if let Some(tb) = tags[b].iter().find(|tb| tb.segment == ta.segment) {
                let track = tracks
                    .iter()
                    .find(|t| t.segment_ref() == ta.segment)
                    .expect("tag refers to a known track");
                let mid = nodes[a].lerp(nodes[b], 0.5);
                if boundary_parameter(track, mid).is_ok() {
                    edges.push(BoundaryEdge {
                        nodes: [a, b],
                        segment: ta.segment.clone(),
                        s_range: (ta.s, tb.s),
                    });
                }
            }
        }
    }
    (tags, edges)
}

fn bbox(points: &[Point2]) -> (Point2, Point2) {
    let mut lo = Point2::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in points {
        lo.x = lo.x.min(p.x);
        lo.y = lo.y.min(p.y);
        hi.x = hi.x.max(p.x);
        hi.y = hi.y.max(p.y);
    }
    (lo, hi)
}

/// Shape quality normalized to 1 for an equilateral triangle:
/// `4√3 · signed_area / (l₁² + l₂² + l₃²)`. Negative iff inverted.
pub fn element_quality(mesh: &Mesh, element: usize) -> f64 {
    triangle_quality(mesh.corners(element))
}

pub fn triangle_quality([a, b, c]: [Point2; 3]) -> f64 {
    let sum_sq = (b - a).norm_sq() + (c - b).norm_sq() + (a - c).norm_sq();
    if sum_sq == 0.0 {
        return 0.0;
    }
    let area = 0.5 * (b - a).cross(c - a);
    4.0 * 3f64.sqrt() * area / sum_sq
}

pub fn quality_report(mesh: &Mesh) -> QualityReport {
    let per_element_quality: Vec<f64> = (0..mesh.element_count())
        .map(|e| element_quality(mesh, e))
        .collect();
    let min_quality = per_element_quality
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let inverted_count = per_element_quality.iter().filter(|&&q| q < 0.0).count();
    QualityReport {
        per_element_quality,
        min_quality,
        inverted_count,
    }
}
