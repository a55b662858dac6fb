use std::collections::HashMap;

use spade::handles::FixedVertexHandle;
use spade::{AngleLimit, ConstrainedDelaunayTriangulation, RefinementParameters, Triangulation};

use super::{compute_tags, Mesh, MeshError, Result};
use crate::geometry::{point_in_polygon, Point2, SegmentedGeometry, INTERSECTION_TOL};

type Cdt = ConstrainedDelaunayTriangulation<spade::Point2<f64>>;

/// 1/30 of the bounding-box diagonal of all segment vertices.
pub fn default_edge_length(geometry: &SegmentedGeometry) -> f64 {
    let mut lo = Point2::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in geometry.segments.iter().flat_map(|s| s.points.iter()) {
        lo.x = lo.x.min(p.x);
        lo.y = lo.y.min(p.y);
        hi.x = hi.x.max(p.x);
        hi.y = hi.y.max(p.y);
    }
    hi.distance(lo) / 30.0
}

/// Constrained Delaunay triangulation of the segmented geometry, refined to
/// roughly `target_edge_length`, with every triangle labeled by the
/// subdomain containing its centroid.
pub fn triangulate(geometry: &SegmentedGeometry, target_edge_length: f64) -> Result<Mesh> {
    if !(target_edge_length.is_finite() && target_edge_length > 0.0) {
        return Err(MeshError::BadEdgeLength(target_edge_length));
    }
    let loops = geometry.loop_polygons()?;

    let mut cdt = Cdt::new();
    let mut handles: HashMap<(u64, u64), FixedVertexHandle> = HashMap::new();
    let mut handle_of = |cdt: &mut Cdt, p: Point2| -> Result<FixedVertexHandle> {
        let key = (p.x.to_bits(), p.y.to_bits());
        if let Some(h) = handles.get(&key) {
            return Ok(*h);
        }
        let h = cdt
            .insert(spade::Point2::new(p.x, p.y))
            .map_err(|e| MeshError::Triangulation(format!("{e:?} at {p}")))?;
        handles.insert(key, h);
        Ok(h)
    };
    for seg in &geometry.segments {
        for w in seg.points.windows(2) {
            let a = handle_of(&mut cdt, w[0])?;
            let b = handle_of(&mut cdt, w[1])?;
            if a == b {
                continue;
            }
            if !cdt.can_add_constraint(a, b) {
                return Err(MeshError::SelfIntersecting {
                    from: w[0],
                    to: w[1],
                });
            }
            cdt.add_constraint(a, b);
        }
    }

    let max_area = 3f64.sqrt() / 4.0 * target_edge_length * target_edge_length;
    let estimate = loops
        .iter()
        .map(|l| crate::geometry::signed_area(l).abs())
        .sum::<f64>()
        / max_area;
    let params = RefinementParameters::<f64>::new()
        .with_max_allowed_area(max_area)
        .with_angle_limit(AngleLimit::from_deg(25.0))
        .with_max_additional_vertices(((estimate * 20.0) as usize).max(10_000));
    cdt.refine(params);

    // keep faces inside some subdomain loop; remap vertices densely
    let mut node_of: HashMap<usize, usize> = HashMap::new();
    let mut nodes = Vec::new();
    let mut triangles = Vec::new();
    let mut labels = Vec::new();
    let mut faces: Vec<_> = cdt
        .inner_faces()
        .map(|f| {
            let v = f.vertices();
            [v[0].fix().index(), v[1].fix().index(), v[2].fix().index()]
        })
        .collect();
    faces.sort_unstable();
    let position = |i: usize| {
        let p = cdt.vertex(FixedVertexHandle::from_index(i)).position();
        Point2::new(p.x, p.y)
    };
    for f in faces {
        let [a, b, c] = f.map(position);
        let centroid = Point2::new((a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0);
        let Some(label) = loops.iter().position(|l| point_in_polygon(centroid, l)) else {
            continue;
        };
        let mut tri = f;
        if (b - a).cross(c - a) < 0.0 {
            tri.swap(1, 2);
        }
        let tri = tri.map(|v| {
            *node_of.entry(v).or_insert_with(|| {
                nodes.push(position(v));
                nodes.len() - 1
            })
        });
        triangles.push(tri);
        labels.push(label);
    }
    if triangles.is_empty() {
        return Err(MeshError::Triangulation(
            "no triangles inside the subdomain loops".into(),
        ));
    }
    for (e, t) in triangles.iter().enumerate() {
        let (a, b, c) = (nodes[t[0]], nodes[t[1]], nodes[t[2]]);
        if (b - a).cross(c - a) <= 0.0 {
            return Err(MeshError::DegenerateElement(e));
        }
    }

    let (node_tags, boundary_edges) =
        compute_tags(&nodes, &triangles, &geometry.segments, INTERSECTION_TOL);
    let mut junction_nodes = Vec::with_capacity(geometry.junctions.len());
    for j in &geometry.junctions {
        let k = nodes
            .iter()
            .position(|p| p.distance(*j) <= INTERSECTION_TOL)
            .ok_or_else(|| MeshError::Triangulation(format!("junction {j} is not a mesh node")))?;
        junction_nodes.push(k);
    }

    Ok(Mesh {
        reference: nodes.clone(),
        nodes,
        triangles,
        element_labels: labels,
        subdomain_ids: geometry.subdomains.iter().map(|s| s.id.clone()).collect(),
        node_tags,
        boundary_edges,
        junction_nodes,
    })
}
