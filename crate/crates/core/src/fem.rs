//! Linear (P1) triangle element matrices.

use crate::geometry::Point2;
use crate::linalg::CsrMatrix;

/// Element area used for integration. The absolute value measures an
/// inverted element by its physical size.
pub fn element_measure([a, b, c]: [Point2; 3]) -> f64 {
    (0.5 * (b - a).cross(c - a)).abs()
}

/// Consistent mass matrix `area/12 · [[2,1,1],[1,2,1],[1,1,2]]`.
pub fn local_mass(corners: [Point2; 3]) -> [[f64; 3]; 3] {
    let m = element_measure(corners) / 12.0;
    let mut out = [[m; 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        row[i] = 2.0 * m;
    }
    out
}

/// Stiffness `∫ ∇φᵢ·∇φⱼ` over the element. Zero for a collapsed element.
pub fn local_stiffness([p0, p1, p2]: [Point2; 3]) -> [[f64; 3]; 3] {
    let area = element_measure([p0, p1, p2]);
    if area <= f64::MIN_POSITIVE {
        return [[0.0; 3]; 3];
    }
    let b = [p1.y - p2.y, p2.y - p0.y, p0.y - p1.y];
    let c = [p2.x - p1.x, p0.x - p2.x, p1.x - p0.x];
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            if i != j {
                out[i][j] = (b[i] * b[j] + c[i] * c[j]) / (4.0 * area);
            }
        }
    }
    // diagonal from the off-diagonals: rows annihilate constants exactly
    for (i, row) in out.iter_mut().enumerate() {
        row[i] = -(row[(i + 1) % 3] + row[(i + 2) % 3]);
    }
    out
}

pub fn assemble_global(
    nodes: &[Point2],
    triangles: &[[usize; 3]],
    local: impl Fn([Point2; 3]) -> [[f64; 3]; 3],
) -> CsrMatrix {
    let mut m = CsrMatrix::from_triangles(nodes.len(), triangles);
    for t in triangles {
        let le = local([nodes[t[0]], nodes[t[1]], nodes[t[2]]]);
        for i in 0..3 {
            for j in 0..3 {
                m.add(t[i], t[j], le[i][j]);
            }
        }
    }
    m
}
