use std::collections::HashMap;

use super::{Mesh, MeshError, Result};
use crate::displacement::DisplacementField;
use crate::fem::{assemble_global, local_stiffness};
use crate::geometry::{Point2, SegmentRef};
use crate::linalg::conjugate_gradient;

const HARMONIC_TOL: f64 = 1e-14;

/// Full-stage node displacement: boundary values from the fields, interior
/// values from the discrete harmonic extension on the creation mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshMotion {
    full: Vec<Point2>,
    /// Largest amount by which an interior displacement component leaves the
    /// range of the boundary values (0 when the maximum principle holds).
    pub max_principle_violation: f64,
}

pub fn prepare_motion(mesh: &Mesh, fields: &[DisplacementField]) -> Result<MeshMotion> {
    let by_ref: HashMap<&SegmentRef, &DisplacementField> =
        fields.iter().map(|f| (f.segment_ref(), f)).collect();
    let n = mesh.node_count();
    let mut fixed: Vec<Option<Point2>> = vec![None; n];
    for (i, tags) in mesh.node_tags.iter().enumerate() {
        if tags.is_empty() {
            continue;
        }
        let (field, s) = tags
            .iter()
            .find_map(|t| by_ref.get(&t.segment).map(|f| (*f, t.s)))
            .ok_or(MeshError::UncoveredNode {
                node: i,
                at: mesh.reference[i],
            })?;
        let (dx, dy) = field.at_param(s)?;
        fixed[i] = Some(Point2::new(dx, dy));
    }

    let mut map = vec![None; n];
    let mut free = Vec::new();
    for i in 0..n {
        if fixed[i].is_none() {
            map[i] = Some(free.len());
            free.push(i);
        }
    }
    let mut full: Vec<Point2> = fixed.iter().map(|d| d.unwrap_or_default()).collect();

    if !free.is_empty() {
        // solve for the offset from one boundary value, so constant data
        // gives a zero right-hand side and an exact result
        let base = fixed.iter().flatten().next().copied().unwrap_or_default();
        let k = assemble_global(&mesh.reference, &mesh.triangles, local_stiffness);
        let kff = k.restrict(&map, free.len());
        let mut rhs_x = vec![0.0; free.len()];
        let mut rhs_y = vec![0.0; free.len()];
        for (fi, &i) in free.iter().enumerate() {
            for (j, v) in k.row(i) {
                if let Some(d) = fixed[j] {
                    rhs_x[fi] -= v * (d.x - base.x);
                    rhs_y[fi] -= v * (d.y - base.y);
                }
            }
        }
        let max_iter = 10 * free.len() + 100;
        let mut ux = vec![0.0; free.len()];
        let mut uy = vec![0.0; free.len()];
        conjugate_gradient(&kff, &rhs_x, &mut ux, HARMONIC_TOL, max_iter)?;
        conjugate_gradient(&kff, &rhs_y, &mut uy, HARMONIC_TOL, max_iter)?;
        for (fi, &i) in free.iter().enumerate() {
            full[i] = Point2::new(base.x + ux[fi], base.y + uy[fi]);
        }
    }

    let mut violation: f64 = 0.0;
    let bounds = |pick: fn(&Point2) -> f64| {
        fixed
            .iter()
            .flatten()
            .map(pick)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(v), hi.max(v))
            })
    };
    let (xlo, xhi) = bounds(|p| p.x);
    let (ylo, yhi) = bounds(|p| p.y);
    for &i in &free {
        let d = full[i];
        violation = violation
            .max(xlo - d.x)
            .max(d.x - xhi)
            .max(ylo - d.y)
            .max(d.y - yhi);
    }

    Ok(MeshMotion {
        full,
        max_principle_violation: violation.max(0.0),
    })
}

impl MeshMotion {
    pub fn displacement(&self) -> &[Point2] {
        &self.full
    }

    /// Mesh with every node at `reference + fraction · displacement`.
    pub fn apply(&self, mesh: &Mesh, fraction: f64) -> Result<Mesh> {
        if !(0.0..=1.0).contains(&fraction) {
            return Err(MeshError::BadFraction(fraction));
        }
        let mut out = mesh.clone();
        for (p, (q, d)) in out
            .nodes
            .iter_mut()
            .zip(mesh.reference.iter().zip(&self.full))
        {
            *p = if fraction == 0.0 {
                *q
            } else {
                Point2::new(q.x + fraction * d.x, q.y + fraction * d.y)
            };
        }
        Ok(out)
    }
}

/// Place the mesh at `fraction` of the stage deformation.
pub fn move_mesh(mesh: &Mesh, fields: &[DisplacementField], fraction: f64) -> Result<Mesh> {
    prepare_motion(mesh, fields)?.apply(mesh, fraction)
}
