use std::fmt::Write as _;
use std::path::Path;

use super::{csv_err, csv_writer, fmt_f64, io_err, Result};
use crate::geometry::SubdomainId;
use crate::mesh::{quality_report, Mesh};
use crate::solver::{SolverState, StepRecord, SPECIES};

pub fn fields_file_name(step: usize) -> String {
    format!("fields_{step:04}.csv")
}

/// `step,time,area_<id>...,area_total`.
pub fn write_areas_csv(path: &Path, ids: &[SubdomainId], records: &[StepRecord]) -> Result<()> {
    let mut w = csv_writer(path)?;
    let mut header = vec!["step".to_owned(), "time".to_owned()];
    header.extend(ids.iter().map(|id| format!("area_{id}")));
    header.push("area_total".into());
    w.write_record(&header).map_err(csv_err(path))?;
    for r in records {
        let mut row = vec![r.step.to_string(), fmt_f64(r.time)];
        row.extend(r.areas.iter().map(|a| fmt_f64(*a)));
        row.push(fmt_f64(r.total_area));
        w.write_record(&row).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// `step,min_quality,inverted_count`.
pub fn write_quality_csv(path: &Path, records: &[StepRecord]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["step", "min_quality", "inverted_count"])
        .map_err(csv_err(path))?;
    for r in records {
        w.write_record([
            r.step.to_string(),
            fmt_f64(r.min_quality),
            r.inverted_count.to_string(),
        ])
        .map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// `node,x,y,A,B,C,P_A,P_B,P_C` at the mesh's current node positions.
pub fn write_fields_csv(
    path: &Path,
    mesh: &Mesh,
    state: &SolverState,
    production: &[[f64; 3]],
) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["node", "x", "y", "A", "B", "C", "P_A", "P_B", "P_C"])
        .map_err(csv_err(path))?;
    let c = &state.concentrations;
    for (i, p) in mesh.nodes.iter().enumerate() {
        let pr = production[i];
        w.write_record([
            i.to_string(),
            fmt_f64(p.x),
            fmt_f64(p.y),
            fmt_f64(c[0][i]),
            fmt_f64(c[1][i]),
            fmt_f64(c[2][i]),
            fmt_f64(pr[0]),
            fmt_f64(pr[1]),
            fmt_f64(pr[2]),
        ])
        .map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// Legacy ASCII VTK unstructured grid with element label and quality as
/// cell data and the species plus their production as point data.
pub fn write_vtk(
    path: &Path,
    mesh: &Mesh,
    state: &SolverState,
    production: &[[f64; 3]],
) -> Result<()> {
    let n = mesh.node_count();
    let m = mesh.element_count();
    let mut s = String::new();
    // writing into a String cannot fail
    let _ = writeln!(s, "# vtk DataFile Version 3.0");
    let _ = writeln!(s, "growfem t={}", fmt_f64(state.time));
    let _ = writeln!(s, "ASCII\nDATASET UNSTRUCTURED_GRID");
    let _ = writeln!(s, "POINTS {n} double");
    for p in &mesh.nodes {
        let _ = writeln!(s, "{} {} 0", fmt_f64(p.x), fmt_f64(p.y));
    }
    let _ = writeln!(s, "CELLS {m} {}", 4 * m);
    for t in &mesh.triangles {
        let _ = writeln!(s, "3 {} {} {}", t[0], t[1], t[2]);
    }
    let _ = writeln!(s, "CELL_TYPES {m}");
    for _ in 0..m {
        let _ = writeln!(s, "5");
    }
    let q = quality_report(mesh);
    let _ = writeln!(s, "CELL_DATA {m}");
    let _ = writeln!(s, "SCALARS label int 1\nLOOKUP_TABLE default");
    for l in &mesh.element_labels {
        let _ = writeln!(s, "{l}");
    }
    let _ = writeln!(s, "SCALARS quality double 1\nLOOKUP_TABLE default");
    for v in &q.per_element_quality {
        let _ = writeln!(s, "{}", fmt_f64(*v));
    }
    let _ = writeln!(s, "POINT_DATA {n}");
    for (k, name) in SPECIES.iter().enumerate() {
        let _ = writeln!(s, "SCALARS {name} double 1\nLOOKUP_TABLE default");
        for v in &state.concentrations[k] {
            let _ = writeln!(s, "{}", fmt_f64(*v));
        }
    }
    for (k, name) in SPECIES.iter().enumerate() {
        let _ = writeln!(s, "SCALARS P_{name} double 1\nLOOKUP_TABLE default");
        for p in production {
            let _ = writeln!(s, "{}", fmt_f64(p[k]));
        }
    }
    std::fs::write(path, s).map_err(io_err(path))
}
