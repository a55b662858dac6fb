use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{
    check_header, csv_err, csv_reader, csv_writer, fmt_f64, io_err, parse_field, IoError, Result,
};
use crate::geometry::{
    Curve, CurveId, LoopPiece, Point2, SegmentedGeometry, StagedGeometry, Subdomain,
};

const GEOMETRY_HEADER: [&str; 4] = ["curve_id", "point_index", "x", "y"];
const SEGMENTS_HEADER: [&str; 6] = [
    "parent_id",
    "segment_index",
    "point_index",
    "x",
    "y",
    "junction",
];

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Sidecar {
    stage_time: i64,
    #[serde(default)]
    curves: Vec<CurveMeta>,
    #[serde(default)]
    subdomains: Vec<SubdomainMeta>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CurveMeta {
    id: String,
    #[serde(default)]
    closed: bool,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SubdomainMeta {
    id: String,
    pieces: Vec<PieceMeta>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PieceMeta {
    curve: String,
    #[serde(default)]
    segment: usize,
    #[serde(default)]
    reversed: bool,
}

/// The sidecar document next to a geometry CSV: same stem, `.toml`.
pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("toml")
}

/// Write the vertex table and its sidecar.
pub fn write_geometry(csv_path: &Path, geometry: &StagedGeometry) -> Result<()> {
    let mut w = csv_writer(csv_path)?;
    w.write_record(GEOMETRY_HEADER).map_err(csv_err(csv_path))?;
    for c in &geometry.curves {
        for (i, p) in c.points().iter().enumerate() {
            w.write_record([c.id().0.clone(), i.to_string(), fmt_f64(p.x), fmt_f64(p.y)])
                .map_err(csv_err(csv_path))?;
        }
    }
    w.flush().map_err(io_err(csv_path))?;

    let sidecar = Sidecar {
        stage_time: geometry.stage_time,
        curves: geometry
            .curves
            .iter()
            .map(|c| CurveMeta {
                id: c.id().0.clone(),
                closed: c.is_closed(),
            })
            .collect(),
        subdomains: geometry
            .subdomains
            .iter()
            .map(|s| SubdomainMeta {
                id: s.id.0.clone(),
                pieces: s
                    .pieces
                    .iter()
                    .map(|p| PieceMeta {
                        curve: p.curve_id.0.clone(),
                        segment: p.segment_index,
                        reversed: p.reversed,
                    })
                    .collect(),
            })
            .collect(),
    };
    let side = sidecar_path(csv_path);
    let text = toml::to_string(&sidecar).map_err(|e| IoError::Toml {
        path: side.clone(),
        message: e.to_string(),
    })?;
    std::fs::write(&side, text).map_err(io_err(&side))
}

/// Read a geometry CSV and its sidecar. Curves appear in the order the
/// sidecar lists them; curves missing from the sidecar are open and follow
/// in order of first appearance.
pub fn read_geometry(csv_path: &Path) -> Result<StagedGeometry> {
    let side = sidecar_path(csv_path);
    let text = std::fs::read_to_string(&side).map_err(io_err(&side))?;
    let sidecar: Sidecar = toml::from_str(&text).map_err(|e| IoError::Toml {
        path: side.clone(),
        message: e.to_string(),
    })?;

    let mut reader = csv_reader(csv_path)?;
    check_header(csv_path, &mut reader, &GEOMETRY_HEADER)?;
    let mut order: Vec<String> = Vec::new();
    let mut points: Vec<Vec<(usize, Point2)>> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_err(csv_path))?;
        let id: String = parse_field(csv_path, &record, 0, "curve_id")?;
        let index: usize = parse_field(csv_path, &record, 1, "point_index")?;
        let x: f64 = parse_field(csv_path, &record, 2, "x")?;
        let y: f64 = parse_field(csv_path, &record, 3, "y")?;
        let k = match order.iter().position(|o| *o == id) {
            Some(k) => k,
            None => {
                order.push(id);
                points.push(Vec::new());
                order.len() - 1
            }
        };
        points[k].push((index, Point2::new(x, y)));
    }

    let mut ids: Vec<String> = sidecar.curves.iter().map(|c| c.id.clone()).collect();
    for id in &order {
        if !ids.contains(id) {
            ids.push(id.clone());
        }
    }
    let mut curves = Vec::with_capacity(ids.len());
    for id in ids {
        let k = order
            .iter()
            .position(|o| *o == id)
            .ok_or_else(|| IoError::Invalid {
                field: format!("curves.{id}"),
                message: "declared in the sidecar but has no vertices".into(),
            })?;
        let mut pts = std::mem::take(&mut points[k]);
        pts.sort_by_key(|(i, _)| *i);
        if pts.iter().enumerate().any(|(expect, (i, _))| expect != *i) {
            return Err(IoError::Invalid {
                field: format!("curves.{id}"),
                message: "point_index must run 0, 1, 2, ... without gaps".into(),
            });
        }
        let closed = sidecar
            .curves
            .iter()
            .find(|c| c.id == id)
            .is_some_and(|c| c.closed);
        curves.push(Curve::new(
            CurveId(id),
            pts.into_iter().map(|(_, p)| p).collect(),
            closed,
        )?);
    }

    let subdomains = sidecar
        .subdomains
        .into_iter()
        .map(|s| Subdomain {
            id: s.id.as_str().into(),
            pieces: s
                .pieces
                .into_iter()
                .map(|p| LoopPiece {
                    curve_id: CurveId(p.curve),
                    segment_index: p.segment,
                    reversed: p.reversed,
                })
                .collect(),
        })
        .collect();
    Ok(StagedGeometry::new(sidecar.stage_time, curves, subdomains)?)
}

/// One row per segment vertex; `junction` is 1 on flagged endpoints.
pub fn write_segments_csv(path: &Path, geometry: &SegmentedGeometry) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(SEGMENTS_HEADER).map_err(csv_err(path))?;
    for s in &geometry.segments {
        let last = s.points.len() - 1;
        for (i, p) in s.points.iter().enumerate() {
            let junction = (i == 0 && s.start_is_junction) || (i == last && s.end_is_junction);
            w.write_record([
                s.parent_id.0.clone(),
                s.segment_index.to_string(),
                i.to_string(),
                fmt_f64(p.x),
                fmt_f64(p.y),
                u8::from(junction).to_string(),
            ])
            .map_err(csv_err(path))?;
        }
    }
    w.flush().map_err(io_err(path))
}
