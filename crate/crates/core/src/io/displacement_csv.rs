use std::path::Path;

use super::{
    check_header, csv_err, csv_reader, csv_writer, fmt_f64, io_err, parse_field, IoError, Result,
};
use crate::displacement::{DisplacementField, DisplacementRow, RowKey};
use crate::geometry::{CurveId, Point2, SegmentRef};

const HEADER: [&str; 6] = ["segment_id", "key_type", "key1", "key2", "dx", "dy"];

/// Coordinate rows carry `point,x,y`; parameter rows carry `param,s,` with
/// an empty second key.
pub fn write_displacement_csv(path: &Path, fields: &[DisplacementField]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(HEADER).map_err(csv_err(path))?;
    for f in fields {
        let id = f.segment_ref().to_string();
        for r in f.rows() {
            let (kind, k1, k2) = match r.key {
                RowKey::Point(p) => ("point", fmt_f64(p.x), fmt_f64(p.y)),
                RowKey::Param(s) => ("param", fmt_f64(s), String::new()),
            };
            w.write_record([
                id.clone(),
                kind.into(),
                k1,
                k2,
                fmt_f64(r.dx),
                fmt_f64(r.dy),
            ])
            .map_err(csv_err(path))?;
        }
    }
    w.flush().map_err(io_err(path))
}

fn parse_segment_id(raw: &str) -> Option<SegmentRef> {
    let (parent, index) = raw.rsplit_once(':')?;
    Some(SegmentRef {
        parent_id: CurveId(parent.to_owned()),
        segment_index: index.parse().ok()?,
    })
}

/// Fields in order of first appearance of their segment id.
pub fn read_displacement_csv(path: &Path) -> Result<Vec<DisplacementField>> {
    let mut reader = csv_reader(path)?;
    check_header(path, &mut reader, &HEADER)?;
    let mut groups: Vec<(SegmentRef, Vec<DisplacementRow>)> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_err(path))?;
        let line = record.position().map_or(0, |p| p.line());
        let bad = |message: String| IoError::Parse {
            path: path.to_path_buf(),
            line,
            message,
        };
        let raw_id: String = parse_field(path, &record, 0, "segment_id")?;
        let seg = parse_segment_id(&raw_id)
            .ok_or_else(|| bad(format!("segment_id `{raw_id}` is not `curve:index`")))?;
        let kind: String = parse_field(path, &record, 1, "key_type")?;
        let key = match kind.as_str() {
            "point" => RowKey::Point(Point2::new(
                parse_field(path, &record, 2, "key1")?,
                parse_field(path, &record, 3, "key2")?,
            )),
            "param" => RowKey::Param(parse_field(path, &record, 2, "key1")?),
            other => {
                return Err(bad(format!(
                    "key_type `{other}` is neither point nor param"
                )))
            }
        };
        let row = DisplacementRow {
            key,
            dx: parse_field(path, &record, 4, "dx")?,
            dy: parse_field(path, &record, 5, "dy")?,
        };
        match groups.iter_mut().find(|(s, _)| *s == seg) {
            Some((_, rows)) => rows.push(row),
            None => groups.push((seg, vec![row])),
        }
    }
    groups
        .into_iter()
        .map(|(seg, rows)| Ok(DisplacementField::from_rows(seg, rows)?))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::displacement::{uniform_displacement_field, Keying};
    use crate::geometry::CurveSegment;

    fn segment(points: Vec<Point2>) -> CurveSegment {
        CurveSegment {
            parent_id: "c".into(),
            segment_index: 2,
            points,
            start_is_junction: false,
            end_is_junction: false,
            closed_loop: false,
        }
    }

    #[test]
    fn round_trip_both_keyings() {
        let dir = tempfile::tempdir().unwrap();
        let from = segment(vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.3)]);
        let to = segment(vec![Point2::new(0.1, 0.0), Point2::new(2.0, 0.7)]);
        for keying in [Keying::Parameter, Keying::Coordinate] {
            let f = uniform_displacement_field(&from, &to, 7, keying).unwrap();
            let path = dir.path().join("d.csv");
            write_displacement_csv(&path, std::slice::from_ref(&f)).unwrap();
            let back = read_displacement_csv(&path).unwrap();
            assert_eq!(back.len(), 1);
            assert_eq!(back[0].rows(), f.rows());
            assert_eq!(back[0].segment_ref(), f.segment_ref());
        }
    }

    #[test]
    fn parameter_rows_leave_key2_empty() {
        let dir = tempfile::tempdir().unwrap();
        let from = segment(vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0)]);
        let f = uniform_displacement_field(&from, &from, 3, Keying::Parameter).unwrap();
        let path = dir.path().join("d.csv");
        write_displacement_csv(&path, &[f]).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let second = text.lines().nth(1).unwrap();
        assert!(second.starts_with("c:2,param,0.0000000000000000e0,,"));
    }
}
