//! Plain-text readers and writers for geometry, displacement tables and
//! simulation outputs.
//!
//! Every float is written with 17 significant digits so that values read
//! back are bitwise identical.

mod displacement_csv;
mod geometry_csv;
mod output;

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::displacement::DisplacementError;
use crate::geometry::GeometryError;

pub use displacement_csv::{read_displacement_csv, write_displacement_csv};
pub use geometry_csv::{read_geometry, sidecar_path, write_geometry, write_segments_csv};
pub use output::{
    fields_file_name, write_areas_csv, write_fields_csv, write_quality_csv, write_vtk,
};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{}: line {line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },
    #[error("{}: {message}", path.display())]
    Toml { path: PathBuf, message: String },
    #[error("{}: unknown keys: {}", path.display(), keys.join(", "))]
    UnknownKeys { path: PathBuf, keys: Vec<String> },
    #[error("invalid value for `{field}`: {message}")]
    Invalid { field: String, message: String },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Displacement(#[from] DisplacementError),
}

pub type Result<T> = std::result::Result<T, IoError>;

/// Fixed 17-significant-digit float formatting.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> IoError + '_ {
    move |source| IoError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> IoError + '_ {
    move |source| IoError::Csv {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    csv::Writer::from_path(path).map_err(csv_err(path))
}

fn csv_reader(path: &Path) -> Result<csv::Reader<std::fs::File>> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(csv_err(path))
}

/// Fail unless the header matches `expected` exactly.
fn check_header(
    path: &Path,
    reader: &mut csv::Reader<std::fs::File>,
    expected: &[&str],
) -> Result<()> {
    let header = reader.headers().map_err(csv_err(path))?;
    if header.iter().ne(expected.iter().copied()) {
        return Err(IoError::Parse {
            path: path.to_path_buf(),
            line: 1,
            message: format!(
                "expected header `{}`, found `{}`",
                expected.join(","),
                header.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }
    Ok(())
}

fn parse_field<T: std::str::FromStr>(
    path: &Path,
    record: &csv::StringRecord,
    index: usize,
    name: &str,
) -> Result<T> {
    let line = record.position().map_or(0, |p| p.line());
    let raw = record.get(index).ok_or_else(|| IoError::Parse {
        path: path.to_path_buf(),
        line,
        message: format!("missing column `{name}`"),
    })?;
    raw.parse().map_err(|_| IoError::Parse {
        path: path.to_path_buf(),
        line,
        message: format!("cannot parse `{name}` from `{raw}`"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE] {
            let s = fmt_f64(v);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
        assert_eq!(fmt_f64(0.5), "5.0000000000000000e-1");
    }
}
