//! The run configuration document.
//!
//! ```toml
//! mode = "model2"                 # or "model1"
//!
//! [geometry]
//! geometry_t = "geometry_t.csv"   # relative to this file
//! geometry_t1 = "geometry_t1.csv"
//! n_points_per_segment = 100
//! # target_edge_length = 0.07     # default: bounding-box diagonal / 30
//! keying = "parameter"            # or "coordinate"
//!
//! [solver]
//! dt = 0.01
//! t_end = 1.0
//! picard_tol = 1e-10
//! picard_max_iters = 50
//! linear_solver_tol = 1e-12
//! strict_mesh = false
//!
//! [params]                        # any subset; the rest keep defaults
//! rho_A = 0.36
//!
//! [output]
//! output_dir = "out"
//! snapshot_every = 10
//! vtk = true
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::displacement::{Keying, DEFAULT_POINTS_PER_SEGMENT};
use crate::io::{fmt_f64, IoError, Result};
use crate::kinetics::KineticParams;
use crate::solver::{Mode, SolverConfig, StageConfig};

const TOP_KEYS: &[&str] = &["mode", "geometry", "solver", "params", "output"];
const GEOMETRY_KEYS: &[&str] = &[
    "geometry_t",
    "geometry_t1",
    "n_points_per_segment",
    "target_edge_length",
    "keying",
];
const SOLVER_KEYS: &[&str] = &[
    "dt",
    "t_end",
    "picard_tol",
    "picard_max_iters",
    "linear_solver_tol",
    "strict_mesh",
];
const PARAM_KEYS: &[&str] = &[
    "D", "D_A", "D_B", "D_C", "rho_A", "rho_B", "rho_C", "d_A", "d_B", "d_C", "K_BA", "K_AB",
    "K_CB", "K_AC", "T", "L",
];
const OUTPUT_KEYS: &[&str] = &["output_dir", "snapshot_every", "vtk"];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub geometry_t: PathBuf,
    pub geometry_t1: PathBuf,
    pub mode: Mode,
    pub stage: StageConfig,
    pub params: KineticParams,
    pub output_dir: PathBuf,
    pub snapshot_every: usize,
    pub vtk: bool,
}

#[derive(Debug, Default, Deserialize)]
struct RawConfig {
    mode: Option<String>,
    #[serde(default)]
    geometry: RawGeometry,
    #[serde(default)]
    solver: RawSolver,
    #[serde(default)]
    params: RawParams,
    #[serde(default)]
    output: RawOutput,
}

#[derive(Debug, Default, Deserialize)]
struct RawGeometry {
    geometry_t: Option<PathBuf>,
    geometry_t1: Option<PathBuf>,
    n_points_per_segment: Option<i64>,
    target_edge_length: Option<f64>,
    keying: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
struct RawSolver {
    dt: Option<f64>,
    t_end: Option<f64>,
    picard_tol: Option<f64>,
    picard_max_iters: Option<i64>,
    linear_solver_tol: Option<f64>,
    strict_mesh: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[allow(non_snake_case)]
struct RawParams {
    D: Option<f64>,
    D_A: Option<f64>,
    D_B: Option<f64>,
    D_C: Option<f64>,
    rho_A: Option<f64>,
    rho_B: Option<f64>,
    rho_C: Option<f64>,
    d_A: Option<f64>,
    d_B: Option<f64>,
    d_C: Option<f64>,
    K_BA: Option<f64>,
    K_AB: Option<f64>,
    K_CB: Option<f64>,
    K_AC: Option<f64>,
    T: Option<f64>,
    L: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
struct RawOutput {
    output_dir: Option<PathBuf>,
    snapshot_every: Option<i64>,
    vtk: Option<bool>,
}

fn invalid(field: &str, message: impl Into<String>) -> IoError {
    IoError::Invalid {
        field: field.to_owned(),
        message: message.into(),
    }
}

fn unknown_keys(doc: &toml::Table) -> Vec<String> {
    let mut out = Vec::new();
    for (key, value) in doc {
        let allowed = match key.as_str() {
            "geometry" => GEOMETRY_KEYS,
            "solver" => SOLVER_KEYS,
            "params" => PARAM_KEYS,
            "output" => OUTPUT_KEYS,
            k if TOP_KEYS.contains(&k) => continue,
            _ => {
                out.push(key.clone());
                continue;
            }
        };
        if let toml::Value::Table(section) = value {
            out.extend(
                section
                    .keys()
                    .filter(|k| !allowed.contains(&k.as_str()))
                    .map(|k| format!("{key}.{k}")),
            );
        }
    }
    out
}

fn count(field: &str, v: Option<i64>, default: usize, min: usize) -> Result<usize> {
    match v {
        None => Ok(default),
        Some(n) if n >= min as i64 => Ok(n as usize),
        Some(n) => Err(invalid(field, format!("{n} is below the minimum {min}"))),
    }
}

/// Parse and validate a configuration document. Relative paths are
/// resolved against `base`.
pub fn parse_config(text: &str, base: &Path, origin: &Path) -> Result<RunConfig> {
    let doc: toml::Table = text.parse().map_err(|e: toml::de::Error| IoError::Toml {
        path: origin.to_path_buf(),
        message: e.to_string(),
    })?;
    let unknown = unknown_keys(&doc);
    if !unknown.is_empty() {
        return Err(IoError::UnknownKeys {
            path: origin.to_path_buf(),
            keys: unknown,
        });
    }
    let raw: RawConfig = doc.try_into().map_err(|e: toml::de::Error| IoError::Toml {
        path: origin.to_path_buf(),
        message: e.to_string(),
    })?;

    let mode = match raw.mode.as_deref() {
        None => Mode::default(),
        Some(m) => m.parse().map_err(|e: String| invalid("mode", e))?,
    };
    let g = raw.geometry;
    let resolve = |field: &str, p: Option<PathBuf>| -> Result<PathBuf> {
        let p = p.ok_or_else(|| invalid(field, "required"))?;
        let full = if p.is_absolute() { p } else { base.join(p) };
        if !full.is_file() {
            return Err(invalid(field, format!("{} does not exist", full.display())));
        }
        Ok(full)
    };
    let geometry_t = resolve("geometry.geometry_t", g.geometry_t)?;
    let geometry_t1 = resolve("geometry.geometry_t1", g.geometry_t1)?;
    let points_per_segment = count(
        "geometry.n_points_per_segment",
        g.n_points_per_segment,
        DEFAULT_POINTS_PER_SEGMENT,
        2,
    )?;
    if let Some(h) = g.target_edge_length {
        if !(h.is_finite() && h > 0.0) {
            return Err(invalid("geometry.target_edge_length", "must be positive"));
        }
    }
    let keying = match g.keying.as_deref() {
        None | Some("parameter") => Keying::Parameter,
        Some("coordinate") => Keying::Coordinate,
        Some(other) => {
            return Err(invalid(
                "geometry.keying",
                format!("`{other}` (expected parameter or coordinate)"),
            ))
        }
    };

    let s = raw.solver;
    let d = SolverConfig::default();
    let solver = SolverConfig {
        dt: s.dt.unwrap_or(d.dt),
        t_end: s.t_end.unwrap_or(d.t_end),
        picard_tol: s.picard_tol.unwrap_or(d.picard_tol),
        picard_max_iters: count(
            "solver.picard_max_iters",
            s.picard_max_iters,
            d.picard_max_iters,
            1,
        )?,
        linear_solver_tol: s.linear_solver_tol.unwrap_or(d.linear_solver_tol),
        strict_mesh: s.strict_mesh.unwrap_or(d.strict_mesh),
    };
    if !(solver.dt.is_finite() && solver.dt > 0.0) {
        return Err(invalid("solver.dt", "must be positive"));
    }
    if !(solver.t_end.is_finite() && solver.t_end >= solver.dt) {
        return Err(invalid("solver.t_end", "must be at least dt"));
    }
    for (field, v) in [
        ("solver.picard_tol", solver.picard_tol),
        ("solver.linear_solver_tol", solver.linear_solver_tol),
    ] {
        if !(v.is_finite() && v > 0.0) {
            return Err(invalid(field, "must be positive"));
        }
    }

    let p = raw.params;
    let mut params = KineticParams::default();
    let r = &mut params.rates;
    let h = &mut params.hill;
    for (slot, v) in [
        (&mut r.diffusion, p.D),
        (&mut r.rho_a, p.rho_A),
        (&mut r.rho_b, p.rho_B),
        (&mut r.rho_c, p.rho_C),
        (&mut r.d_a, p.d_A),
        (&mut r.d_b, p.d_B),
        (&mut r.d_c, p.d_C),
        (&mut h.k_ba, p.K_BA),
        (&mut h.k_ab, p.K_AB),
        (&mut h.k_cb, p.K_CB),
        (&mut h.k_ac, p.K_AC),
        (&mut params.time_scale, p.T),
        (&mut params.length_scale, p.L),
    ] {
        if let Some(v) = v {
            *slot = v;
        }
    }
    params.rates.diffusion_override = [p.D_A, p.D_B, p.D_C];
    params.validate().map_err(|e| match e {
        crate::kinetics::KineticsError::InvalidParameter(name, what) => {
            invalid(&format!("params.{name}"), format!("must be {what}"))
        }
        other => invalid("params", other.to_string()),
    })?;

    let o = raw.output;
    let output_dir = match o.output_dir {
        None => base.join("out"),
        Some(p) if p.is_absolute() => p,
        Some(p) => base.join(p),
    };
    Ok(RunConfig {
        geometry_t,
        geometry_t1,
        mode,
        stage: StageConfig {
            solver,
            points_per_segment,
            target_edge_length: g.target_edge_length,
            keying,
        },
        params,
        output_dir,
        snapshot_every: count("output.snapshot_every", o.snapshot_every, 10, 1)?,
        vtk: o.vtk.unwrap_or(true),
    })
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| IoError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_config(&text, base, path)
}

/// A configuration document naming the two geometry files and the default
/// solver settings.
pub fn default_config_text(geometry_t: &str, geometry_t1: &str, mode: Mode) -> String {
    let s = SolverConfig::default();
    format!(
        "mode = \"{mode}\"\n\n\
         [geometry]\n\
         geometry_t = \"{geometry_t}\"\n\
         geometry_t1 = \"{geometry_t1}\"\n\
         n_points_per_segment = {DEFAULT_POINTS_PER_SEGMENT}\n\
         keying = \"parameter\"\n\n\
         [solver]\n\
         dt = {}\n\
         t_end = {}\n\
         picard_tol = {}\n\
         picard_max_iters = {}\n\
         linear_solver_tol = {}\n\
         strict_mesh = false\n\n\
         [params]\n\n\
         [output]\n\
         output_dir = \"out\"\n\
         snapshot_every = 10\n\
         vtk = true\n",
        fmt_f64(s.dt),
        fmt_f64(s.t_end),
        fmt_f64(s.picard_tol),
        s.picard_max_iters,
        fmt_f64(s.linear_solver_tol),
    )
}
