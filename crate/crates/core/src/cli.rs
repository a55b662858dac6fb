//! The `growfem` command-line harness.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::config::{default_config_text, load_config, RunConfig};
use crate::displacement::uniform_displacement_field;
use crate::fixture::{generate_fixture, FixtureError};
use crate::geometry::{segment_at_intersections, GeometryError, INTERSECTION_TOL};
use crate::io::{
    fields_file_name, read_geometry, write_areas_csv, write_displacement_csv, write_fields_csv,
    write_geometry, write_quality_csv, write_segments_csv, write_vtk, IoError,
};
use crate::kinetics::NetworkSpec;
use crate::mesh::{default_edge_length, quality_report, triangulate, MeshError};
use crate::solver::{nodal_production, run_stage, Mode, SolverError, SolverState, StepRecord};

#[derive(Debug, Parser)]
#[command(
    name = "growfem",
    version,
    about = "Reaction-diffusion on growing 2D domains"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one growth stage and write areas, quality and field snapshots.
    Simulate(RunArgs),
    /// Split both stages' curves at their junctions.
    Segment(RunArgs),
    /// Write the boundary displacement table for the chosen mode.
    Displace(RunArgs),
    /// Triangulate the stage-t geometry and report element quality.
    MeshReport(RunArgs),
    /// Write the synthetic two-stage geometry and a matching config.
    Fixture(FixtureArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides the config's mode.
    #[arg(long)]
    pub mode: Option<Mode>,
    /// Overrides the config's output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Refuse to step on inverted elements.
    #[arg(long)]
    pub strict_mesh: bool,
    /// Reserved; the pipeline is deterministic.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct FixtureArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    #[arg(long)]
    pub mode: Option<Mode>,
    /// Reserved; the pipeline is deterministic.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Fixture(#[from] FixtureError),
    #[error(transparent)]
    Displacement(#[from] crate::displacement::DisplacementError),
}

fn create_dir(path: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(path).map_err(|source| {
        IoError::Io {
            path: path.to_path_buf(),
            source,
        }
        .into()
    })
}

fn resolved(args: &RunArgs) -> Result<RunConfig, CliError> {
    let mut cfg = load_config(&args.config)?;
    if let Some(m) = args.mode {
        cfg.mode = m;
    }
    if let Some(out) = &args.out {
        cfg.output_dir = out.clone();
    }
    if args.strict_mesh {
        cfg.stage.solver.strict_mesh = true;
    }
    Ok(cfg)
}

fn simulate(cfg: &RunConfig) -> Result<(), CliError> {
    let g0 = read_geometry(&cfg.geometry_t)?;
    let g1 = read_geometry(&cfg.geometry_t1)?;
    let network = NetworkSpec::with_params(cfg.params.clone());
    create_dir(&cfg.output_dir)?;

    let n_steps = cfg.stage.solver.step_count();
    let mut write_error: Option<IoError> = None;
    let mut observer = |view: &crate::solver::StepView<'_>| {
        let k = view.record.step;
        if write_error.is_some() || !(k.is_multiple_of(cfg.snapshot_every) || k == n_steps) {
            return;
        }
        let production = nodal_production(view.mesh, view.network, view.state);
        let fields = cfg.output_dir.join(fields_file_name(k));
        let mut result = write_fields_csv(&fields, view.mesh, view.state, &production);
        if result.is_ok() && cfg.vtk {
            let vtk = cfg.output_dir.join(format!("mesh_{k:04}.vtk"));
            result = write_vtk(&vtk, view.mesh, view.state, &production);
        }
        if let Err(e) = result {
            write_error = Some(e);
        }
    };
    let result = run_stage(&g0, &g1, &network, &cfg.stage, cfg.mode, &mut observer)?;
    if let Some(e) = write_error {
        return Err(e.into());
    }
    write_areas_csv(
        &cfg.output_dir.join("areas.csv"),
        &result.initial_mesh.subdomain_ids,
        &result.records,
    )?;
    write_quality_csv(&cfg.output_dir.join("quality.csv"), &result.records)?;
    let summary = format!(
        "mode = \"{}\"\nmax_junction_error = {:.16e}\nmax_area_error = {:.16e}\n\
         any_inverted = {}\nmax_principle_violation = {:.16e}\n\
         integrated_production = [{:.16e}, {:.16e}, {:.16e}]\n\
         target_areas = [{}]\n",
        result.mode,
        result.max_junction_error(),
        result.max_area_error(),
        result.any_inverted(),
        result.max_principle_violation,
        result.integrated_production[0],
        result.integrated_production[1],
        result.integrated_production[2],
        result
            .target_areas
            .iter()
            .map(|a| format!("{a:.16e}"))
            .collect::<Vec<_>>()
            .join(", "),
    );
    let path = cfg.output_dir.join("summary.toml");
    std::fs::write(&path, summary).map_err(|source| IoError::Io { path, source })?;
    Ok(())
}

fn segment(cfg: &RunConfig) -> Result<(), CliError> {
    let g0 = read_geometry(&cfg.geometry_t)?;
    let g1 = read_geometry(&cfg.geometry_t1)?;
    let s0 = segment_at_intersections(&g0, INTERSECTION_TOL)?;
    let s1 = segment_at_intersections(&g1, INTERSECTION_TOL)?;
    s0.check_correspondence(&s1)?;
    create_dir(&cfg.output_dir)?;
    write_segments_csv(&cfg.output_dir.join("segments_t.csv"), &s0)?;
    write_segments_csv(&cfg.output_dir.join("segments_t1.csv"), &s1)?;
    Ok(())
}

fn displace(cfg: &RunConfig) -> Result<(), CliError> {
    let g0 = read_geometry(&cfg.geometry_t)?;
    let g1 = read_geometry(&cfg.geometry_t1)?;
    let s0 = segment_at_intersections(&g0, INTERSECTION_TOL)?;
    let s1 = segment_at_intersections(&g1, INTERSECTION_TOL)?;
    s0.check_correspondence(&s1)?;
    let (from, to) = match cfg.mode {
        Mode::Model2 => (s0.segments, s1.segments),
        Mode::Model1 => (s0.whole_curve_segments(), s1.whole_curve_segments()),
    };
    let mut fields = Vec::with_capacity(from.len());
    for f in &from {
        let t = to
            .iter()
            .find(|t| t.segment_ref() == f.segment_ref())
            .ok_or_else(|| {
                GeometryError::TopologyMismatch(format!(
                    "no stage-(t+1) segment {}",
                    f.segment_ref()
                ))
            })?;
        fields.push(uniform_displacement_field(
            f,
            t,
            cfg.stage.points_per_segment,
            cfg.stage.keying,
        )?);
    }
    create_dir(&cfg.output_dir)?;
    write_displacement_csv(&cfg.output_dir.join("displacement.csv"), &fields)?;
    Ok(())
}

fn mesh_report(cfg: &RunConfig) -> Result<(), CliError> {
    let g0 = read_geometry(&cfg.geometry_t)?;
    let s0 = segment_at_intersections(&g0, INTERSECTION_TOL)?;
    let h = cfg
        .stage
        .target_edge_length
        .unwrap_or_else(|| default_edge_length(&s0));
    let mesh = triangulate(&s0, h)?;
    let q = quality_report(&mesh);
    let record = StepRecord {
        step: 0,
        time: 0.0,
        areas: mesh.labeled_areas(),
        total_area: mesh.total_area(),
        min_quality: q.min_quality,
        inverted_count: q.inverted_count,
        min_quality_near_junctions: f64::NAN,
        max_principle_violation: 0.0,
        picard_iterations: 0,
        min_concentration: 0.0,
        total_mass: [0.0; 3],
    };
    create_dir(&cfg.output_dir)?;
    write_quality_csv(
        &cfg.output_dir.join("quality.csv"),
        std::slice::from_ref(&record),
    )?;
    if cfg.vtk {
        let state = SolverState::uniform(mesh.node_count(), [0.0; 3]);
        let production = vec![[0.0; 3]; mesh.node_count()];
        write_vtk(&cfg.output_dir.join("mesh.vtk"), &mesh, &state, &production)?;
    }
    Ok(())
}

fn fixture(args: &FixtureArgs) -> Result<(), CliError> {
    let (g0, g1) = generate_fixture(args.scale)?;
    create_dir(&args.out)?;
    write_geometry(&args.out.join("geometry_t.csv"), &g0)?;
    write_geometry(&args.out.join("geometry_t1.csv"), &g1)?;
    let text = default_config_text(
        "geometry_t.csv",
        "geometry_t1.csv",
        args.mode.unwrap_or_default(),
    );
    let path = args.out.join("config.toml");
    std::fs::write(&path, text).map_err(|source| IoError::Io { path, source })?;
    Ok(())
}

pub fn execute(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Simulate(a) => simulate(&resolved(a)?),
        Command::Segment(a) => segment(&resolved(a)?),
        Command::Displace(a) => displace(&resolved(a)?),
        Command::MeshReport(a) => mesh_report(&resolved(a)?),
        Command::Fixture(a) => fixture(a),
    }
}

/// Parse `argv` and run. Returns the process exit code: 0 on success, 2 on
/// a usage error, 1 on a runtime failure.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("growfem: {e}");
            1
        }
    }
}
