//! Finite-element simulation of a three-species reaction-diffusion network
//! on a growing 2D domain split into subdomains by intersecting curves.
//!
//! The pipeline runs per growth stage: curves are split at their
//! intersections ([`geometry`]), each piece gets a displacement field
//! ([`displacement`]), a conforming mesh is built and moved ([`mesh`]), and
//! the concentrations are integrated on the moving mesh ([`solver`]).

pub mod cli;
pub mod config;
pub mod displacement;
pub mod fem;
pub mod fixture;
pub mod geometry;
pub mod io;
pub mod kinetics;
pub mod linalg;
pub mod mesh;
pub mod solver;

use thiserror::Error;

/// Any failure of the library, for callers that do not care which stage
/// produced it.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Geometry(#[from] geometry::GeometryError),
    #[error(transparent)]
    Displacement(#[from] displacement::DisplacementError),
    #[error(transparent)]
    Mesh(#[from] mesh::MeshError),
    #[error(transparent)]
    Kinetics(#[from] kinetics::KineticsError),
    #[error(transparent)]
    Solver(#[from] solver::SolverError),
    #[error(transparent)]
    Fixture(#[from] fixture::FixtureError),
    #[error(transparent)]
    Io(#[from] io::IoError),
}
