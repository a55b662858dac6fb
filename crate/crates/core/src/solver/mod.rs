//! Conservative moving-mesh implicit Euler for the reaction-diffusion
//! system.
//!
//! The mesh moves with the tissue, so advection and dilution are carried by
//! the time-dependent mass matrix:
//!
//! ```text
//! (Mⁿ⁺¹cⁿ⁺¹ − Mⁿcⁿ)/dt + D Kⁿ⁺¹cⁿ⁺¹ = Mⁿ⁺¹ r(cⁿ⁺¹)
//! ```
//!
//! Linear degradation is kept implicit in the matrix; production terms are
//! lagged by Picard iteration.

mod stage;

use thiserror::Error;

use crate::fem::{assemble_global, local_mass, local_stiffness};
use crate::kinetics::{KineticsError, ResolvedNetwork};
use crate::linalg::{conjugate_gradient, CsrMatrix, LinalgError};
use crate::mesh::{Mesh, MeshError};

pub use stage::{
    element_production, element_quality_near, integrated_production, nodal_production, run_stage,
    Mode, StageConfig, StageResult, StepRecord, StepView,
};

pub const SPECIES: [&str; 3] = ["A", "B", "C"];

#[derive(Debug, Error, PartialEq)]
pub enum SolverError {
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Kinetics(#[from] KineticsError),
    #[error(transparent)]
    Geometry(#[from] crate::geometry::GeometryError),
    #[error(transparent)]
    Displacement(#[from] crate::displacement::DisplacementError),
    #[error("linear solve failed for species {species}: {source}")]
    Linear {
        species: &'static str,
        source: LinalgError,
    },
    #[error("element {0} is inverted (strict mesh mode)")]
    InvertedElement(usize),
    #[error(
        "Picard iteration did not converge in {iterations} iterations (last update {residual:e})"
    )]
    PicardNotConverged { iterations: usize, residual: f64 },
    #[error("invalid solver configuration: {0}")]
    Config(String),
    #[error("state has {got} nodes but the mesh has {expected}")]
    SizeMismatch { expected: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, SolverError>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub dt: f64,
    pub t_end: f64,
    pub picard_tol: f64,
    pub picard_max_iters: usize,
    pub linear_solver_tol: f64,
    pub strict_mesh: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            dt: 0.01,
            t_end: 1.0,
            picard_tol: 1e-10,
            picard_max_iters: 50,
            linear_solver_tol: 1e-12,
            strict_mesh: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(SolverError::Config(m.to_owned()));
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return bad("dt must be positive");
        }
        if !(self.t_end.is_finite() && self.t_end >= self.dt) {
            return bad("t_end must be at least dt");
        }
        if !(self.picard_tol > 0.0 && self.linear_solver_tol > 0.0) {
            return bad("tolerances must be positive");
        }
        if self.picard_max_iters == 0 {
            return bad("picard_max_iters must be positive");
        }
        Ok(())
    }

    /// Number of steps covering `t_end`.
    pub fn step_count(&self) -> usize {
        (self.t_end / self.dt).round().max(1.0) as usize
    }
}

/// Nodal concentrations of A, B and C at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    pub concentrations: [Vec<f64>; 3],
    pub time: f64,
}

impl SolverState {
    pub fn uniform(nodes: usize, values: [f64; 3]) -> Self {
        Self {
            concentrations: values.map(|v| vec![v; nodes]),
            time: 0.0,
        }
    }

    /// A = 1 on nodes touching the initial-A subdomain, B = C = 0.
    pub fn initial(mesh: &Mesh, network: &ResolvedNetwork) -> Self {
        let n = mesh.node_count();
        let mut a = vec![0.0; n];
        for (t, &label) in mesh.triangles.iter().zip(&mesh.element_labels) {
            if network.initial_a[label] {
                for &i in t {
                    a[i] = 1.0;
                }
            }
        }
        Self {
            concentrations: [a, vec![0.0; n], vec![0.0; n]],
            time: 0.0,
        }
    }

    pub fn min_value(&self) -> f64 {
        self.concentrations
            .iter()
            .flatten()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

/// Mass and stiffness matrices on one mesh configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemMatrices {
    pub mass: CsrMatrix,
    pub stiffness: CsrMatrix,
}

impl SystemMatrices {
    /// Total mass `Σ (M c)ᵢ` of a nodal field.
    pub fn total_mass(&self, c: &[f64]) -> f64 {
        self.mass.apply(c).iter().sum()
    }
}

/// Consistent P1 mass and stiffness on the current node positions.
///
/// In strict mode an inverted element is an error.
pub fn assemble(mesh: &Mesh, strict: bool) -> Result<SystemMatrices> {
    if strict {
        if let Some(e) = (0..mesh.element_count()).find(|&e| mesh.signed_area(e) <= 0.0) {
            return Err(SolverError::InvertedElement(e));
        }
    }
    Ok(SystemMatrices {
        mass: assemble_global(&mesh.nodes, &mesh.triangles, local_mass),
        stiffness: assemble_global(&mesh.nodes, &mesh.triangles, local_stiffness),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReport {
    pub picard_iterations: usize,
    pub picard_residual: f64,
    pub min_concentration: f64,
}

/// Element-wise production load `Σₑ Mₑ P(cₑ, labelₑ)` for each species.
fn production_load(mesh: &Mesh, network: &ResolvedNetwork, state: &[Vec<f64>; 3]) -> [Vec<f64>; 3] {
    let n = mesh.node_count();
    let mut load = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    for (e, t) in mesh.triangles.iter().enumerate() {
        let label = mesh.element_labels[e];
        let m = local_mass(mesh.corners(e));
        let p: [[f64; 3]; 3] =
            t.map(|i| network.production_at(label, state[0][i], state[1][i], state[2][i]));
        for (li, &gi) in t.iter().enumerate() {
            for (lj, pj) in p.iter().enumerate() {
                for s in 0..3 {
                    load[s][gi] += m[li][lj] * pj[s];
                }
            }
        }
    }
    load
}

/// Advance one step from the mesh configuration behind `prev` to the one
/// behind `next` (`mesh_next` supplies labels for production).
pub fn step(
    state: &SolverState,
    prev: &SystemMatrices,
    next: &SystemMatrices,
    mesh_next: &Mesh,
    network: &ResolvedNetwork,
    dt: f64,
    config: &SolverConfig,
) -> Result<(SolverState, StepReport)> {
    let n = mesh_next.node_count();
    for c in &state.concentrations {
        if c.len() != n {
            return Err(SolverError::SizeMismatch {
                expected: n,
                got: c.len(),
            });
        }
    }
    let rates = &network.params.rates;
    let decay = rates.degradation();
    let systems: Vec<CsrMatrix> = (0..3)
        .map(|s| {
            next.mass.combine(
                1.0 + dt * decay[s],
                &next.stiffness,
                dt * rates.diffusion_of(s),
            )
        })
        .collect();
    let base: Vec<Vec<f64>> = state
        .concentrations
        .iter()
        .map(|c| prev.mass.apply(c))
        .collect();

    let max_iter = 10 * n + 100;
    let mut current = state.concentrations.clone();
    let mut residual = f64::INFINITY;
    let nonlinear = network.has_production();
    for it in 1..=config.picard_max_iters {
        let load = if nonlinear {
            production_load(mesh_next, network, &current)
        } else {
            [vec![0.0; n], vec![0.0; n], vec![0.0; n]]
        };
        let mut updated = current.clone();
        for s in 0..3 {
            let rhs: Vec<f64> = base[s]
                .iter()
                .zip(&load[s])
                .map(|(b, f)| b + dt * f)
                .collect();
            conjugate_gradient(
                &systems[s],
                &rhs,
                &mut updated[s],
                config.linear_solver_tol,
                max_iter,
            )
            .map_err(|source| SolverError::Linear {
                species: SPECIES[s],
                source,
            })?;
        }
        let scale = updated.iter().flatten().fold(1.0f64, |m, v| m.max(v.abs()));
        residual = updated
            .iter()
            .zip(&current)
            .flat_map(|(u, c)| u.iter().zip(c).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max)
            / scale;
        current = updated;
        if !nonlinear || residual <= config.picard_tol {
            let next_state = SolverState {
                concentrations: current,
                time: state.time + dt,
            };
            let min_concentration = next_state.min_value();
            if min_concentration < -1e-10 {
                log::warn!(
                    "negative concentration {min_concentration:e} at t = {}",
                    next_state.time
                );
            }
            return Ok((
                next_state,
                StepReport {
                    picard_iterations: it,
                    picard_residual: if nonlinear { residual } else { 0.0 },
                    min_concentration,
                },
            ));
        }
    }
    Err(SolverError::PicardNotConverged {
        iterations: config.picard_max_iters,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::local_mass;
    use crate::geometry::Point2;

    #[test]
    fn config_validation() {
        assert!(SolverConfig::default().validate().is_ok());
        let c = SolverConfig {
            dt: 0.0,
            ..SolverConfig::default()
        };
        assert!(c.validate().is_err());
        let c = SolverConfig {
            t_end: 0.001,
            ..SolverConfig::default()
        };
        assert!(c.validate().is_err());
        assert_eq!(SolverConfig::default().step_count(), 100);
    }

    #[test]
    fn single_triangle_mass() {
        let m = local_mass([
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(0.0, 1.0),
        ]);
        let sum: f64 = m.iter().flatten().sum();
        assert!((sum - 0.5).abs() < 1e-15);
    }
}
