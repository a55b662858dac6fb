use std::fmt;
use std::str::FromStr;

use super::{assemble, production_load, step, Result, SolverConfig, SolverError, SolverState};
use crate::displacement::{
    uniform_displacement_field, DisplacementField, Keying, DEFAULT_POINTS_PER_SEGMENT,
};
use crate::fem::element_measure;
use crate::geometry::{
    polygon_area, segment_at_intersections, CurveSegment, Point2, SegmentedGeometry,
    StagedGeometry, INTERSECTION_TOL,
};
use crate::kinetics::{NetworkSpec, ResolvedNetwork};
use crate::mesh::{default_edge_length, prepare_motion, quality_report, triangulate, Mesh};

/// How boundary displacement is built for a stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    /// One field per whole curve, junctions ignored.
    Model1,
    /// One field per segment between junctions.
    #[default]
    Model2,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Model1 => "model1",
            Mode::Model2 => "model2",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "model1" => Ok(Mode::Model1),
            "model2" => Ok(Mode::Model2),
            other => Err(format!(
                "unknown mode `{other}` (expected model1 or model2)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageConfig {
    pub solver: SolverConfig,
    pub points_per_segment: usize,
    /// `None` uses [`default_edge_length`].
    pub target_edge_length: Option<f64>,
    pub keying: Keying,
}

impl Default for StageConfig {
    fn default() -> Self {
        Self {
            solver: SolverConfig::default(),
            points_per_segment: DEFAULT_POINTS_PER_SEGMENT,
            target_edge_length: None,
            keying: Keying::Parameter,
        }
    }
}

/// Diagnostics recorded after each step (step 0 is the initial state).
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub step: usize,
    pub time: f64,
    /// Absolute area per subdomain label.
    pub areas: Vec<f64>,
    pub total_area: f64,
    pub min_quality: f64,
    pub inverted_count: usize,
    /// Smallest quality among elements touching a node within graph
    /// distance 2 of a junction node.
    pub min_quality_near_junctions: f64,
    pub max_principle_violation: f64,
    pub picard_iterations: usize,
    pub min_concentration: f64,
    pub total_mass: [f64; 3],
}

/// What an observer sees after each step.
pub struct StepView<'a> {
    pub record: &'a StepRecord,
    pub mesh: &'a Mesh,
    pub state: &'a SolverState,
    pub network: &'a ResolvedNetwork,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StageResult {
    pub mode: Mode,
    pub records: Vec<StepRecord>,
    /// Mesh at creation (stage t) and after the full deformation.
    pub initial_mesh: Mesh,
    pub final_mesh: Mesh,
    pub final_state: SolverState,
    pub network: ResolvedNetwork,
    /// Distance from each moved stage-t junction to its stage-(t+1)
    /// position.
    pub junction_errors: Vec<f64>,
    /// Shoelace areas of the stage-(t+1) subdomain loops.
    pub target_areas: Vec<f64>,
    /// `∫ P_s dΩ` on the final mesh.
    pub integrated_production: [f64; 3],
    pub max_principle_violation: f64,
}

impl StageResult {
    /// Largest relative deviation of the final subdomain areas from the
    /// stage-(t+1) loops.
    pub fn max_area_error(&self) -> f64 {
        let last = self.records.last().expect("at least the initial record");
        last.areas
            .iter()
            .zip(&self.target_areas)
            .map(|(a, t)| (a - t).abs() / t)
            .fold(0.0, f64::max)
    }

    pub fn max_junction_error(&self) -> f64 {
        self.junction_errors.iter().copied().fold(0.0, f64::max)
    }

    pub fn any_inverted(&self) -> bool {
        self.records.iter().any(|r| r.inverted_count > 0)
    }
}

/// Production of every species at each element's nodes, averaged over the
/// element, with the element's label selecting the active terms.
pub fn element_production(
    mesh: &Mesh,
    network: &ResolvedNetwork,
    state: &SolverState,
) -> Vec<[f64; 3]> {
    let c = &state.concentrations;
    mesh.triangles
        .iter()
        .zip(&mesh.element_labels)
        .map(|(t, &label)| {
            let mut sum = [0.0; 3];
            for &i in t {
                let p = network.production_at(label, c[0][i], c[1][i], c[2][i]);
                for s in 0..3 {
                    sum[s] += p[s];
                }
            }
            sum.map(|v| v / 3.0)
        })
        .collect()
}

/// Nodal production: the area-weighted mean over incident elements of the
/// production evaluated with each element's label.
pub fn nodal_production(
    mesh: &Mesh,
    network: &ResolvedNetwork,
    state: &SolverState,
) -> Vec<[f64; 3]> {
    let n = mesh.node_count();
    let c = &state.concentrations;
    let mut acc = vec![[0.0; 3]; n];
    let mut weight = vec![0.0; n];
    for (e, (t, &label)) in mesh.triangles.iter().zip(&mesh.element_labels).enumerate() {
        let w = element_measure(mesh.corners(e));
        for &i in t {
            let p = network.production_at(label, c[0][i], c[1][i], c[2][i]);
            for s in 0..3 {
                acc[i][s] += w * p[s];
            }
            weight[i] += w;
        }
    }
    acc.iter()
        .zip(&weight)
        .map(|(p, &w)| if w > 0.0 { p.map(|v| v / w) } else { [0.0; 3] })
        .collect()
}

/// `∫ P_s dΩ` for each species, integrating the label-gated production
/// with the consistent mass matrix.
pub fn integrated_production(
    mesh: &Mesh,
    network: &ResolvedNetwork,
    state: &SolverState,
) -> [f64; 3] {
    production_load(mesh, network, &state.concentrations).map(|v| v.iter().sum())
}

/// Minimum quality over elements that touch a node within `radius` hops of
/// a seed node, or `None` if no element qualifies.
pub fn element_quality_near(mesh: &Mesh, seeds: &[usize], radius: usize) -> Option<f64> {
    let near = near_mask(mesh, seeds, radius);
    let report = quality_report(mesh);
    mesh.triangles
        .iter()
        .zip(&report.per_element_quality)
        .filter(|(t, _)| t.iter().any(|&i| near[i]))
        .map(|(_, &q)| q)
        .reduce(f64::min)
}

fn near_mask(mesh: &Mesh, seeds: &[usize], radius: usize) -> Vec<bool> {
    mesh.graph_distance_from(seeds)
        .iter()
        .map(|d| d.is_some_and(|d| d <= radius))
        .collect()
}

fn build_fields(
    from: &[CurveSegment],
    to: &[CurveSegment],
    n: usize,
    keying: Keying,
) -> Result<Vec<DisplacementField>> {
    from.iter()
        .map(|f| {
            let t = to
                .iter()
                .find(|t| t.segment_ref() == f.segment_ref())
                .ok_or_else(|| {
                    crate::geometry::GeometryError::TopologyMismatch(format!(
                        "segment {} has no stage-(t+1) counterpart",
                        f.segment_ref()
                    ))
                })?;
            Ok(uniform_displacement_field(f, t, n, keying)?)
        })
        .collect()
}

fn junction_pairs(seg_t: &SegmentedGeometry, seg_t1: &SegmentedGeometry) -> Vec<(Point2, Point2)> {
    let mut pairs: Vec<(Point2, Point2)> = Vec::new();
    for s in &seg_t.segments {
        let Some(o) = seg_t1.segment_by_ref(&s.segment_ref()) else {
            continue;
        };
        let mut push = |p: Point2, q: Point2| {
            if !pairs.iter().any(|(a, _)| a.distance(p) <= INTERSECTION_TOL) {
                pairs.push((p, q));
            }
        };
        if s.start_is_junction {
            push(s.start(), o.start());
        }
        if s.end_is_junction {
            push(s.end(), o.end());
        }
    }
    pairs
}

#[allow(clippy::too_many_arguments)]
fn record(
    step: usize,
    time: f64,
    mesh: &Mesh,
    state: &SolverState,
    mass: &super::SystemMatrices,
    near: &[bool],
    violation: f64,
    picard_iterations: usize,
) -> StepRecord {
    let q = quality_report(mesh);
    let near_q = mesh
        .triangles
        .iter()
        .zip(&q.per_element_quality)
        .filter(|(t, _)| t.iter().any(|&i| near[i]))
        .map(|(_, &v)| v)
        .fold(f64::INFINITY, f64::min);
    StepRecord {
        step,
        time,
        areas: mesh.labeled_areas(),
        total_area: mesh.total_area(),
        min_quality: q.min_quality,
        inverted_count: q.inverted_count,
        min_quality_near_junctions: near_q,
        max_principle_violation: violation,
        picard_iterations,
        min_concentration: state.min_value(),
        total_mass: std::array::from_fn(|s| mass.total_mass(&state.concentrations[s])),
    }
}

/// Segment, displace, triangulate and integrate one growth stage.
pub fn run_stage(
    geometry_t: &StagedGeometry,
    geometry_t1: &StagedGeometry,
    network: &NetworkSpec,
    config: &StageConfig,
    mode: Mode,
    observer: &mut dyn FnMut(&StepView<'_>),
) -> Result<StageResult> {
    config.solver.validate()?;
    if config.points_per_segment < 2 {
        return Err(SolverError::Config(
            "points_per_segment must be at least 2".into(),
        ));
    }
    let seg_t = segment_at_intersections(geometry_t, INTERSECTION_TOL)?;
    let seg_t1 = segment_at_intersections(geometry_t1, INTERSECTION_TOL)?;
    seg_t.check_correspondence(&seg_t1)?;

    let h = config
        .target_edge_length
        .unwrap_or_else(|| default_edge_length(&seg_t));
    let mut mesh = triangulate(&seg_t, h)?;
    let (tracks_t, tracks_t1) = match mode {
        Mode::Model2 => (seg_t.segments.clone(), seg_t1.segments.clone()),
        Mode::Model1 => {
            let whole = seg_t.whole_curve_segments();
            mesh = mesh.retag(&whole, INTERSECTION_TOL);
            (whole, seg_t1.whole_curve_segments())
        }
    };
    let fields = build_fields(
        &tracks_t,
        &tracks_t1,
        config.points_per_segment,
        config.keying,
    )?;
    let motion = prepare_motion(&mesh, &fields)?;
    let violation = motion.max_principle_violation;

    let resolved = network.resolve(&mesh.subdomain_ids)?;
    let near = near_mask(&mesh, &mesh.junction_nodes, 2);
    let strict = config.solver.strict_mesh;
    let n_steps = config.solver.step_count();
    let dt = config.solver.t_end / n_steps as f64;

    let initial_mesh = mesh.clone();
    let mut state = SolverState::initial(&mesh, &resolved);
    let mut matrices = assemble(&mesh, strict)?;
    let mut records = Vec::with_capacity(n_steps + 1);
    records.push(record(
        0, 0.0, &mesh, &state, &matrices, &near, violation, 0,
    ));
    observer(&StepView {
        record: &records[0],
        mesh: &mesh,
        state: &state,
        network: &resolved,
    });

    for k in 1..=n_steps {
        let fraction = k as f64 / n_steps as f64;
        let next_mesh = motion.apply(&initial_mesh, fraction)?;
        let next = assemble(&next_mesh, strict)?;
        let (new_state, report) = step(
            &state,
            &matrices,
            &next,
            &next_mesh,
            &resolved,
            dt,
            &config.solver,
        )?;
        state = SolverState {
            time: fraction * config.solver.t_end,
            ..new_state
        };
        mesh = next_mesh;
        matrices = next;
        records.push(record(
            k,
            state.time,
            &mesh,
            &state,
            &matrices,
            &near,
            violation,
            report.picard_iterations,
        ));
        observer(&StepView {
            record: &records[k],
            mesh: &mesh,
            state: &state,
            network: &resolved,
        });
    }

    let junction_errors = junction_pairs(&seg_t, &seg_t1)
        .iter()
        .map(|(p, target)| {
            let node = initial_mesh
                .reference
                .iter()
                .position(|q| q.distance(*p) <= INTERSECTION_TOL)
                .expect("junctions are mesh nodes");
            mesh.nodes[node].distance(*target)
        })
        .collect();
    let target_areas = seg_t1
        .loop_polygons()?
        .iter()
        .map(|l| polygon_area(l))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let integrated = integrated_production(&mesh, &resolved, &state);

    Ok(StageResult {
        mode,
        records,
        initial_mesh,
        final_mesh: mesh,
        final_state: state,
        network: resolved,
        junction_errors,
        target_areas,
        integrated_production: integrated,
        max_principle_violation: violation,
    })
}
