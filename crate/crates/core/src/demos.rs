//! Bundled scenarios. Units are abstract except for `grid9`, which uses millimetres.

use std::f64::consts::{FRAC_PI_4, PI};

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::collision::AvoidanceConfig;
use crate::control::ControllerConfig;
use crate::formation::{regular_polygon, square_grid, SensingGraph, Vec2};
use crate::gains::{HigherOrderVariant, SolverOptions};
use crate::sim::{
    ActuatorSpec, AgentsConfig, InitialPositions, InitialState, ModelKind, NamedGraph, Scenario, Schedule, SimConfig,
};

pub const DEMO_NAMES: [&str; 6] = ["triangle", "hexagon", "grid9", "unicycle9", "car9", "switching9"];

/// Trace budget for the square-grid switching topologies. It keeps every nonzero
/// eigenvalue inside the region where the chain gains `[2, 2, 3, 3]` are stabilizing.
pub const GRID_SWITCHING_TRACE: f64 = -4.0;

/// Six agents on an equilateral triangle: three corners, then the three edge midpoints.
pub fn triangle_points() -> Vec<Vec2> {
    let corners = regular_polygon(3, 1.0)
        .into_iter()
        .map(|p| Vec2::new(-p.y, p.x))
        .collect::<Vec<_>>();
    let mid = |a: Vec2, b: Vec2| (a + b) * 0.5;
    vec![
        corners[0],
        corners[1],
        corners[2],
        mid(corners[0], corners[1]),
        mid(corners[1], corners[2]),
        mid(corners[2], corners[0]),
    ]
}

/// Each corner sees the two adjacent midpoints; the midpoints see each other.
pub fn triangle_topology() -> SensingGraph {
    SensingGraph::new(6, [(0, 3), (0, 5), (1, 3), (1, 4), (2, 4), (2, 5), (3, 4), (4, 5), (3, 5)])
        .expect("static topology")
}

fn grid_edges() -> Vec<(usize, usize)> {
    vec![(0, 1), (1, 2), (3, 4), (4, 5), (6, 7), (7, 8), (0, 3), (3, 6), (1, 4), (4, 7), (2, 5), (5, 8)]
}

/// Four sensing topologies over a 3×3 grid (agents row-major from the top left). Each
/// adds four cross links to the grid edges. Agent 0 sees exactly agents 1 and 3 in the
/// first and third topology, so its gains are tied across them.
pub fn switching_topologies() -> Vec<NamedGraph> {
    let extra: [[(usize, usize); 4]; 4] = [
        [(1, 3), (5, 7), (2, 4), (4, 6)],
        [(0, 4), (4, 8), (2, 4), (4, 6)],
        [(1, 5), (3, 7), (1, 3), (5, 7)],
        [(0, 8), (2, 6), (1, 7), (3, 5)],
    ];
    extra
        .iter()
        .enumerate()
        .map(|(k, e)| {
            let mut edges = grid_edges();
            edges.extend(e.iter().copied());
            NamedGraph { name: format!("G{}", k + 1), graph: SensingGraph::new(9, edges).expect("static topology") }
        })
        .collect()
}

/// Fixed switching signal over the four grid topologies, dwell times between 2 and 8 s.
pub fn switching_schedule() -> Schedule {
    let entries = vec![
        (0.0, 0),
        (6.0, 2),
        (10.0, 1),
        (17.0, 3),
        (21.0, 0),
        (28.0, 2),
        (31.0, 3),
        (38.0, 1),
        (44.0, 0),
        (47.0, 3),
        (55.0, 2),
        (61.0, 1),
        (66.0, 3),
        (72.0, 0),
        (76.0, 2),
    ];
    Schedule::new(entries, 4).expect("static schedule")
}

fn base(name: &str, points: Vec<Vec2>, topologies: Vec<NamedGraph>, model: ModelKind, sim: SimConfig) -> Scenario {
    Scenario {
        name: name.into(),
        points,
        center: true,
        topologies,
        schedule: Schedule::constant(0),
        agents: AgentsConfig::new(model),
        controller: ControllerConfig::default(),
        avoidance: None,
        solver: SolverOptions::default(),
        sim,
    }
}

fn boxed(low: f64, high: f64) -> InitialState {
    InitialState {
        positions: InitialPositions::UniformBox { low, high },
        headings: None,
        steering: None,
        min_separation: None,
    }
}

fn single(name: &str, g: SensingGraph) -> NamedGraph {
    NamedGraph { name: name.into(), graph: g }
}

pub fn triangle() -> Scenario {
    let mut s = base(
        "triangle",
        triangle_points(),
        vec![single("fixed", triangle_topology())],
        ModelKind::SingleIntegrator,
        SimConfig::new(60.0, boxed(-5.0, 5.0)),
    );
    s.avoidance = Some(AvoidanceConfig { r: 0.05, d_c: 0.15 });
    s
}

pub fn hexagon() -> Scenario {
    let mut s = base(
        "hexagon",
        regular_polygon(6, 1.0),
        vec![single("cycle", SensingGraph::cycle(6))],
        ModelKind::SingleIntegrator,
        SimConfig::new(60.0, boxed(-5.0, 5.0)),
    );
    s.avoidance = Some(AvoidanceConfig { r: 0.05, d_c: 0.15 });
    s
}

/// Lab-scale run in millimetres: 200 mm collision radius, 400 mm activation distance.
pub fn grid9() -> Scenario {
    let mut s = base(
        "grid9",
        square_grid(3, 600.0),
        vec![single("complete", SensingGraph::complete(9))],
        ModelKind::SingleIntegrator,
        SimConfig::new(60.0, boxed(-10000.0, 10000.0)),
    );
    s.avoidance = Some(AvoidanceConfig { r: 200.0, d_c: 400.0 });
    s.sim.convergence_threshold = 1e-3;
    s
}

fn grid_switching(name: &str, model: ModelKind, t_final: f64) -> Scenario {
    let start = InitialState {
        positions: InitialPositions::Explicit(switching9_start()),
        headings: None,
        steering: None,
        min_separation: None,
    };
    let mut s = base(name, square_grid(3, 1.0), switching_topologies(), model, SimConfig::new(t_final, start));
    s.schedule = switching_schedule();
    s.solver.trace_budget = Some(GRID_SWITCHING_TRACE);
    s.avoidance = Some(AvoidanceConfig { r: 4.0, d_c: 8.0 });
    s
}

/// Spread-out start shared by the grid-switching demos. Random boxes of comparable size
/// occasionally project onto a grid tighter than the collision radius, which cannot be reached.
pub fn switching9_start() -> Vec<Vec2> {
    [
        (-19.4, -4.0),
        (-44.8, 64.3),
        (21.9, 43.0),
        (-105.6, -94.3),
        (117.2, -71.8),
        (-40.7, 88.8),
        (94.5, -106.3),
        (-29.1, -79.3),
        (64.5, -85.8),
    ]
    .map(|(x, y)| Vec2::new(x, y))
    .to_vec()
}

/// Nine third-order chains (linearized quadrotors) under the switching topologies, starting
/// at rest. The position term is capped at 6 so that braking
/// distances stay inside the activation band.
pub fn switching9() -> Scenario {
    let mut s = grid_switching("switching9", ModelKind::Chain, 150.0);
    s.controller.u_max = Some(6.0);
    s.controller.k_chain = vec![2.0, 2.0, 3.0, 3.0];
    s.controller.chain_variant = HigherOrderVariant::IdentityDerivatives;
    s
}

/// Nine unicycles with actuator dynamics, `a, b, c, d` drawn from `[5, 10]`.
pub fn unicycle9() -> Scenario {
    let mut s = grid_switching("unicycle9", ModelKind::Unicycle, 80.0);
    s.agents.dynamic = true;
    s.agents.actuators = Some(ActuatorSpec::Uniform { low: 5.0, high: 10.0 });
    s.controller.v_max = Some(3.0);
    s.controller.omega_max = Some(PI / 4.0);
    s.sim.convergence_threshold = 1e-2;
    s
}

/// Nine front-wheel-drive cars with actuator dynamics and steering confined to `±π/4`.
pub fn car9() -> Scenario {
    let mut s = grid_switching("car9", ModelKind::Car, 80.0);
    s.agents.dynamic = true;
    s.agents.wheelbase = 2.0;
    s.agents.actuators = Some(ActuatorSpec::Uniform { low: 5.0, high: 10.0 });
    s.controller.v_max = Some(3.0);
    s.controller.omega_max = Some(PI / 4.0);
    s.controller.phi_max = Some(FRAC_PI_4);
    s.sim.convergence_threshold = 1e-2;
    s
}

/// Random trilateration instance: points uniform in the unit square, agents 0..3 form a
/// triangle and every later agent senses three earlier ones. Such graphs are universally
/// rigid for points in general position.
pub fn random_trilateration(n: usize, seed: u64) -> (Vec<Vec2>, SensingGraph) {
    assert!(n >= 3, "trilateration needs at least three agents");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<Vec2> = (0..n).map(|_| Vec2::new(rng.random(), rng.random())).collect();
    let mut edges = vec![(0, 1), (0, 2), (1, 2)];
    for i in 3..n {
        edges.extend(sample(&mut rng, i, 3).into_iter().map(|j| (j, i)));
    }
    (points, SensingGraph::new(n, edges).expect("trilateration graph"))
}

pub fn demo(name: &str) -> Option<Scenario> {
    match name {
        "triangle" => Some(triangle()),
        "hexagon" => Some(hexagon()),
        "grid9" => Some(grid9()),
        "unicycle9" => Some(unicycle9()),
        "car9" => Some(car9()),
        "switching9" => Some(switching9()),
        _ => None,
    }
}
