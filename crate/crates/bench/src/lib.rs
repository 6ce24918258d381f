//! Shared fixtures for the benchmarks.

use formation_core::demos;
use formation_core::gains::{solve_gains, GainMatrix};
use formation_core::sim::Scenario;
use formation_core::{FormationSpec, SensingGraph};

/// A designed scenario ready to simulate.
pub struct Prepared {
    pub scenario: Scenario,
    pub gains: Vec<GainMatrix>,
}

pub fn prepare(mut scenario: Scenario, t_final: f64) -> Prepared {
    scenario.sim.t_final = t_final;
    let spec = scenario.formation().expect("demo formation");
    let gains = solve_gains(&scenario.graphs(), &spec, &scenario.solver).expect("demo design").gains;
    Prepared { scenario, gains }
}

/// Random trilateration instance of `n` agents.
pub fn trilateration(n: usize, seed: u64) -> (FormationSpec, SensingGraph) {
    let (points, graph) = demos::random_trilateration(n, seed);
    (FormationSpec::from_points(&points, true).expect("distinct points"), graph)
}
