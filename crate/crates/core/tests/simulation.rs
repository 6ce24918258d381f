use formation_core::control::IntegralGains;
use formation_core::demos;
use formation_core::gains::{solve_gains, GainMatrix};
use formation_core::sim::{run, InitialPositions, ModelKind, Scenario, Schedule, SimError, TrajectoryLog};
use formation_core::{build_kernel_basis, SensingGraph, Vec2};
use nalgebra::DVector;

fn gains_for(sc: &Scenario) -> Vec<GainMatrix> {
    solve_gains(&sc.graphs(), &sc.formation().unwrap(), &sc.solver).unwrap().gains
}

fn max_position_gap(a: &TrajectoryLog, b: &TrajectoryLog) -> f64 {
    assert_eq!(a.records.len(), b.records.len());
    (0..a.records.len())
        .flat_map(|k| a.positions(k).into_iter().zip(b.positions(k)).map(|(p, q)| (p - q).norm()))
        .fold(0.0, f64::max)
}

/// `s R(θ) q* + t` for the scenario's centered formation.
fn similar_copy(sc: &Scenario, s: f64, theta: f64, t: Vec2) -> Vec<Vec2> {
    let (c, si) = (theta.cos(), theta.sin());
    sc.formation()
        .unwrap()
        .points()
        .iter()
        .map(|p| Vec2::new(s * (c * p.x - si * p.y), s * (si * p.x + c * p.y)) + t)
        .collect()
}

#[test]
fn repeated_runs_are_bitwise_identical() {
    for mut sc in [demos::hexagon(), demos::unicycle9()] {
        sc.sim.t_final = 10.0;
        let gains = gains_for(&sc);
        let a = run(&sc, &gains).unwrap();
        let b = run(&sc, &gains).unwrap();
        assert!(a.records == b.records, "{}", sc.name);
    }
}

#[test]
fn local_frames_match_the_global_computation() {
    let mut hex = demos::hexagon();
    hex.avoidance = None;
    let mut uni = demos::unicycle9();
    uni.avoidance = None;
    uni.sim.t_final = 20.0;
    for sc in [hex, uni] {
        let gains = gains_for(&sc);
        let local = run(&sc, &gains).unwrap();
        let mut global = sc.clone();
        global.sim.local_frames = false;
        let global = run(&global, &gains).unwrap();
        let gap = max_position_gap(&local, &global);
        assert!(gap <= 1e-9, "{}: {gap:e}", sc.name);
    }
}

#[test]
fn equilibrium_start_does_not_move() {
    let mut sc = demos::hexagon();
    let start = similar_copy(&sc, 3.0, 20f64.to_radians(), Vec2::new(7.0, 7.0));
    sc.sim.initial.positions = InitialPositions::Explicit(start.clone());
    sc.sim.t_final = 5.0;
    let log = run(&sc, &gains_for(&sc)).unwrap();
    let drift = log.final_positions().iter().zip(&start).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
    assert!(drift < 1e-12, "{drift:e}");
    assert_eq!(log.summary.converged_at, Some(0.0));
}

#[test]
fn uniform_disturbance_translates_the_formation() {
    // Translations stay in the kernel, so the field is the constant disturbance.
    let mut sc = demos::hexagon();
    sc.avoidance = None;
    let start = similar_copy(&sc, 2.0, 0.0, Vec2::zeros());
    sc.sim.initial.positions = InitialPositions::Explicit(start.clone());
    sc.agents.disturbance = Some(vec![Vec2::new(1.0, 0.0); 6]);
    sc.sim.dt = 0.1;
    sc.sim.t_final = 0.2;
    let log = run(&sc, &gains_for(&sc)).unwrap();
    assert_eq!(log.records.len(), 3);
    for (p, q) in log.positions(1).iter().zip(&start) {
        assert!((p - q - Vec2::new(0.1, 0.0)).norm() < 1e-12);
    }
}

#[test]
fn records_follow_the_schedule() {
    let mut sc = demos::switching9();
    sc.agents.model = ModelKind::SingleIntegrator;
    sc.controller = Default::default();
    sc.avoidance = None;
    sc.schedule = Schedule::new(vec![(0.0, 0), (1.0, 2), (2.5, 1)], 4).unwrap();
    sc.sim.t_final = 3.0;
    let log = run(&sc, &gains_for(&sc)).unwrap();
    for r in &log.records {
        let expected = if r.t < 1.0 - 1e-9 { 0 } else if r.t < 2.5 - 1e-9 { 2 } else { 1 };
        assert_eq!(r.topology, expected, "t = {}", r.t);
    }
}

#[test]
fn wrong_gain_count_is_refused() {
    let sc = demos::switching9();
    let gains = gains_for(&sc);
    assert!(matches!(run(&sc, &gains[..2]), Err(SimError::GainCount { expected: 4, got: 2 })));
}

#[test]
fn gains_for_another_graph_are_refused() {
    let sc = demos::hexagon();
    let mut other = sc.clone();
    other.topologies[0].graph = SensingGraph::complete(6);
    assert!(run(&sc, &gains_for(&other)).is_err());
}

#[test]
fn logs_are_reproducible_from_their_seed() {
    let mut sc = demos::hexagon();
    sc.sim.t_final = 1.0;
    let gains = gains_for(&sc);
    let a = run(&sc, &gains).unwrap();
    sc.sim.seed = a.seed + 1;
    let b = run(&sc, &gains).unwrap();
    assert_ne!(a.positions(0), b.positions(0));
    // Replaying the logged start draws different local frames, which only affects rounding.
    sc.sim.initial.positions = InitialPositions::Explicit(formation_core::sim::initial_positions(&a));
    let replay = run(&sc, &gains).unwrap();
    assert!(max_position_gap(&a, &replay) <= 1e-9);
}

#[test]
fn integral_action_cancels_a_constant_disturbance() {
    let mut sc = demos::hexagon();
    sc.avoidance = None;
    // Keep only the part the formation cannot absorb by drifting along its own shape.
    let n_hat = build_kernel_basis(&sc.formation().unwrap()).unwrap().n_hat().clone();
    let raw = DVector::from_iterator(12, (0..12).map(|k| ((k * 7 % 5) as f64 - 2.0) * 0.3));
    let d = &raw - &n_hat * (n_hat.transpose() * &raw);
    sc.agents.disturbance = Some((0..6).map(|i| Vec2::new(d[2 * i], d[2 * i + 1])).collect());
    let gains = gains_for(&sc);

    let plain = run(&sc, &gains).unwrap();
    assert!(plain.summary.final_subspace_error > 1e-2);

    sc.controller.integral = Some(IntegralGains { k0: 1.0, k1: 1.0 });
    let log = run(&sc, &gains).unwrap();
    assert!(log.summary.final_subspace_error < 1e-3, "{}", log.summary.final_subspace_error);
    let u = &log.records.last().unwrap().commands;
    let worst = (0..12).map(|k| (u[k] + d[k]).abs()).fold(0.0, f64::max);
    assert!(worst < 1e-3, "{worst:e}");
}
