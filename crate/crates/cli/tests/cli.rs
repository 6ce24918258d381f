use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use formation_core::demos;
use formation_core::gains::GainsDocument;
use formation_core::sim::{InitialPositions, Scenario};
use formation_core::{save_scenario, SensingGraph, Vec2};

fn formation(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_formation")).args(args).current_dir(cwd).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, sc: &Scenario) -> PathBuf {
    let p = dir.join(name);
    save_scenario(sc, &p).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn designed(dir: &Path, sc: &Scenario, stem: &str) -> (PathBuf, PathBuf) {
    let scen = write(dir, &format!("{stem}.toml"), sc);
    let gains = dir.join(format!("{stem}.gains.json"));
    let o = formation(&["--quiet", "design", s(&scen), "-o", s(&gains)], dir);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    (scen, gains)
}

#[test]
fn design_hexagon_writes_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    let (_, gains) = designed(dir.path(), &demos::hexagon(), "hex");
    let doc = GainsDocument::load(&gains).unwrap();
    let spec = doc.topologies[0].spectrum.as_ref().unwrap();
    assert_eq!(spec.zero_count, 4);
    assert!(spec.pass);
}

#[test]
fn design_path_graph_is_infeasible() {
    let dir = tempfile::tempdir().unwrap();
    let mut sc = demos::hexagon();
    sc.topologies[0].name = "chain-of-six".into();
    sc.topologies[0].graph = SensingGraph::path(6);
    let scen = write(dir.path(), "path.toml", &sc);
    let o = formation(&["design", s(&scen), "-o", "g.json"], dir.path());
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("chain-of-six"), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    assert!(!dir.path().join("g.json").exists());
}

#[test]
fn malformed_document_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.toml"), "version = 1\nname = [").unwrap();
    let o = formation(&["design", "bad.toml", "-o", "g.json"], dir.path());
    assert_eq!(code(&o), 1);
    std::fs::write(dir.path().join("unknown.toml"), "version = 1\nname = \"x\"\nsurprise = 3\n").unwrap();
    assert_eq!(code(&formation(&["design", "unknown.toml", "-o", "g.json"], dir.path())), 1);
    assert_eq!(code(&formation(&["design", "missing.toml", "-o", "g.json"], dir.path())), 1);
}

#[test]
fn simulate_hexagon_writes_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let (scen, gains) = designed(dir.path(), &demos::hexagon(), "hex");
    let o = formation(&["simulate", s(&scen), s(&gains), "-o", "log.csv", "--svg", "plot.svg"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(String::from_utf8_lossy(&o.stdout).contains("converged"));
    let csv = std::fs::read_to_string(dir.path().join("log.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("# seed=42"));
    assert!(lines.next().unwrap().starts_with("t,x_1,y_1,x_2,y_2,"));
    assert_eq!(csv.lines().count(), 2 + 6001);
    let svg = std::fs::read_to_string(dir.path().join("plot.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.matches("<polyline").count() == 6);
}

#[test]
fn seed_override_is_logged_and_changes_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let (scen, gains) = designed(dir.path(), &demos::hexagon(), "hex");
    let o = formation(&["--quiet", "--seed", "7", "--t-final", "2", "simulate", s(&scen), s(&gains), "-o", "a.csv"], dir.path());
    assert_eq!(code(&o), 3);
    assert!(o.stdout.is_empty());
    let a = std::fs::read_to_string(dir.path().join("a.csv")).unwrap();
    assert!(a.starts_with("# seed=7\n"));
    assert_eq!(a.lines().count(), 2 + 201);
    formation(&["--quiet", "--t-final", "2", "simulate", s(&scen), s(&gains), "-o", "b.csv"], dir.path());
    let b = std::fs::read_to_string(dir.path().join("b.csv")).unwrap();
    assert_ne!(a.lines().nth(2), b.lines().nth(2));
}

#[test]
fn equilibrium_start_stops_after_sustain_window() {
    let dir = tempfile::tempdir().unwrap();
    let mut sc = demos::hexagon();
    let spec = sc.formation().unwrap();
    let (c, s20) = (20f64.to_radians().cos(), 20f64.to_radians().sin());
    let start: Vec<Vec2> = spec
        .points()
        .iter()
        .map(|p| Vec2::new(3.0 * (c * p.x - s20 * p.y) + 7.0, 3.0 * (s20 * p.x + c * p.y) + 7.0))
        .collect();
    sc.sim.initial.positions = InitialPositions::Explicit(start);
    sc.sim.stop_on_convergence = true;
    let (scen, gains) = designed(dir.path(), &sc, "eq");
    let o = formation(&["--quiet", "simulate", s(&scen), s(&gains), "-o", "eq.csv"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = std::fs::read_to_string(dir.path().join("eq.csv")).unwrap().lines().count() - 2;
    // One second of sustain at dt = 0.01, plus the initial row.
    assert!((101..=102).contains(&rows), "{rows}");
}

#[test]
fn chain_demo_scenario_converges() {
    let dir = tempfile::tempdir().unwrap();
    let (scen, gains) = designed(dir.path(), &demos::switching9(), "chain");
    let o = formation(&["simulate", s(&scen), s(&gains), "-o", "chain.csv"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = formation(&["verify", s(&gains), s(&scen)], dir.path());
    assert_eq!(code(&v), 0);
    assert!(String::from_utf8_lossy(&v.stdout).contains("max root real part"));
}

#[test]
fn unstable_chain_gains_are_refused() {
    let dir = tempfile::tempdir().unwrap();
    let mut sc = demos::switching9();
    let (_, gains) = designed(dir.path(), &sc, "chain");
    sc.controller.k_chain = vec![1.0, -1.0];
    let bad = write(dir.path(), "unstable.toml", &sc);
    let o = formation(&["simulate", s(&bad), s(&gains), "-o", "x.csv"], dir.path());
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("μ ="), "{}", stderr(&o));
    assert!(!dir.path().join("x.csv").exists());
    assert_eq!(code(&formation(&["verify", s(&gains), s(&bad)], dir.path())), 2);
}

#[test]
fn corrupted_gain_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let (scen, gains) = designed(dir.path(), &demos::hexagon(), "hex");
    assert_eq!(code(&formation(&["verify", s(&gains), s(&scen)], dir.path())), 0);
    let mut doc = GainsDocument::load(&gains).unwrap();
    doc.topologies[0].edges[0].a += 0.25;
    doc.save(&gains).unwrap();
    let o = formation(&["verify", s(&gains), s(&scen)], dir.path());
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("FAIL"));
    assert_eq!(code(&formation(&["simulate", s(&scen), s(&gains), "-o", "x.csv"], dir.path())), 2);
}

#[test]
fn demo_writes_its_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = formation(&["--quiet", "demo", "triangle"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    for f in ["triangle.toml", "triangle.gains.json", "triangle.csv", "triangle.svg"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 4);
}

#[test]
fn unknown_demo_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let o = formation(&["demo", "pentagon"], dir.path());
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("hexagon"));
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}
