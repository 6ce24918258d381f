//! `formation`: design gains, simulate, verify, and run bundled demos.
//!
//! Exit codes: 0 success, 1 parse/IO/usage error, 2 infeasible design or failed
//! verification, 3 simulation finished without converging.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use formation_core::demos;
use formation_core::gains::{solve_gains, Algorithm, GainsDocument, SolverOptions};
use formation_core::sim::{run, Scenario, SimError, TrajectoryLog};
use formation_core::{
    build_kernel_basis, load_scenario, save_scenario, trajectory_svg, verify_gains, verify_higher_order_gains,
    GainError, GainMatrix, ModelKind,
};

const EXIT_ERROR: u8 = 1;
const EXIT_FAILED: u8 = 2;
const EXIT_NOT_CONVERGED: u8 = 3;

#[derive(Parser)]
#[command(name = "formation", version, about = "Distributed formation control: gain design and simulation")]
struct Cli {
    /// Print nothing on success.
    #[arg(long, global = true)]
    quiet: bool,
    /// Override the scenario's random seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override the integration step.
    #[arg(long, global = true)]
    dt: Option<f64>,
    /// Override the simulated duration.
    #[arg(long = "t-final", global = true)]
    t_final: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    Admm,
    ProjectedSubgradient,
}

#[derive(clap::Args)]
struct SolverArgs {
    /// Value of trace(A); negative.
    #[arg(long, allow_hyphen_values = true)]
    trace_budget: Option<f64>,
    #[arg(long)]
    max_iterations: Option<usize>,
    #[arg(long, value_enum)]
    algorithm: Option<AlgorithmArg>,
    /// Do not tie the gains of agents whose neighborhoods repeat across topologies.
    #[arg(long)]
    no_ties: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Design gains for every topology in a scenario.
    Design {
        scenario: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Simulate a scenario with previously designed gains.
    Simulate {
        scenario: PathBuf,
        gains: PathBuf,
        /// CSV trajectory log.
        #[arg(short, long)]
        out: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Check gains against a scenario.
    Verify { gains: PathBuf, scenario: PathBuf },
    /// Write a bundled scenario and run design and simulation on it.
    Demo {
        name: String,
        /// Directory for the scenario, gains, CSV and SVG files.
        #[arg(long, default_value = ".")]
        dir: PathBuf,
    },
}

/// An error with the exit code it maps to.
struct Failure {
    code: u8,
    err: anyhow::Error,
}

impl Failure {
    fn new(code: u8, err: impl Into<anyhow::Error>) -> Self {
        Self { code, err: err.into() }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(err: anyhow::Error) -> Self {
        Self { code: EXIT_ERROR, err }
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.err);
            ExitCode::from(f.code)
        }
    }
}

fn dispatch(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Design { scenario, out, solver } => {
            let mut sc = read_scenario(cli, scenario)?;
            apply_solver_args(&mut sc.solver, solver);
            let doc = design(&sc)?;
            doc.save(out).map_err(|e| Failure::new(EXIT_ERROR, e))?;
            say(cli, &design_summary(&sc, &doc));
            Ok(0)
        }
        Command::Simulate { scenario, gains, out, svg } => {
            let sc = read_scenario(cli, scenario)?;
            let doc = GainsDocument::load(gains).map_err(|e| Failure::new(EXIT_ERROR, e))?;
            simulate(cli, &sc, &doc, out, svg.as_deref())
        }
        Command::Verify { gains, scenario } => {
            let sc = read_scenario(cli, scenario)?;
            let doc = GainsDocument::load(gains).map_err(|e| Failure::new(EXIT_ERROR, e))?;
            verify(cli, &sc, &doc)
        }
        Command::Demo { name, dir } => demo(cli, name, dir),
    }
}

fn say(cli: &Cli, text: &str) {
    if !cli.quiet {
        println!("{text}");
    }
}

fn read_scenario(cli: &Cli, path: &Path) -> Result<Scenario, Failure> {
    let mut sc = load_scenario(path).map_err(|e| Failure::new(EXIT_ERROR, e))?;
    apply_overrides(cli, &mut sc)?;
    Ok(sc)
}

fn apply_overrides(cli: &Cli, sc: &mut Scenario) -> Result<(), Failure> {
    if let Some(s) = cli.seed {
        sc.sim.seed = s;
    }
    if let Some(dt) = cli.dt {
        sc.sim.dt = dt;
    }
    if let Some(t) = cli.t_final {
        sc.sim.t_final = t;
    }
    sc.validate().map_err(|e| Failure::new(EXIT_ERROR, e))
}

fn apply_solver_args(opts: &mut SolverOptions, args: &SolverArgs) {
    if let Some(t) = args.trace_budget {
        opts.trace_budget = Some(t);
    }
    if let Some(m) = args.max_iterations {
        opts.max_iterations = m;
    }
    if let Some(a) = args.algorithm {
        opts.algorithm = match a {
            AlgorithmArg::Admm => Algorithm::Admm,
            AlgorithmArg::ProjectedSubgradient => Algorithm::ProjectedSubgradient,
        };
    }
    if args.no_ties {
        opts.tie_neighborhoods = false;
    }
}

fn design(sc: &Scenario) -> Result<GainsDocument, Failure> {
    let spec = sc.formation().map_err(|e| Failure::new(EXIT_ERROR, e))?;
    let basis = build_kernel_basis(&spec).map_err(|e| Failure::new(EXIT_FAILED, e))?;
    let names = sc.topology_names();
    let design = solve_gains(&sc.graphs(), &spec, &sc.solver).map_err(|e| match e {
        GainError::InfeasibleTopology { topology, gamma } => {
            let name = topology.map_or_else(|| names.join(", "), |k| names[k].clone());
            Failure::new(
                EXIT_FAILED,
                anyhow::anyhow!(
                    "topology {name} admits no stabilizing gains (best smallest eigenvalue {gamma:.3e}); \
                     the sensing graph is likely not universally rigid for this formation"
                ),
            )
        }
        GainError::InvalidOptions(_) | GainError::Document(_) => Failure::new(EXIT_ERROR, e),
        other => Failure::new(EXIT_FAILED, other),
    })?;
    GainsDocument::from_design(&names, &design, &basis, sc.solver.zero_tolerance).map_err(|e| Failure::new(EXIT_FAILED, e))
}

fn design_summary(sc: &Scenario, doc: &GainsDocument) -> String {
    let mut lines = vec![format!("designed gains for {} ({} agents, trace {})", sc.name, doc.n, doc.trace_budget)];
    if let Some(r) = &doc.solver {
        lines.push(format!("  solver: {} iterations, gamma {:.6e}", r.iterations, r.gamma));
    }
    for t in &doc.topologies {
        if let Some(s) = &t.spectrum {
            lines.push(format!(
                "  {}: zero_count={} spectral_gap={:.6e} kernel_residual={:.3e} {}",
                t.name,
                s.zero_count,
                s.spectral_gap,
                s.kernel_residual,
                if s.pass { "pass" } else { "FAIL" }
            ));
        }
    }
    lines.join("\n")
}

/// Gain matrices in scenario topology order, matched by name.
fn matched_gains(sc: &Scenario, doc: &GainsDocument) -> Result<Vec<GainMatrix>, Failure> {
    if doc.n != sc.n() {
        return Err(Failure::new(
            EXIT_FAILED,
            anyhow::anyhow!("gains are for {} agents, scenario has {}", doc.n, sc.n()),
        ));
    }
    let all = doc.gain_matrices().map_err(|e| Failure::new(EXIT_FAILED, e))?;
    sc.topology_names()
        .iter()
        .map(|name| {
            doc.topology_index(name)
                .map(|k| all[k].clone())
                .ok_or_else(|| Failure::new(EXIT_FAILED, anyhow::anyhow!("gains file has no topology named {name}")))
        })
        .collect()
}

fn simulate(cli: &Cli, sc: &Scenario, doc: &GainsDocument, out: &Path, svg: Option<&Path>) -> Outcome {
    let gains = matched_gains(sc, doc)?;
    let log = match run(sc, &gains) {
        Ok(log) => log,
        Err(
            e @ (SimError::GainCount { .. }
            | SimError::TopologyMismatch { .. }
            | SimError::Guarantee(_)
            | SimError::Hurwitz { .. }
            | SimError::Gain(_)),
        ) => return Err(Failure::new(EXIT_FAILED, e)),
        Err(e @ SimError::Diverged { .. }) => return Err(Failure::new(EXIT_NOT_CONVERGED, e)),
        Err(e) => return Err(Failure::new(EXIT_ERROR, e)),
    };
    write_outputs(sc, &log, out, svg)?;
    report_run(cli, sc, &log)
}

fn write_outputs(sc: &Scenario, log: &TrajectoryLog, out: &Path, svg: Option<&Path>) -> Result<(), Failure> {
    let file = std::fs::File::create(out).with_context(|| format!("cannot create {}", out.display()))?;
    log.write_csv(std::io::BufWriter::new(file)).map_err(|e| Failure::new(EXIT_ERROR, e))?;
    if let Some(path) = svg {
        let last = log.records.last().map_or(0, |r| r.topology);
        let text = trajectory_svg(log, Some(&sc.topologies[last].graph));
        std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(())
}

fn report_run(cli: &Cli, sc: &Scenario, log: &TrajectoryLog) -> Outcome {
    let s = &log.summary;
    let l = &s.lyapunov;
    let details = format!(
        "{}: seed {}, final subspace error {:.3e}, min pairwise distance {:.6}, avoidance active in {} steps\n  \
         lyapunov ({:?}): {} steps checked, {} violations ({} in steps outside every stability result)",
        sc.name,
        log.seed,
        s.final_subspace_error,
        s.min_distance,
        s.avoidance_steps,
        l.kind,
        l.checked_steps,
        l.violations.len(),
        l.unguaranteed.len()
    );
    match s.converged_at {
        Some(t) => {
            say(cli, &format!("converged at t = {t:.2}\n{details}"));
            Ok(0)
        }
        None => {
            eprintln!("did not converge within t = {}\n{details}", sc.sim.t_final);
            Ok(EXIT_NOT_CONVERGED)
        }
    }
}

fn verify(cli: &Cli, sc: &Scenario, doc: &GainsDocument) -> Outcome {
    let gains = matched_gains(sc, doc)?;
    let spec = sc.formation().map_err(|e| Failure::new(EXIT_ERROR, e))?;
    let basis = build_kernel_basis(&spec).map_err(|e| Failure::new(EXIT_FAILED, e))?;
    let mut ok = true;
    let mut lines = Vec::new();
    for (g, t) in gains.iter().zip(&sc.topologies) {
        if g.graph() != &t.graph {
            ok = false;
            lines.push(format!("{}: gain sparsity does not match the sensing graph", t.name));
            continue;
        }
        let r = verify_gains(g, &basis, sc.solver.zero_tolerance).map_err(|e| Failure::new(EXIT_FAILED, e))?;
        ok &= r.pass;
        lines.push(format!(
            "{}: zero_count={} spectral_gap={:.6e} kernel_residual={:.3e} {}",
            t.name,
            r.zero_count,
            r.spectral_gap,
            r.kernel_residual,
            if r.pass { "pass" } else { "FAIL" }
        ));
        if sc.agents.model == ModelKind::Chain {
            let h = verify_higher_order_gains(&r.nonzero_eigenvalues(), &sc.controller.k_chain, sc.controller.chain_variant)
                .map_err(|e| Failure::new(EXIT_FAILED, e))?;
            ok &= h.pass;
            lines.push(format!(
                "  chain k={:?} ({:?}): max root real part {:.6e} at mu={:.6} {}",
                h.k,
                h.variant,
                h.max_real_part,
                h.worst_mu,
                if h.pass { "pass" } else { "FAIL" }
            ));
        }
    }
    if ok {
        say(cli, &lines.join("\n"));
        Ok(0)
    } else {
        eprintln!("{}", lines.join("\n"));
        Err(Failure::new(EXIT_FAILED, anyhow::anyhow!("verification failed")))
    }
}

fn demo(cli: &Cli, name: &str, dir: &Path) -> Outcome {
    let Some(mut sc) = demos::demo(name) else {
        return Err(Failure::new(
            EXIT_ERROR,
            anyhow::anyhow!("unknown demo {name}; choose one of {}", demos::DEMO_NAMES.join(", ")),
        ));
    };
    apply_overrides(cli, &mut sc)?;
    let scenario_path = dir.join(format!("{name}.toml"));
    save_scenario(&sc, &scenario_path).map_err(|e| Failure::new(EXIT_ERROR, e))?;
    let doc = design(&sc)?;
    doc.save(&dir.join(format!("{name}.gains.json"))).map_err(|e| Failure::new(EXIT_ERROR, e))?;
    say(cli, &design_summary(&sc, &doc));
    simulate(cli, &sc, &doc, &dir.join(format!("{name}.csv")), Some(&dir.join(format!("{name}.svg"))))
}
