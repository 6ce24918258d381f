use serde::{Deserialize, Serialize};

use crate::collision::AvoidanceConfig;
use crate::control::{ControllerConfig, Drive};
use crate::dynamics::ActuatorParams;
use crate::formation::{FormationSpec, SensingGraph, Vec2};
use crate::gains::SolverOptions;

use super::{Schedule, SimError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    SingleIntegrator,
    /// Chain of integrators whose order is `k_chain.len() - 1`.
    Chain,
    Unicycle,
    Car,
}

impl ModelKind {
    pub fn is_nonholonomic(self) -> bool {
        matches!(self, Self::Unicycle | Self::Car)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ActuatorSpec {
    Explicit(Vec<ActuatorParams>),
    /// Every parameter of every agent drawn uniformly from `[low, high]`.
    Uniform { low: f64, high: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgentsConfig {
    pub model: ModelKind,
    /// Actuator dynamics for unicycles and cars.
    pub dynamic: bool,
    pub drive: Drive,
    pub wheelbase: f64,
    pub actuators: Option<ActuatorSpec>,
    /// Constant input disturbance per agent (single integrators and chains).
    pub disturbance: Option<Vec<Vec2>>,
}

impl AgentsConfig {
    pub fn new(model: ModelKind) -> Self {
        Self { model, dynamic: false, drive: Drive::Front, wheelbase: 1.0, actuators: None, disturbance: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialPositions {
    Explicit(Vec<Vec2>),
    /// Both coordinates uniform in `[low, high]`.
    UniformBox { low: f64, high: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct InitialState {
    pub positions: InitialPositions,
    /// Heading angles; drawn uniformly from `[-π, π)` when absent.
    pub headings: Option<Vec<f64>>,
    /// Steering angles for cars; zero when absent.
    pub steering: Option<Vec<f64>>,
    /// Random draws are repeated until every pair is farther apart than this. Defaults to
    /// the collision radius when avoidance is on.
    pub min_separation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub dt: f64,
    pub t_final: f64,
    pub seed: u64,
    pub initial: InitialState,
    /// Evaluate each controller from relative measurements expressed in the agent's own frame.
    pub local_frames: bool,
    /// Amplitude of uniform noise on every relative position measurement.
    pub noise: Option<f64>,
    pub convergence_threshold: f64,
    /// How long the subspace error must stay below the threshold.
    pub sustain: f64,
    pub stop_on_convergence: bool,
}

pub const DEFAULT_SEED: u64 = 42;

impl SimConfig {
    pub fn new(t_final: f64, initial: InitialState) -> Self {
        Self {
            dt: 0.01,
            t_final,
            seed: DEFAULT_SEED,
            initial,
            local_frames: true,
            noise: None,
            convergence_threshold: 1e-3,
            sustain: 1.0,
            stop_on_convergence: false,
        }
    }

    /// `floor(t_final / dt)`, tolerant of the rounding in the division.
    pub fn steps(&self) -> usize {
        let s = self.t_final / self.dt;
        let r = s.round();
        if (s - r).abs() <= 1e-9 * r.max(1.0) {
            r as usize
        } else {
            s.floor() as usize
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NamedGraph {
    pub name: String,
    pub graph: SensingGraph,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    /// Desired coordinates as written; `formation()` applies centering.
    pub points: Vec<Vec2>,
    pub center: bool,
    pub topologies: Vec<NamedGraph>,
    pub schedule: Schedule,
    pub agents: AgentsConfig,
    pub controller: ControllerConfig,
    pub avoidance: Option<AvoidanceConfig>,
    pub solver: SolverOptions,
    pub sim: SimConfig,
}

impl Scenario {
    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn formation(&self) -> Result<FormationSpec, SimError> {
        Ok(FormationSpec::from_points(&self.points, self.center)?)
    }

    pub fn graphs(&self) -> Vec<SensingGraph> {
        self.topologies.iter().map(|t| t.graph.clone()).collect()
    }

    pub fn topology_names(&self) -> Vec<String> {
        self.topologies.iter().map(|t| t.name.clone()).collect()
    }

    /// Chain order `m`, or 0 for other models.
    pub fn chain_order(&self) -> usize {
        match self.agents.model {
            ModelKind::Chain => self.controller.k_chain.len().saturating_sub(1),
            _ => 0,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: String| Err(SimError::Config(m));
        let n = self.n();
        self.formation()?;
        if self.topologies.is_empty() {
            return bad("at least one topology is required".into());
        }
        for t in &self.topologies {
            if t.graph.n() != n {
                return bad(format!("topology {} has {} agents, formation has {n}", t.name, t.graph.n()));
            }
        }
        Schedule::new(self.schedule.entries().to_vec(), self.topologies.len())?;
        self.controller.validate(n)?;
        if let Some(av) = &self.avoidance {
            av.validate().map_err(|e| SimError::Config(e.to_string()))?;
        }
        self.solver.validate()?;

        let s = &self.sim;
        if !(s.dt > 0.0) || !s.dt.is_finite() {
            return bad(format!("dt must be positive, got {}", s.dt));
        }
        if !(s.t_final > s.dt) || !s.t_final.is_finite() {
            return bad(format!("t_final must exceed dt, got {}", s.t_final));
        }
        if !(s.convergence_threshold > 0.0) || !(s.sustain >= 0.0) {
            return bad("convergence_threshold must be positive and sustain non-negative".into());
        }
        if s.noise.is_some_and(|a| !(a >= 0.0)) {
            return bad("noise amplitude must be non-negative".into());
        }
        match &s.initial.positions {
            InitialPositions::Explicit(p) if p.len() != n => {
                return bad(format!("expected {n} initial positions, got {}", p.len()));
            }
            InitialPositions::UniformBox { low, high } if !(low < high) => {
                return bad(format!("initial box needs low < high, got [{low}, {high}]"));
            }
            _ => {}
        }
        for (what, v) in [("headings", &s.initial.headings), ("steering", &s.initial.steering)] {
            if v.as_ref().is_some_and(|v| v.len() != n) {
                return bad(format!("expected {n} initial {what}"));
            }
        }

        let a = &self.agents;
        match a.model {
            ModelKind::Chain if self.controller.k_chain.len() < 2 => {
                return bad("chain agents need k_chain = [k0, k1, ..., km] with m >= 1".into());
            }
            ModelKind::Car if !(a.wheelbase > 0.0) => return bad(format!("wheelbase must be positive, got {}", a.wheelbase)),
            _ => {}
        }
        if a.dynamic && !a.model.is_nonholonomic() {
            return bad("actuator dynamics apply to unicycles and cars only".into());
        }
        match (&a.actuators, a.dynamic) {
            (None, true) => return bad("dynamic agents need actuator parameters".into()),
            (Some(ActuatorSpec::Explicit(p)), _) if p.len() != n => {
                return bad(format!("expected {n} actuator parameter sets, got {}", p.len()));
            }
            (Some(ActuatorSpec::Uniform { low, high }), _) if !(low <= high) => {
                return bad("actuator range needs low <= high".into());
            }
            _ => {}
        }
        if let Some(d) = &a.disturbance {
            if a.model.is_nonholonomic() {
                return bad("input disturbances apply to single integrators and chains only".into());
            }
            if d.len() != n {
                return bad(format!("expected {n} disturbance vectors, got {}", d.len()));
            }
        }
        if self.controller.integral.is_some() && a.model != ModelKind::SingleIntegrator {
            return bad("integral control applies to single integrators only".into());
        }
        if let Some(sc) = &self.controller.scale {
            for t in &self.topologies {
                for &(i, j) in t.graph.edges() {
                    if sc.distance(i, j, &self.points).is_none() {
                        return bad(format!("no desired distance for edge ({}, {}) in topology {}", i + 1, j + 1, t.name));
                    }
                }
            }
        }
        Ok(())
    }
}
