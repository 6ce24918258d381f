//! Human-editable scenario files (TOML).
//!
//! Agents are numbered from 1 in edge lists; coordinates are `[x, y]` pairs.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::collision::AvoidanceConfig;
use crate::control::{ControllerConfig, Drive};
use crate::dynamics::ActuatorParams;
use crate::formation::{SensingGraph, Vec2};
use crate::gains::SolverOptions;
use crate::sim::{
    ActuatorSpec, AgentsConfig, InitialPositions, InitialState, ModelKind, NamedGraph, Scenario, Schedule, SimConfig,
    SimError, DEFAULT_SEED,
};

pub const SCENARIO_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("cannot parse scenario: {0}")]
    Parse(String),
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error("{0}")]
    Io(String),
}

impl From<SimError> for DocumentError {
    fn from(e: SimError) -> Self {
        Self::Invalid(e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormationSection {
    pub coordinates: Vec<[f64; 2]>,
    #[serde(default = "yes")]
    pub center: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSection {
    pub name: String,
    pub edges: Vec<[usize; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleEntry {
    pub t: f64,
    pub topology: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentsSection {
    pub model: ModelKind,
    #[serde(default)]
    pub dynamic: bool,
    #[serde(default)]
    pub drive: Drive,
    #[serde(default = "unit")]
    pub wheelbase: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub actuators: Option<Vec<ActuatorParams>>,
    /// Draw every actuator parameter uniformly from `[low, high]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub actuator_range: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disturbance: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub positions: Option<Vec<[f64; 2]>>,
    /// Both coordinates uniform in `[low, high]`.
    #[serde(default, rename = "box", skip_serializing_if = "Option::is_none")]
    pub uniform_box: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub headings: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steering: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_separation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSection {
    #[serde(default = "default_dt")]
    pub dt: f64,
    pub t_final: f64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "yes")]
    pub local_frames: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<f64>,
    #[serde(default = "default_threshold")]
    pub convergence_threshold: f64,
    #[serde(default = "unit")]
    pub sustain: f64,
    #[serde(default)]
    pub stop_on_convergence: bool,
    pub initial: InitialSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDocument {
    pub version: u32,
    pub name: String,
    pub formation: FormationSection,
    pub graphs: Vec<GraphSection>,
    /// Absent means the first graph throughout.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub schedule: Vec<ScheduleEntry>,
    pub agents: AgentsSection,
    #[serde(default)]
    pub controller: ControllerConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub avoidance: Option<AvoidanceConfig>,
    #[serde(default)]
    pub solver: SolverOptions,
    pub sim: SimSection,
}

fn yes() -> bool {
    true
}

fn unit() -> f64 {
    1.0
}

fn default_dt() -> f64 {
    0.01
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

fn default_threshold() -> f64 {
    1e-3
}

fn pairs(v: &[Vec2]) -> Vec<[f64; 2]> {
    v.iter().map(|p| [p.x, p.y]).collect()
}

fn points(v: &[[f64; 2]]) -> Vec<Vec2> {
    v.iter().map(|p| Vec2::new(p[0], p[1])).collect()
}

impl ScenarioDocument {
    pub fn from_scenario(sc: &Scenario) -> Self {
        let names = sc.topology_names();
        let a = &sc.agents;
        let (actuators, actuator_range) = match &a.actuators {
            None => (None, None),
            Some(ActuatorSpec::Explicit(p)) => (Some(p.clone()), None),
            Some(ActuatorSpec::Uniform { low, high }) => (None, Some([*low, *high])),
        };
        let init = &sc.sim.initial;
        let (positions, uniform_box) = match &init.positions {
            InitialPositions::Explicit(p) => (Some(pairs(p)), None),
            InitialPositions::UniformBox { low, high } => (None, Some([*low, *high])),
        };
        Self {
            version: SCENARIO_VERSION,
            name: sc.name.clone(),
            formation: FormationSection { coordinates: pairs(&sc.points), center: sc.center },
            graphs: sc
                .topologies
                .iter()
                .map(|t| GraphSection {
                    name: t.name.clone(),
                    edges: t.graph.edges().iter().map(|&(i, j)| [i + 1, j + 1]).collect(),
                })
                .collect(),
            schedule: sc
                .schedule
                .entries()
                .iter()
                .map(|&(t, k)| ScheduleEntry { t, topology: names[k].clone() })
                .collect(),
            agents: AgentsSection {
                model: a.model,
                dynamic: a.dynamic,
                drive: a.drive,
                wheelbase: a.wheelbase,
                actuators,
                actuator_range,
                disturbance: a.disturbance.as_deref().map(pairs),
            },
            controller: sc.controller.clone(),
            avoidance: sc.avoidance,
            solver: sc.solver.clone(),
            sim: SimSection {
                dt: sc.sim.dt,
                t_final: sc.sim.t_final,
                seed: sc.sim.seed,
                local_frames: sc.sim.local_frames,
                noise: sc.sim.noise,
                convergence_threshold: sc.sim.convergence_threshold,
                sustain: sc.sim.sustain,
                stop_on_convergence: sc.sim.stop_on_convergence,
                initial: InitialSection {
                    positions,
                    uniform_box,
                    headings: init.headings.clone(),
                    steering: init.steering.clone(),
                    min_separation: init.min_separation,
                },
            },
        }
    }

    /// Converts and validates.
    pub fn to_scenario(&self) -> Result<Scenario, DocumentError> {
        let bad = |m: String| Err(DocumentError::Invalid(m));
        if self.version != SCENARIO_VERSION {
            return bad(format!("unsupported version {}, expected {SCENARIO_VERSION}", self.version));
        }
        let n = self.formation.coordinates.len();
        let mut topologies = Vec::with_capacity(self.graphs.len());
        for g in &self.graphs {
            if topologies.iter().any(|t: &NamedGraph| t.name == g.name) {
                return bad(format!("duplicate graph name {}", g.name));
            }
            let mut edges = Vec::with_capacity(g.edges.len());
            for &[i, j] in &g.edges {
                if i == 0 || j == 0 {
                    return bad(format!("graph {}: agents are numbered from 1", g.name));
                }
                edges.push((i - 1, j - 1));
            }
            let graph = SensingGraph::new(n, edges).map_err(|e| DocumentError::Invalid(format!("graph {}: {e}", g.name)))?;
            topologies.push(NamedGraph { name: g.name.clone(), graph });
        }
        let schedule = if self.schedule.is_empty() {
            Schedule::constant(0)
        } else {
            let mut entries = Vec::with_capacity(self.schedule.len());
            for e in &self.schedule {
                let Some(k) = topologies.iter().position(|t| t.name == e.topology) else {
                    return bad(format!("schedule names unknown graph {}", e.topology));
                };
                entries.push((e.t, k));
            }
            Schedule::new(entries, topologies.len())?
        };
        let a = &self.agents;
        let actuators = match (&a.actuators, a.actuator_range) {
            (Some(_), Some(_)) => return bad("give either actuators or actuator_range, not both".into()),
            (Some(p), None) => Some(ActuatorSpec::Explicit(p.clone())),
            (None, Some([low, high])) => Some(ActuatorSpec::Uniform { low, high }),
            (None, None) => None,
        };
        let init = &self.sim.initial;
        let positions = match (&init.positions, init.uniform_box) {
            (Some(p), None) => InitialPositions::Explicit(points(p)),
            (None, Some([low, high])) => InitialPositions::UniformBox { low, high },
            _ => return bad("sim.initial needs exactly one of positions or box".into()),
        };
        let s = &self.sim;
        let sc = Scenario {
            name: self.name.clone(),
            points: points(&self.formation.coordinates),
            center: self.formation.center,
            topologies,
            schedule,
            agents: AgentsConfig {
                model: a.model,
                dynamic: a.dynamic,
                drive: a.drive,
                wheelbase: a.wheelbase,
                actuators,
                disturbance: a.disturbance.as_deref().map(points),
            },
            controller: self.controller.clone(),
            avoidance: self.avoidance,
            solver: self.solver.clone(),
            sim: SimConfig {
                dt: s.dt,
                t_final: s.t_final,
                seed: s.seed,
                initial: InitialState {
                    positions,
                    headings: init.headings.clone(),
                    steering: init.steering.clone(),
                    min_separation: init.min_separation,
                },
                local_frames: s.local_frames,
                noise: s.noise,
                convergence_threshold: s.convergence_threshold,
                sustain: s.sustain,
                stop_on_convergence: s.stop_on_convergence,
            },
        };
        sc.validate()?;
        Ok(sc)
    }

    pub fn parse(text: &str) -> Result<Self, DocumentError> {
        toml::from_str(text).map_err(|e| DocumentError::Parse(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String, DocumentError> {
        toml::to_string(self).map_err(|e| DocumentError::Parse(e.to_string()))
    }
}

pub fn parse_scenario(text: &str) -> Result<Scenario, DocumentError> {
    ScenarioDocument::parse(text)?.to_scenario()
}

pub fn scenario_to_toml(sc: &Scenario) -> Result<String, DocumentError> {
    ScenarioDocument::from_scenario(sc).to_toml()
}

pub fn load_scenario(path: &Path) -> Result<Scenario, DocumentError> {
    let text = std::fs::read_to_string(path).map_err(|e| DocumentError::Io(format!("{}: {e}", path.display())))?;
    parse_scenario(&text)
}

pub fn save_scenario(sc: &Scenario, path: &Path) -> Result<(), DocumentError> {
    std::fs::write(path, scenario_to_toml(sc)?).map_err(|e| DocumentError::Io(format!("{}: {e}", path.display())))
}
