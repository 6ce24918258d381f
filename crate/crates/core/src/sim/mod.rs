//! Deterministic closed-loop simulation, trajectory logs and the Lyapunov monitor.

mod engine;
mod log;
mod monitor;
mod scenario;
mod schedule;

pub use engine::{check_guarantees, initial_positions, lyapunov_kind, run};
pub use log::{positions, stacked_positions, RunSummary, StateLayout, StepRecord, TrajectoryLog};
pub use monitor::{lyapunov_monitor, lyapunov_of, LyapunovKind, LyapunovReport};
pub use scenario::{
    ActuatorSpec, AgentsConfig, InitialPositions, InitialState, ModelKind, NamedGraph, Scenario, SimConfig,
    DEFAULT_SEED,
};
pub use schedule::{active_topology, Schedule};

use thiserror::Error;

use crate::control::ControlError;
use crate::dynamics::DynamicsError;
use crate::formation::FormationError;
use crate::gains::GainError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("invalid scenario: {0}")]
    Config(String),
    #[error("invalid schedule: {0}")]
    Schedule(String),
    #[error("expected {expected} gain matrices (one per topology), got {got}")]
    GainCount { expected: usize, got: usize },
    #[error("gain matrix sparsity does not match topology {topology}")]
    TopologyMismatch { topology: String },
    #[error("refusing to simulate: {0}")]
    Guarantee(String),
    #[error("refusing to simulate: chain gains are not stabilizing for topology {topology} (mode μ = {mu:.6}, max real part {max_real_part:.3e})")]
    Hurwitz { topology: String, mu: f64, max_real_part: f64 },
    #[error("state became non-finite at t = {t}")]
    Diverged { t: f64 },
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Formation(#[from] FormationError),
    #[error(transparent)]
    Gain(#[from] GainError),
    #[error(transparent)]
    Control(#[from] ControlError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}
