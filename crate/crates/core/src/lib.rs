//! Distributed planar formation control: spectral gain design and closed-loop simulation.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod formation;
pub mod gains;
pub mod control;
pub mod dynamics;
pub mod collision;
pub mod sim;
pub mod demos;
pub mod document;
pub mod plot;

pub use formation::{
    build_kernel_basis, formation_error, rotate90, validate_graph, FormationError, FormationMetrics,
    FormationSpec, GraphReport, KernelBasis, SensingGraph, Vec2,
};
pub use gains::{
    design_gains, design_joint_gains, reduced_matrix, verify_gains, verify_higher_order_gains, GainError,
    GainMatrix, GainsDocument, HigherOrderVariant, SolverOptions, SpectrumReport,
};
pub use control::ControllerConfig;
pub use collision::AvoidanceConfig;
pub use sim::{run, LyapunovKind, LyapunovReport, ModelKind, Scenario, SimError, TrajectoryLog};
pub use document::{load_scenario, parse_scenario, save_scenario, scenario_to_toml, DocumentError, ScenarioDocument};
pub use plot::trajectory_svg;
