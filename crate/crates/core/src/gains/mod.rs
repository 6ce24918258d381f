//! Gain matrices, the spectral design problem and its verification.

mod file;
mod hurwitz;
mod matrix;
mod solver;
mod spectrum;

pub use file::{EdgeRecord, GainsDocument, TopologyGains, GAINS_VERSION};
pub use hurwitz::{
    characteristic_coefficients, closed_loop_matrix, monic_roots, routh_stable, verify_higher_order_gains,
    HigherOrderVariant, HurwitzReport, ModeCheck,
};
pub use matrix::{gain_block, EdgeGain, GainMatrix};
pub use solver::{
    design_gains, design_joint_gains, gamma_of, solve_gains, tie_groups, Algorithm, GainDesign, SolverOptions,
    SolverReport, TieGroup,
};
pub use spectrum::{reduced_matrix, verify_dense, verify_gains, SpectrumReport, DEFAULT_RELATIVE_ZERO_TOL};

use thiserror::Error;

use crate::formation::FormationError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GainError {
    #[error(transparent)]
    Formation(#[from] FormationError),
    #[error("expected dimension {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("gain entries must be finite")]
    NonFinite,
    #[error("invalid solver options: {0}")]
    InvalidOptions(String),
    #[error("{}", infeasible_message(*.topology, *.gamma))]
    InfeasibleTopology { topology: Option<usize>, gamma: f64 },
    #[error(
        "solver did not converge after {iterations} iterations \
         (gamma {gamma:.3e}, primal residual {primal_residual:.3e}, dual residual {dual_residual:.3e})"
    )]
    SolverFailure { iterations: usize, gamma: f64, primal_residual: f64, dual_residual: f64 },
    #[error("{}", joint_message(.binding))]
    JointInfeasible { binding: Vec<TieGroup> },
    #[error("spectrum is empty")]
    EmptySpectrum,
    #[error("gains document: {0}")]
    Document(String),
}

fn infeasible_message(topology: Option<usize>, gamma: f64) -> String {
    let which = topology.map_or_else(|| "the topology set".to_string(), |k| format!("topology {k}"));
    format!("{which} admits no stabilizing gain matrix (best smallest eigenvalue {gamma:.3e}); the sensing graph is likely not universally rigid for this formation")
}

fn joint_message(binding: &[TieGroup]) -> String {
    if binding.is_empty() {
        return "topologies are individually feasible but the tied joint problem is not".into();
    }
    let names: Vec<String> = binding.iter().map(|t| t.to_string()).collect();
    format!("topologies are individually feasible but the tied joint problem is not; binding ties: {}", names.join("; "))
}
