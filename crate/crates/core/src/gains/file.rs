use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::formation::KernelBasis;

use super::{verify_gains, EdgeGain, GainDesign, GainError, GainMatrix, SolverReport, SpectrumReport};

pub const GAINS_VERSION: u32 = 1;

/// One edge, agents numbered from 1, with `A_ij = [[a, b], [-b, a]]` for `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeRecord {
    pub i: usize,
    pub j: usize,
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologyGains {
    pub name: String,
    pub edges: Vec<EdgeRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<SpectrumReport>,
}

/// Serialized gain design. Floats are written with shortest round-trip formatting, so
/// save followed by load reproduces every value bit for bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GainsDocument {
    pub version: u32,
    pub n: usize,
    pub trace_budget: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverReport>,
    pub topologies: Vec<TopologyGains>,
}

impl GainsDocument {
    pub fn from_design(
        names: &[String],
        design: &GainDesign,
        basis: &KernelBasis,
        zero_tol: Option<f64>,
    ) -> Result<Self, GainError> {
        if names.len() != design.gains.len() {
            return Err(GainError::DimensionMismatch { expected: design.gains.len(), got: names.len() });
        }
        let topologies = names
            .iter()
            .zip(&design.gains)
            .map(|(name, g)| {
                Ok(TopologyGains {
                    name: name.clone(),
                    edges: g
                        .edge_gains()
                        .iter()
                        .map(|e| EdgeRecord { i: e.i + 1, j: e.j + 1, a: e.a, b: e.b })
                        .collect(),
                    spectrum: Some(verify_gains(g, basis, zero_tol)?),
                })
            })
            .collect::<Result<Vec<_>, GainError>>()?;
        Ok(Self {
            version: GAINS_VERSION,
            n: basis.n(),
            trace_budget: design.trace_budget,
            solver: Some(design.report.clone()),
            topologies,
        })
    }

    pub fn gain_matrices(&self) -> Result<Vec<GainMatrix>, GainError> {
        if self.version != GAINS_VERSION {
            return Err(GainError::Document(format!("unsupported version {}", self.version)));
        }
        self.topologies
            .iter()
            .map(|t| {
                let edges = t
                    .edges
                    .iter()
                    .map(|e| {
                        if e.i == 0 || e.j == 0 {
                            return Err(GainError::Document(format!("topology {}: agents are numbered from 1", t.name)));
                        }
                        Ok(EdgeGain { i: e.i - 1, j: e.j - 1, a: e.a, b: e.b })
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                GainMatrix::from_edge_gains(self.n, &edges)
            })
            .collect()
    }

    pub fn topology_index(&self, name: &str) -> Option<usize> {
        self.topologies.iter().position(|t| t.name == name)
    }

    pub fn to_json(&self) -> Result<String, GainError> {
        serde_json::to_string_pretty(self).map_err(|e| GainError::Document(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self, GainError> {
        serde_json::from_str(s).map_err(|e| GainError::Document(e.to_string()))
    }

    pub fn save(&self, path: &Path) -> Result<(), GainError> {
        std::fs::write(path, self.to_json()? + "\n").map_err(|e| GainError::Document(format!("{}: {e}", path.display())))
    }

    pub fn load(path: &Path) -> Result<Self, GainError> {
        let s = std::fs::read_to_string(path).map_err(|e| GainError::Document(format!("{}: {e}", path.display())))?;
        Self::from_json(&s)
    }
}
