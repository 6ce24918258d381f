use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::dynamics::ActuatorParams;
use crate::formation::{FormationMetrics, Vec2};

use super::{LyapunovReport, ModelKind, SimError};

/// Per-agent state layout: `x, y` followed by the model's extra columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateLayout {
    pub model: ModelKind,
    pub dynamic: bool,
    /// Chain order; 0 for other models.
    pub order: usize,
}

impl StateLayout {
    pub fn extras(&self) -> Vec<String> {
        match self.model {
            ModelKind::SingleIntegrator => vec![],
            ModelKind::Chain => (1..=self.order).flat_map(|d| [format!("d{d}x"), format!("d{d}y")]).collect(),
            ModelKind::Unicycle | ModelKind::Car => {
                let mut v = vec!["theta".to_string()];
                if self.model == ModelKind::Car {
                    v.push("phi".into());
                }
                if self.dynamic {
                    v.extend(["v".to_string(), "omega".to_string()]);
                }
                v
            }
        }
    }

    pub fn stride(&self) -> usize {
        2 + self.extras().len()
    }

    /// Offset of the internal speed state within an agent block, for dynamic models.
    pub fn speed_index(&self) -> Option<usize> {
        match (self.model, self.dynamic) {
            (ModelKind::Unicycle, true) => Some(3),
            (ModelKind::Car, true) => Some(4),
            _ => None,
        }
    }

    pub fn columns(&self, n: usize) -> Vec<String> {
        let extras = self.extras();
        let mut cols = vec!["t".to_string()];
        for i in 1..=n {
            cols.push(format!("x_{i}"));
            cols.push(format!("y_{i}"));
            cols.extend(extras.iter().map(|e| format!("{e}_{i}")));
        }
        cols.extend(["subspace_error", "lyapunov_value", "min_pairwise_distance"].map(String::from));
        cols
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub t: f64,
    pub topology: usize,
    /// Agent blocks laid out per [`StateLayout`].
    pub state: Vec<f64>,
    /// Applied command per agent: the planar vector for holonomic models, the saturated
    /// `(v, ω)` or `(s, r)` pair for unicycles and cars.
    pub commands: Vec<f64>,
    pub metrics: FormationMetrics,
    /// Collision avoidance changed at least one command during this step.
    pub intervened: bool,
    /// Some applied command fell outside every stability result: avoidance altered a
    /// nonholonomic command, or avoidance and a perturbation together turned a command by
    /// π/2 or more from its nominal direction.
    #[serde(default)]
    pub uncovered: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub final_subspace_error: f64,
    pub min_distance: f64,
    /// Time at which the error dropped below the threshold for good (sustain window passed).
    pub converged_at: Option<f64>,
    pub lyapunov: LyapunovReport,
    pub avoidance_steps: usize,
    pub wall_clock_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryLog {
    pub seed: u64,
    pub n: usize,
    pub dt: f64,
    pub layout: StateLayout,
    /// Actuator parameters actually used, for dynamic models.
    pub actuators: Option<Vec<ActuatorParams>>,
    pub records: Vec<StepRecord>,
    pub summary: RunSummary,
}

impl TrajectoryLog {
    pub fn converged(&self) -> bool {
        self.summary.converged_at.is_some()
    }

    pub fn positions(&self, k: usize) -> Vec<Vec2> {
        positions(&self.records[k].state, self.layout.stride())
    }

    pub fn final_positions(&self) -> Vec<Vec2> {
        self.positions(self.records.len() - 1)
    }

    /// Header and rows, preceded by a `# seed=` comment line.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<(), SimError> {
        writeln!(out, "# seed={}", self.seed).map_err(|e| SimError::Io(e.to_string()))?;
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| SimError::Io(e.to_string());
        w.write_record(self.layout.columns(self.n)).map_err(io)?;
        for r in &self.records {
            let mut row: Vec<String> = Vec::with_capacity(r.state.len() + 4);
            row.push(r.t.to_string());
            row.extend(r.state.iter().map(|x| x.to_string()));
            row.push(r.metrics.subspace_error.to_string());
            row.push(r.metrics.lyapunov_value.to_string());
            row.push(r.metrics.min_pairwise_distance.to_string());
            w.write_record(&row).map_err(io)?;
        }
        w.flush().map_err(|e| SimError::Io(e.to_string()))
    }

    pub fn to_csv_string(&self) -> Result<String, SimError> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| SimError::Io(e.to_string()))
    }
}

pub fn positions(state: &[f64], stride: usize) -> Vec<Vec2> {
    state.chunks_exact(stride).map(|a| Vec2::new(a[0], a[1])).collect()
}

pub fn stacked_positions(state: &[f64], stride: usize) -> Vec<f64> {
    state.chunks_exact(stride).flat_map(|a| [a[0], a[1]]).collect()
}
