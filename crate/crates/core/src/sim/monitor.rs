use serde::{Deserialize, Serialize};

use crate::formation::lyapunov_value;
use crate::gains::GainMatrix;

use super::log::{stacked_positions, TrajectoryLog};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LyapunovKind {
    /// `V = -½ qᵀ A q`.
    Position,
    /// `V = -½ qᵀ A q + ½ Σ v_i² / b_i` for actuator dynamics.
    Composite,
    /// No monotone function is known for this configuration; nothing is checked.
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LyapunovReport {
    pub kind: LyapunovKind,
    pub checked_steps: usize,
    /// Steps `k` with `V_{k+1} - V_k` above tolerance, both values using the gain active
    /// during step `k`.
    pub violations: Vec<usize>,
    /// Subset of `violations` in steps flagged [`uncovered`](super::log::StepRecord::uncovered).
    pub unguaranteed: Vec<usize>,
    pub max_increase: f64,
}

impl LyapunovReport {
    pub fn not_applicable() -> Self {
        Self {
            kind: LyapunovKind::NotApplicable,
            checked_steps: 0,
            violations: vec![],
            unguaranteed: vec![],
            max_increase: 0.0,
        }
    }

    /// Violations in steps covered by a stability result.
    pub fn guaranteed_violations(&self) -> usize {
        self.violations.len() - self.unguaranteed.len()
    }
}

/// Value of the chosen function on one logged state.
pub fn lyapunov_of(log: &TrajectoryLog, k: usize, gain: &GainMatrix, kind: LyapunovKind) -> f64 {
    let rec = &log.records[k];
    let stride = log.layout.stride();
    let q = stacked_positions(&rec.state, stride);
    let mut v = lyapunov_value(&q, gain.dense());
    if kind == LyapunovKind::Composite {
        if let (Some(idx), Some(params)) = (log.layout.speed_index(), &log.actuators) {
            for (agent, p) in rec.state.chunks_exact(stride).zip(params) {
                v += 0.5 * agent[idx] * agent[idx] / p.b;
            }
        }
    }
    v
}

/// Checks `V_{k+1} ≤ V_k + tol` with `tol = 1e-7 V_0 + 10 ε (|V_k| + |V_{k+1}|)`.
pub fn lyapunov_monitor(log: &TrajectoryLog, gains: &[GainMatrix], kind: LyapunovKind) -> LyapunovReport {
    if kind == LyapunovKind::NotApplicable || log.records.len() < 2 {
        return LyapunovReport { kind, ..LyapunovReport::not_applicable() };
    }
    let v0 = lyapunov_of(log, 0, &gains[log.records[0].topology], kind).abs();
    let mut report = LyapunovReport { kind, ..LyapunovReport::not_applicable() };
    for k in 0..log.records.len() - 1 {
        let gain = &gains[log.records[k].topology];
        let a = lyapunov_of(log, k, gain, kind);
        let b = lyapunov_of(log, k + 1, gain, kind);
        let tol = 1e-7 * v0 + 10.0 * f64::EPSILON * (a.abs() + b.abs());
        let inc = b - a;
        report.max_increase = report.max_increase.max(inc);
        if inc > tol {
            report.violations.push(k);
            if log.records[k].uncovered {
                report.unguaranteed.push(k);
            }
        }
        report.checked_steps += 1;
    }
    report
}
