//! Control laws. Every function maps relative measurements taken in the agent's own frame
//! to a command in that same frame.

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formation::Vec2;
use crate::gains::HigherOrderVariant;

/// Tolerance on `‖h‖ = 1` for heading and steering vectors.
pub const UNIT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ControlError {
    #[error("no gain block for neighbor {neighbor}")]
    MissingGain { neighbor: usize },
    #[error("guarantee violated: {0}")]
    GuaranteeViolation(String),
    #[error("direction vector must be unit length, got norm {0}")]
    NotUnit(f64),
    #[error("configuration error: {0}")]
    Configuration(String),
    #[error("no desired distance for neighbor {neighbor}")]
    MissingDistance { neighbor: usize },
    #[error("derivative measurements of neighbors are required for full-matrix chain feedback")]
    MeasurementUnavailable,
}

/// Off-diagonal gain blocks of one agent, sorted by neighbor index.
pub type BlockRow = [(usize, Matrix2<f64>)];

fn lookup(row: &BlockRow, j: usize) -> Result<&Matrix2<f64>, ControlError> {
    row.binary_search_by_key(&j, |(k, _)| *k)
        .map(|idx| &row[idx].1)
        .map_err(|_| ControlError::MissingGain { neighbor: j })
}

/// `Σ_j A_ij (q_j - q_i)` from `(j, q_j - q_i)` pairs.
pub fn single_integrator_control(rel: &[(usize, Vec2)], row: &BlockRow) -> Result<Vec2, ControlError> {
    rel.iter().try_fold(Vec2::zeros(), |acc, (j, d)| Ok(acc + lookup(row, *j)? * d))
}

pub fn rotate(u: Vec2, angle: f64) -> Vec2 {
    let (s, c) = angle.sin_cos();
    Vec2::new(c * u.x - s * u.y, s * u.x + c * u.y)
}

/// `(x, y) -> (-y, x)`.
pub fn perp(v: Vec2) -> Vec2 {
    Vec2::new(-v.y, v.x)
}

/// `c R(α) u`.
pub fn perturb_control(u: Vec2, c: f64, alpha: f64) -> Result<Vec2, ControlError> {
    if !(c > 0.0) {
        return Err(ControlError::GuaranteeViolation(format!("perturbation scale must be positive, got {c}")));
    }
    if !(alpha.abs() < std::f64::consts::FRAC_PI_2) {
        return Err(ControlError::GuaranteeViolation(format!("perturbation angle must satisfy |α| < π/2, got {alpha}")));
    }
    Ok(rotate(u, alpha) * c)
}

/// Factor `σ ∈ (0, 1]` with `‖σ u‖ ≤ u_max`. The factor is nudged down when rounding would
/// leave the scaled vector just above the bound, so saturating twice changes nothing.
pub fn saturation_factor(u: Vec2, u_max: f64) -> f64 {
    let norm = u.norm();
    if norm <= u_max {
        return 1.0;
    }
    let mut s = u_max / norm;
    while (u * s).norm() > u_max {
        s *= 1.0 - f64::EPSILON;
    }
    s
}

pub fn saturate_norm(u: Vec2, u_max: f64) -> Vec2 {
    let s = saturation_factor(u, u_max);
    if s == 1.0 {
        u
    } else {
        u * s
    }
}

/// `x` clipped to `[-bound, bound]`.
pub fn saturate_scalar(x: f64, bound: Option<f64>) -> f64 {
    match bound {
        Some(b) => x.clamp(-b, b),
        None => x,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct IntegralState {
    pub accumulator: Vec2,
    /// Consensus term at the previous call, for the trapezoidal update.
    pub last_term: Option<Vec2>,
}

/// `u = k0 e + k1 ∫ e`, with `e = Σ_j A_ij (q_j - q_i)`.
///
/// Each call advances the accumulator by `dt/2 · (e_prev + e)`; the first call only
/// records `e`.
pub fn integral_control(
    rel: &[(usize, Vec2)],
    row: &BlockRow,
    state: IntegralState,
    dt: f64,
    k0: f64,
    k1: f64,
) -> Result<(Vec2, IntegralState), ControlError> {
    if !(k0 > 0.0) || !(k1 >= 0.0) {
        return Err(ControlError::GuaranteeViolation(format!("integral control needs k0 > 0 and k1 >= 0, got {k0}, {k1}")));
    }
    let e = single_integrator_control(rel, row)?;
    let accumulator = match state.last_term {
        Some(prev) => state.accumulator + (prev + e) * (0.5 * dt),
        None => state.accumulator,
    };
    Ok((e * k0 + accumulator * k1, IntegralState { accumulator, last_term: Some(e) }))
}

/// Measurements available to a chain agent.
#[derive(Debug, Clone, Default)]
pub struct ChainMeasurement {
    /// `rel[d]` holds `(j, q_j⁽ᵈ⁾ - q_i⁽ᵈ⁾)`; only `rel[0]` is needed with own-state damping.
    pub rel: Vec<Vec<(usize, Vec2)>>,
    /// Own derivatives `q_i⁽¹⁾ ... q_i⁽ᵐ⁾`.
    pub own: Vec<Vec2>,
}

pub fn higher_order_control(
    meas: &ChainMeasurement,
    row: &BlockRow,
    k: &[f64],
    variant: HigherOrderVariant,
) -> Result<Vec2, ControlError> {
    let m = k.len().checked_sub(1).ok_or_else(|| ControlError::Configuration("empty chain gain list".into()))?;
    let pos = meas.rel.first().ok_or(ControlError::MeasurementUnavailable)?;
    let mut u = single_integrator_control(pos, row)? * k[0];
    match variant {
        HigherOrderVariant::FullA => {
            if meas.rel.len() < m + 1 {
                return Err(ControlError::MeasurementUnavailable);
            }
            for d in 1..=m {
                u += single_integrator_control(&meas.rel[d], row)? * k[d];
            }
        }
        HigherOrderVariant::IdentityDerivatives => {
            if meas.own.len() < m {
                return Err(ControlError::Configuration(format!("expected {m} own derivatives, got {}", meas.own.len())));
            }
            for d in 1..=m {
                u -= meas.own[d - 1] * k[d];
            }
        }
    }
    Ok(u)
}

fn check_unit(h: Vec2) -> Result<(), ControlError> {
    let n = h.norm();
    if (n - 1.0).abs() > UNIT_TOLERANCE {
        return Err(ControlError::NotUnit(n));
    }
    Ok(())
}

/// `(hᵀu, h⊥ᵀu)`.
pub fn unicycle_control(h: Vec2, u: Vec2) -> Result<(f64, f64), ControlError> {
    check_unit(h)?;
    Ok((h.dot(&u), perp(h).dot(&u)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActuatorMode {
    #[default]
    Direct,
    VelocityFeedback,
}

/// Actuator inputs `(s, r)` for the dynamic unicycle.
pub fn unicycle_actuator_control(
    h: Vec2,
    u: Vec2,
    v_current: f64,
    mode: ActuatorMode,
    k_s: Option<f64>,
) -> Result<(f64, f64), ControlError> {
    let (along, across) = unicycle_control(h, u)?;
    match mode {
        ActuatorMode::Direct => Ok((along, across)),
        ActuatorMode::VelocityFeedback => {
            let ks = k_s.ok_or_else(|| ControlError::Configuration("velocity feedback requires k_s".into()))?;
            Ok((-ks * (v_current - along), across))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Drive {
    #[default]
    Front,
    Rear,
}

/// Below this `|cos φ|` the rear wheels cannot move the front axle and speed is masked to 0.
pub const REAR_MASK_COS: f64 = 1e-12;

/// `(v, ω)` from the steering direction `g`. Rear drive commands the rear-wheel speed
/// `cos φ · gᵀu`.
pub fn car_control(g: Vec2, u: Vec2, drive: Drive, phi: f64) -> Result<(f64, f64), ControlError> {
    let (along, across) = unicycle_control(g, u)?;
    let v = match drive {
        Drive::Front => along,
        Drive::Rear => {
            let c = phi.cos();
            if c.abs() < REAR_MASK_COS {
                0.0
            } else {
                c * along
            }
        }
    };
    Ok((v, across))
}

pub fn car_actuator_control(
    g: Vec2,
    u: Vec2,
    v_current: f64,
    mode: ActuatorMode,
    k_s: Option<f64>,
) -> Result<(f64, f64), ControlError> {
    unicycle_actuator_control(g, u, v_current, mode, k_s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScaleFunction {
    Atan,
    #[default]
    Tanh,
}

impl ScaleFunction {
    /// `(1/k_f) f(x)`.
    pub fn eval(self, x: f64, k_f: f64) -> f64 {
        match self {
            Self::Atan => x.atan() / k_f,
            Self::Tanh => x.tanh() / k_f,
        }
    }
}

/// Adds `f(d_ij - d*_ij) (q_j - q_i)` for every neighbor. `d_star` holds `(j, d*_ij)` pairs.
pub fn scale_augmented_control(
    rel: &[(usize, Vec2)],
    row: &BlockRow,
    d_star: &[(usize, f64)],
    f: ScaleFunction,
    k_f: f64,
) -> Result<Vec2, ControlError> {
    if !(k_f > 0.0) {
        return Err(ControlError::Configuration(format!("k_f must be positive, got {k_f}")));
    }
    let mut u = single_integrator_control(rel, row)?;
    for (j, d) in rel {
        let target = d_star
            .iter()
            .find(|(k, _)| k == j)
            .map(|(_, t)| *t)
            .ok_or(ControlError::MissingDistance { neighbor: *j })?;
        u += d * f.eval(d.norm() - target, k_f);
    }
    Ok(u)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Perturbation {
    pub c: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegralGains {
    pub k0: f64,
    pub k1: f64,
}

/// Desired distance between agents `i` and `j`, numbered from 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesiredDistance {
    pub i: usize,
    pub j: usize,
    pub d: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScaleConfig {
    #[serde(default)]
    pub f_kind: ScaleFunction,
    #[serde(default = "one")]
    pub k_f: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub distances: Vec<DesiredDistance>,
    /// Edges without an explicit entry use this multiple of their length in `q*`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub formation_scale: Option<f64>,
}

fn one() -> f64 {
    1.0
}

impl ScaleConfig {
    /// Desired distance for zero-based agents `i`, `j`, given the desired coordinates.
    pub fn distance(&self, i: usize, j: usize, desired: &[Vec2]) -> Option<f64> {
        let (a, b) = (i + 1, j + 1);
        self.distances
            .iter()
            .find(|r| (r.i == a && r.j == b) || (r.i == b && r.j == a))
            .map(|r| r.d)
            .or_else(|| Some(self.formation_scale? * (desired.get(i)? - desired.get(j)?).norm()))
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ControllerConfig {
    pub u_max: Option<f64>,
    pub v_max: Option<f64>,
    pub omega_max: Option<f64>,
    pub phi_max: Option<f64>,
    /// `k_0 ... k_m` for chain agents.
    pub k_chain: Vec<f64>,
    pub chain_variant: HigherOrderVariant,
    pub integral: Option<IntegralGains>,
    pub actuator_mode: ActuatorMode,
    pub k_s: Option<f64>,
    pub scale: Option<ScaleConfig>,
    /// One entry per agent.
    pub perturbation: Option<Vec<Perturbation>>,
}

impl ControllerConfig {
    pub fn validate(&self, n: usize) -> Result<(), ControlError> {
        let cfg = |m: String| Err(ControlError::Configuration(m));
        for (name, v) in [("u_max", self.u_max), ("v_max", self.v_max), ("omega_max", self.omega_max), ("phi_max", self.phi_max)] {
            if v.is_some_and(|x| !(x > 0.0)) {
                return cfg(format!("{name} must be positive"));
            }
        }
        if let Some(p) = &self.perturbation {
            if p.len() != n {
                return cfg(format!("perturbation needs {n} entries, got {}", p.len()));
            }
            for q in p {
                perturb_control(Vec2::zeros(), q.c, q.alpha)?;
            }
        }
        if let Some(ig) = self.integral {
            if !(ig.k0 > 0.0) || !(ig.k1 >= 0.0) {
                return Err(ControlError::GuaranteeViolation("integral control needs k0 > 0 and k1 >= 0".into()));
            }
        }
        if self.actuator_mode == ActuatorMode::VelocityFeedback && self.k_s.is_none() {
            return cfg("velocity feedback requires k_s".into());
        }
        if let Some(s) = &self.scale {
            if !(s.k_f > 0.0) {
                return cfg("k_f must be positive".into());
            }
            if s.formation_scale.is_some_and(|x| !(x > 0.0)) || s.distances.iter().any(|r| !(r.d >= 0.0)) {
                return cfg("desired distances must be non-negative and formation_scale positive".into());
            }
        }
        Ok(())
    }
}
