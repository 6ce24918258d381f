//! Agent vector fields. Headings are stored as angles, so reconstructed unit vectors stay
//! exactly unit length under integration.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::control::{saturate_scalar, Drive, REAR_MASK_COS};
use crate::formation::Vec2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("chain state has order {got}, expected {expected}")]
    OrderMismatch { expected: usize, got: usize },
    #[error("wheelbase must be positive, got {0}")]
    Wheelbase(f64),
}

/// `(cos θ, sin θ)`.
pub fn heading(theta: f64) -> Vec2 {
    let (s, c) = theta.sin_cos();
    Vec2::new(c, s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActuatorParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

/// Command bounds for nonholonomic agents.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Saturation {
    pub v_max: Option<f64>,
    pub omega_max: Option<f64>,
}

/// `q̇ = u`.
pub fn deriv_single_integrator(u: Vec2) -> Vec2 {
    u
}

/// `d/dt q⁽ʲ⁾ = q⁽ʲ⁺¹⁾` for `j < m`, `d/dt q⁽ᵐ⁾ = u`. `state` holds `q, q', ..., q⁽ᵐ⁾`.
pub fn deriv_chain(state: &[Vec2], u: Vec2, m: usize) -> Result<Vec<Vec2>, DynamicsError> {
    if state.len() != m + 1 {
        return Err(DynamicsError::OrderMismatch { expected: m, got: state.len().saturating_sub(1) });
    }
    let mut d: Vec<Vec2> = state[1..].to_vec();
    d.push(u);
    Ok(d)
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct UnicycleState {
    pub q: Vec2,
    pub theta: f64,
    pub v: f64,
    pub omega: f64,
}

/// Kinematic (`params = None`): inputs are `(v, ω)`, saturated and applied directly.
/// Dynamic: inputs are `(s, r)`, saturated, driving `v̇ = -a v + b s`, `ω̇ = -c ω + d r`.
pub fn deriv_unicycle(
    state: &UnicycleState,
    inputs: (f64, f64),
    params: Option<&ActuatorParams>,
    sat: Saturation,
) -> UnicycleState {
    let first = saturate_scalar(inputs.0, sat.v_max);
    let second = saturate_scalar(inputs.1, sat.omega_max);
    match params {
        None => UnicycleState { q: heading(state.theta) * first, theta: second, v: 0.0, omega: 0.0 },
        Some(p) => UnicycleState {
            q: heading(state.theta) * state.v,
            theta: state.omega,
            v: -p.a * state.v + p.b * first,
            omega: -p.c * state.omega + p.d * second,
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CarState {
    /// Front-axle center.
    pub q: Vec2,
    pub theta: f64,
    pub phi: f64,
    /// Driving speed: front-wheel speed for front drive, rear-wheel speed for rear drive.
    pub v: f64,
    pub omega: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CarGeometry {
    pub wheelbase: f64,
    pub drive: Drive,
    pub phi_max: Option<f64>,
}

/// Front-axle speed for a driving speed `v`. Rear drive divides by `cos φ` and is masked
/// to zero where the steering is perpendicular to the body.
pub fn front_speed(v: f64, phi: f64, drive: Drive) -> f64 {
    match drive {
        Drive::Front => v,
        Drive::Rear => {
            let c = phi.cos();
            if c.abs() < REAR_MASK_COS {
                0.0
            } else {
                v / c
            }
        }
    }
}

/// Zeroes a steering rate that would push `φ` past the bound.
pub fn clamp_steering_rate(phi: f64, rate: f64, phi_max: Option<f64>) -> f64 {
    match phi_max {
        Some(b) if (phi >= b && rate > 0.0) || (phi <= -b && rate < 0.0) => 0.0,
        _ => rate,
    }
}

/// `ẋ = v cos(θ+φ)`, `ẏ = v sin(θ+φ)`, `θ̇ = (v/l) sin φ`, `φ̇ = ω`, plus actuator states
/// when `params` is given.
pub fn deriv_car(
    state: &CarState,
    inputs: (f64, f64),
    params: Option<&ActuatorParams>,
    sat: Saturation,
    geom: &CarGeometry,
) -> Result<CarState, DynamicsError> {
    if !(geom.wheelbase > 0.0) {
        return Err(DynamicsError::Wheelbase(geom.wheelbase));
    }
    let first = saturate_scalar(inputs.0, sat.v_max);
    let second = saturate_scalar(inputs.1, sat.omega_max);
    let (drive_speed, steer_rate) = match params {
        None => (first, second),
        Some(_) => (state.v, state.omega),
    };
    let v = front_speed(drive_speed, state.phi, geom.drive);
    let mut d = CarState {
        q: heading(state.theta + state.phi) * v,
        theta: v / geom.wheelbase * state.phi.sin(),
        phi: clamp_steering_rate(state.phi, steer_rate, geom.phi_max),
        v: 0.0,
        omega: 0.0,
    };
    if let Some(p) = params {
        d.v = -p.a * state.v + p.b * first;
        d.omega = -p.c * state.omega + p.d * second;
    }
    Ok(d)
}

/// The same vector field written with `δ = θ + φ`: `δ̇ = (v/l) sin(δ - θ) + ω`.
/// Returns `(ẋ, ẏ, θ̇, δ̇)` for a kinematic front-drive car.
pub fn deriv_car_steering_form(q_theta_delta: (Vec2, f64, f64), v: f64, omega: f64, l: f64) -> (Vec2, f64, f64) {
    let (_, theta, delta) = q_theta_delta;
    let theta_dot = v / l * (delta - theta).sin();
    (heading(delta) * v, theta_dot, theta_dot + omega)
}
