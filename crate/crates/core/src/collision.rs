//! Collision cones and the minimal rotation of a control vector out of them.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::control::rotate;
use crate::formation::Vec2;

/// Angular slack when testing a direction against a cone boundary.
const ANGLE_EPS: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("avoidance needs d_c > r > 0, got r = {r}, d_c = {d_c}")]
pub struct AvoidanceConfigError {
    pub r: f64,
    pub d_c: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AvoidanceConfig {
    /// Collision radius.
    pub r: f64,
    /// Activation distance.
    pub d_c: f64,
}

impl AvoidanceConfig {
    pub fn new(r: f64, d_c: f64) -> Result<Self, AvoidanceConfigError> {
        let cfg = Self { r, d_c };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), AvoidanceConfigError> {
        if self.r > 0.0 && self.d_c > self.r && self.d_c.is_finite() {
            Ok(())
        } else {
            Err(AvoidanceConfigError { r: self.r, d_c: self.d_c })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollisionCone {
    pub apex: Vec2,
    pub center_dir: Vec2,
    /// `asin(r/d)`, or `π/2` when the neighbor is already within `r`.
    pub half_angle: f64,
}

impl CollisionCone {
    fn center_angle(&self) -> f64 {
        self.center_dir.y.atan2(self.center_dir.x)
    }

    /// Signed angle from the cone axis to `dir`, in `(-π, π]`.
    fn offset(&self, dir_angle: f64) -> f64 {
        wrap(dir_angle - self.center_angle())
    }

    /// True when `dir_angle` lies strictly inside the cone.
    pub fn contains_angle(&self, dir_angle: f64) -> bool {
        self.offset(dir_angle).abs() < self.half_angle - ANGLE_EPS
    }

    /// `|offset| - half_angle`; non-negative outside the cone.
    pub fn margin(&self, dir: Vec2) -> f64 {
        self.offset(dir.y.atan2(dir.x)).abs() - self.half_angle
    }
}

/// Angle in `(-π, π]`.
pub fn wrap(a: f64) -> f64 {
    let mut x = a.rem_euclid(TAU);
    if x > PI {
        x -= TAU;
    }
    x
}

/// One cone per neighbor within `d_c` (inclusive). A neighbor closer than `r` blocks the
/// whole half-plane facing it; a coincident neighbor has no direction and is skipped.
pub fn build_cones(p_i: Vec2, neighbors: &[Vec2], cfg: &AvoidanceConfig) -> Vec<CollisionCone> {
    neighbors
        .iter()
        .filter_map(|&p| {
            let d_vec = p - p_i;
            let d = d_vec.norm();
            if d == 0.0 || d > cfg.d_c {
                return None;
            }
            let half_angle = if d <= cfg.r { FRAC_PI_2 } else { (cfg.r / d).asin() };
            Some(CollisionCone { apex: p_i, center_dir: d_vec / d, half_angle })
        })
        .collect()
}

/// Result of the rotation search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Adjustment {
    /// `u` is already clear of every cone.
    Unchanged,
    Rotate(f64),
    Stop,
}

impl Adjustment {
    pub fn apply(self, u: Vec2) -> Vec2 {
        match self {
            Self::Unchanged => u,
            Self::Rotate(theta) => rotate(u, theta),
            Self::Stop => Vec2::zeros(),
        }
    }
}

/// Smallest `|θ| < π/2` that takes `u` outside every cone; ties go counterclockwise.
pub fn plan_adjustment(u: Vec2, cones: &[CollisionCone]) -> Adjustment {
    if u == Vec2::zeros() {
        return Adjustment::Unchanged;
    }
    let base = u.y.atan2(u.x);
    if !cones.iter().any(|c| c.contains_angle(base)) {
        return Adjustment::Unchanged;
    }
    let mut best: Option<f64> = None;
    for cone in cones {
        let c = cone.center_angle();
        for edge in [c + cone.half_angle, c - cone.half_angle] {
            let theta = wrap(edge - base);
            if theta.abs() >= FRAC_PI_2 {
                continue;
            }
            if cones.iter().any(|k| k.contains_angle(base + theta)) {
                continue;
            }
            best = match best {
                None => Some(theta),
                Some(b) if theta.abs() < b.abs() - ANGLE_EPS => Some(theta),
                Some(b) if (theta.abs() - b.abs()).abs() <= ANGLE_EPS && theta > b => Some(theta),
                keep => keep,
            };
        }
    }
    best.map_or(Adjustment::Stop, Adjustment::Rotate)
}

/// True when moving along `v` leads into one of the cones.
pub fn heading_blocked(v: Vec2, cones: &[CollisionCone]) -> bool {
    v != Vec2::zeros() && cones.iter().any(|c| c.contains_angle(v.y.atan2(v.x)))
}

pub fn adjust_control(u: Vec2, cones: &[CollisionCone]) -> Vec2 {
    plan_adjustment(u, cones).apply(u)
}
