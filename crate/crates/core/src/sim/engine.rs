//! Fixed-step RK4 closed loop.
//!
//! Decisions that switch discontinuously (active topology, avoidance rotation or stop,
//! norm-saturation factor, measurement noise, integral accumulator) are taken once at the
//! start of each step and held through the four stages, so each step integrates a smooth
//! vector field.

use std::time::Instant;

use nalgebra::Matrix2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::collision::{build_cones, heading_blocked, plan_adjustment, wrap, Adjustment, AvoidanceConfig};
use crate::control::{
    car_actuator_control, car_control, higher_order_control, integral_control, perturb_control, rotate,
    saturate_scalar, saturation_factor, scale_augmented_control, single_integrator_control, unicycle_actuator_control,
    unicycle_control, ChainMeasurement, IntegralState,
};
use crate::dynamics::{
    deriv_car, deriv_unicycle, heading, ActuatorParams, CarGeometry, CarState, Saturation, UnicycleState,
};
use crate::formation::{build_kernel_basis, metrics, KernelBasis, Vec2};
use crate::gains::{verify_gains, verify_higher_order_gains, GainMatrix, HigherOrderVariant};

use super::log::{positions, stacked_positions, RunSummary, StateLayout, StepRecord, TrajectoryLog};
use super::monitor::{lyapunov_monitor, LyapunovKind};
use super::scenario::{ActuatorSpec, InitialPositions, ModelKind, Scenario};
use super::SimError;

type Row = Vec<(usize, Matrix2<f64>)>;

/// Cones are planned with the radius moved this fraction of the way from `r` toward `d_c`.
/// Each agent treats the others as static, so their simultaneous motion eats into the
/// clearance; the margin absorbs that.
const AVOIDANCE_MARGIN: f64 = 0.1;

/// Pole of the braking law used by chain agents whose velocity points into a collision cone.
const BRAKE_POLE: f64 = 10.0;

/// `u = -Σ c_d q⁽ᵈ⁾` with `s^m + c_m s^(m-1) + ... + c_1 = (s + p)^m`, which drives the
/// velocity of an order-`m` chain to rest.
fn braking_command(own: &[Vec2], pole: f64) -> Vec2 {
    let m = own.len();
    let mut binom = 1.0;
    let mut u = Vec2::zeros();
    // Coefficient of s^(d-1) in (s + p)^m is C(m, d-1) p^(m-d+1).
    for d in 1..=m {
        u -= own[d - 1] * (binom * pole.powi((m - d + 1) as i32));
        binom = binom * (m - d + 1) as f64 / d as f64;
    }
    u
}

/// Values held constant over one step.
struct StepContext {
    topology: usize,
    adjust: Vec<Adjustment>,
    /// Chain agents whose derivative feedback is replaced by the braking law this step.
    brake: Vec<bool>,
    sigma: Vec<f64>,
    integral: Vec<Vec2>,
    /// `noise[i][j]`, in agent `i`'s frame.
    noise: Option<Vec<Vec<Vec2>>>,
}

struct Plant<'a> {
    sc: &'a Scenario,
    n: usize,
    layout: StateLayout,
    stride: usize,
    rows: Vec<Vec<Row>>,
    /// `scale_d[topology][i]` = `(j, d*_ij)`.
    scale_d: Vec<Vec<Vec<(usize, f64)>>>,
    /// Fixed frame rotation for holonomic agents.
    frames: Vec<f64>,
    actuators: Option<Vec<ActuatorParams>>,
    sat: Saturation,
    geom: CarGeometry,
}

/// Frame angle, consensus-level command in that frame, and the other agents' positions
/// in that frame.
struct Local {
    beta: f64,
    u: Vec2,
}

impl<'a> Plant<'a> {
    fn pos(&self, x: &[f64], i: usize) -> Vec2 {
        Vec2::new(x[i * self.stride], x[i * self.stride + 1])
    }

    fn frame(&self, x: &[f64], i: usize) -> f64 {
        if !self.sc.sim.local_frames {
            return 0.0;
        }
        let a = &x[i * self.stride..];
        match self.layout.model {
            ModelKind::SingleIntegrator | ModelKind::Chain => self.frames[i],
            ModelKind::Unicycle => a[2],
            ModelKind::Car => a[2] + a[3],
        }
    }

    fn to_local(&self, v: Vec2, beta: f64) -> Vec2 {
        if beta == 0.0 {
            v
        } else {
            rotate(v, -beta)
        }
    }

    fn to_global(&self, v: Vec2, beta: f64) -> Vec2 {
        if beta == 0.0 {
            v
        } else {
            rotate(v, beta)
        }
    }

    /// Relative positions of the sensed neighbors, in the agent's frame.
    fn measure(&self, x: &[f64], i: usize, beta: f64, ctx: &StepContext) -> Vec<(usize, Vec2)> {
        let qi = self.pos(x, i);
        self.rows[ctx.topology][i]
            .iter()
            .map(|&(j, _)| {
                let mut d = self.to_local(self.pos(x, j) - qi, beta);
                if let Some(noise) = &ctx.noise {
                    d += noise[i][j];
                }
                (j, d)
            })
            .collect()
    }

    /// Position-feedback command before avoidance and saturation.
    fn consensus(&self, x: &[f64], i: usize, ctx: &StepContext) -> Result<Local, SimError> {
        let beta = self.frame(x, i);
        let rel = self.measure(x, i, beta, ctx);
        let row = &self.rows[ctx.topology][i];
        let c = &self.sc.controller;
        let mut u = if let Some(sc) = &c.scale {
            scale_augmented_control(&rel, row, &self.scale_d[ctx.topology][i], sc.f_kind, sc.k_f)?
        } else if let Some(ig) = c.integral {
            single_integrator_control(&rel, row)? * ig.k0 + ctx.integral[i] * ig.k1
        } else {
            single_integrator_control(&rel, row)?
        };
        if self.layout.model == ModelKind::Chain {
            u *= c.k_chain[0];
        }
        if let Some(p) = &c.perturbation {
            u = perturb_control(u, p[i].c, p[i].alpha)?;
        }
        Ok(Local { beta, u })
    }

    fn shaped(&self, x: &[f64], i: usize, ctx: &StepContext) -> Result<Local, SimError> {
        let mut l = self.consensus(x, i, ctx)?;
        l.u = ctx.adjust[i].apply(l.u);
        if ctx.sigma[i] != 1.0 {
            l.u *= ctx.sigma[i];
        }
        Ok(l)
    }

    /// Chain feedback beyond the position term.
    fn chain_rest(&self, x: &[f64], i: usize, beta: f64, ctx: &StepContext) -> Result<Vec2, SimError> {
        let c = &self.sc.controller;
        let m = self.layout.order;
        let base = i * self.stride;
        let own: Vec<Vec2> = (1..=m)
            .map(|d| self.to_local(Vec2::new(x[base + 2 * d], x[base + 2 * d + 1]), beta))
            .collect();
        let mut rel = vec![vec![]; m + 1];
        if c.chain_variant == HigherOrderVariant::FullA {
            for (d, slot) in rel.iter_mut().enumerate().skip(1) {
                *slot = self.rows[ctx.topology][i]
                    .iter()
                    .map(|&(j, _)| {
                        let bj = j * self.stride + 2 * d;
                        let dj = Vec2::new(x[bj], x[bj + 1]);
                        (j, self.to_local(dj - own_global(x, base, d), beta))
                    })
                    .collect();
            }
        }
        let mut k = c.k_chain.clone();
        k[0] = 0.0;
        let meas = ChainMeasurement { rel, own };
        Ok(higher_order_control(&meas, &self.rows[ctx.topology][i], &k, c.chain_variant)?)
    }

    /// Writes agent `i`'s state derivative into `out` and returns its applied command.
    fn agent(&self, x: &[f64], i: usize, ctx: &StepContext, out: &mut [f64]) -> Result<[f64; 2], SimError> {
        let l = self.shaped(x, i, ctx)?;
        let a = &x[i * self.stride..(i + 1) * self.stride];
        let c = &self.sc.controller;
        let local = self.sc.sim.local_frames;
        let dist = |i: usize| self.sc.agents.disturbance.as_ref().map_or(Vec2::zeros(), |d| d[i]);
        match self.layout.model {
            ModelKind::SingleIntegrator => {
                let u = self.to_global(l.u, l.beta);
                let q = u + dist(i);
                out[0] = q.x;
                out[1] = q.y;
                Ok([u.x, u.y])
            }
            ModelKind::Chain => {
                let u = if ctx.brake[i] {
                    let m = self.layout.order;
                    let own: Vec<Vec2> = (1..=m).map(|d| own_global(x, i * self.stride, d)).collect();
                    // The adjusted position term stays on so a braked agent creeps along a free
                    // direction instead of stalling.
                    self.to_global(l.u, l.beta) + braking_command(&own, BRAKE_POLE)
                } else {
                    self.to_global(l.u + self.chain_rest(x, i, l.beta, ctx)?, l.beta)
                };
                let top = u + dist(i);
                let m = self.layout.order;
                out[..2 * m].copy_from_slice(&a[2..2 * (m + 1)]);
                out[2 * m] = top.x;
                out[2 * m + 1] = top.y;
                Ok([u.x, u.y])
            }
            ModelKind::Unicycle => {
                let st = UnicycleState {
                    q: Vec2::new(a[0], a[1]),
                    theta: a[2],
                    v: a.get(3).copied().unwrap_or(0.0),
                    omega: a.get(4).copied().unwrap_or(0.0),
                };
                let h = if local { Vec2::new(1.0, 0.0) } else { heading(st.theta) };
                let params = self.actuators.as_ref().map(|p| &p[i]);
                let inputs = match params {
                    None => unicycle_control(h, l.u)?,
                    Some(_) => unicycle_actuator_control(h, l.u, st.v, c.actuator_mode, c.k_s)?,
                };
                let d = deriv_unicycle(&st, inputs, params, self.sat);
                out[0] = d.q.x;
                out[1] = d.q.y;
                out[2] = d.theta;
                if params.is_some() {
                    out[3] = d.v;
                    out[4] = d.omega;
                }
                Ok([saturate_scalar(inputs.0, self.sat.v_max), saturate_scalar(inputs.1, self.sat.omega_max)])
            }
            ModelKind::Car => {
                let st = CarState {
                    q: Vec2::new(a[0], a[1]),
                    theta: a[2],
                    phi: a[3],
                    v: a.get(4).copied().unwrap_or(0.0),
                    omega: a.get(5).copied().unwrap_or(0.0),
                };
                let g = if local { Vec2::new(1.0, 0.0) } else { heading(st.theta + st.phi) };
                let params = self.actuators.as_ref().map(|p| &p[i]);
                let inputs = match params {
                    None => car_control(g, l.u, self.geom.drive, st.phi)?,
                    Some(_) => car_actuator_control(g, l.u, st.v, c.actuator_mode, c.k_s)?,
                };
                let d = deriv_car(&st, inputs, params, self.sat, &self.geom)?;
                out[0] = d.q.x;
                out[1] = d.q.y;
                out[2] = d.theta;
                out[3] = d.phi;
                if params.is_some() {
                    out[4] = d.v;
                    out[5] = d.omega;
                }
                Ok([saturate_scalar(inputs.0, self.sat.v_max), saturate_scalar(inputs.1, self.sat.omega_max)])
            }
        }
    }

    fn field(&self, x: &[f64], ctx: &StepContext, out: &mut [f64], commands: Option<&mut Vec<f64>>) -> Result<(), SimError> {
        let mut cmds = Vec::new();
        for i in 0..self.n {
            let c = self.agent(x, i, ctx, &mut out[i * self.stride..(i + 1) * self.stride])?;
            cmds.extend(c);
        }
        if let Some(c) = commands {
            *c = cmds;
        }
        Ok(())
    }

    /// Freezes the discontinuous decisions at the start of a step.
    fn context(
        &self,
        x: &[f64],
        topology: usize,
        integral: &mut [IntegralState],
        rng: &mut ChaCha8Rng,
    ) -> Result<(StepContext, Flags), SimError> {
        let n = self.n;
        let noise = self.sc.sim.noise.filter(|a| *a > 0.0).map(|amp| {
            (0..n)
                .map(|_| (0..n).map(|_| Vec2::new(rng.random_range(-amp..=amp), rng.random_range(-amp..=amp))).collect())
                .collect()
        });
        let mut ctx = StepContext {
            topology,
            adjust: vec![Adjustment::Unchanged; n],
            brake: vec![false; n],
            sigma: vec![1.0; n],
            integral: vec![Vec2::zeros(); n],
            noise,
        };
        if let Some(ig) = self.sc.controller.integral {
            for i in 0..n {
                let beta = self.frame(x, i);
                let rel = self.measure(x, i, beta, &ctx);
                let (_, st) = integral_control(&rel, &self.rows[topology][i], integral[i], self.sc.sim.dt, ig.k0, ig.k1)?;
                integral[i] = st;
                ctx.integral[i] = st.accumulator;
            }
        }
        let mut flags = Flags::default();
        let nonholonomic = self.layout.model.is_nonholonomic();
        for i in 0..n {
            let l = self.consensus(x, i, &ctx)?;
            let mut u = l.u;
            if let Some(av) = &self.sc.avoidance {
                let qi = self.pos(x, i);
                let others: Vec<Vec2> =
                    (0..n).filter(|&j| j != i).map(|j| self.to_local(self.pos(x, j) - qi, l.beta)).collect();
                let planning = AvoidanceConfig { r: av.r + AVOIDANCE_MARGIN * (av.d_c - av.r), d_c: av.d_c };
                let cones = build_cones(Vec2::zeros(), &others, &planning);
                let adj = plan_adjustment(u, &cones);
                let changed = adj != Adjustment::Unchanged;
                flags.intervened |= changed;
                flags.uncovered |= changed && nonholonomic;
                if let (Adjustment::Rotate(theta), Some(p)) = (adj, &self.sc.controller.perturbation) {
                    // Rotations stack: the command may leave the open half-plane of the nominal one.
                    flags.uncovered |= wrap(theta + p[i].alpha).abs() >= std::f64::consts::FRAC_PI_2;
                }
                if self.layout.model == ModelKind::Chain {
                    let v = self.to_local(own_global(x, i * self.stride, 1), l.beta);
                    ctx.brake[i] = heading_blocked(v, &cones);
                    flags.intervened |= ctx.brake[i];
                }
                ctx.adjust[i] = adj;
                u = adj.apply(u);
            }
            if let Some(u_max) = self.sc.controller.u_max {
                ctx.sigma[i] = saturation_factor(u, u_max);
            }
        }
        Ok((ctx, flags))
    }
}

#[derive(Default)]
struct Flags {
    intervened: bool,
    uncovered: bool,
}

fn own_global(x: &[f64], base: usize, d: usize) -> Vec2 {
    Vec2::new(x[base + 2 * d], x[base + 2 * d + 1])
}

/// Initial state, fixed-frame angles and actuator parameters.
type InitialConditions = (Vec<f64>, Vec<f64>, Option<Vec<ActuatorParams>>);

/// Draws the initial conditions, in the order of [`InitialConditions`].
fn initial_conditions(
    sc: &Scenario,
    layout: &StateLayout,
    rng: &mut ChaCha8Rng,
) -> Result<InitialConditions, SimError> {
    let n = sc.n();
    let init = &sc.sim.initial;
    let min_sep = init.min_separation.or(sc.avoidance.map(|a| a.r)).unwrap_or(0.0);
    let pts = match &init.positions {
        InitialPositions::Explicit(p) => p.clone(),
        InitialPositions::UniformBox { low, high } => {
            let mut attempt = 0;
            loop {
                let p: Vec<Vec2> =
                    (0..n).map(|_| Vec2::new(rng.random_range(*low..*high), rng.random_range(*low..*high))).collect();
                if crate::formation::min_pairwise_distance(&p) > min_sep {
                    break p;
                }
                attempt += 1;
                if attempt == 10_000 {
                    return Err(SimError::Config(format!(
                        "could not place {n} agents {min_sep} apart in the initial box"
                    )));
                }
            }
        }
    };
    let headings: Vec<f64> = match (&init.headings, layout.model.is_nonholonomic()) {
        (Some(h), _) => h.clone(),
        (None, true) => (0..n).map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI)).collect(),
        (None, false) => vec![0.0; n],
    };
    let steering = init.steering.clone().unwrap_or_else(|| vec![0.0; n]);
    let frames: Vec<f64> = (0..n).map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI)).collect();
    let actuators = if sc.agents.dynamic {
        Some(match &sc.agents.actuators {
            Some(ActuatorSpec::Explicit(p)) => p.clone(),
            Some(ActuatorSpec::Uniform { low, high }) => (0..n)
                .map(|_| {
                    let mut draw = || if low == high { *low } else { rng.random_range(*low..*high) };
                    ActuatorParams { a: draw(), b: draw(), c: draw(), d: draw() }
                })
                .collect(),
            None => return Err(SimError::Config("dynamic agents need actuator parameters".into())),
        })
    } else {
        None
    };

    let stride = layout.stride();
    let mut x = vec![0.0; n * stride];
    for i in 0..n {
        let a = &mut x[i * stride..(i + 1) * stride];
        a[0] = pts[i].x;
        a[1] = pts[i].y;
        match layout.model {
            ModelKind::Unicycle => a[2] = headings[i],
            ModelKind::Car => {
                a[2] = headings[i];
                a[3] = steering[i];
            }
            _ => {}
        }
    }
    Ok((x, frames, actuators))
}

/// Which monotone function the configuration supports.
pub fn lyapunov_kind(sc: &Scenario) -> LyapunovKind {
    let c = &sc.controller;
    let plain = c.scale.is_none()
        && c.integral.is_none_or(|ig| ig.k1 == 0.0)
        && sc.sim.noise.is_none_or(|a| a == 0.0)
        && sc.agents.disturbance.is_none();
    if !plain {
        return LyapunovKind::NotApplicable;
    }
    match (sc.agents.model, sc.agents.dynamic) {
        (ModelKind::Chain, _) => LyapunovKind::NotApplicable,
        (ModelKind::Car, true) if sc.agents.drive == crate::control::Drive::Rear => LyapunovKind::NotApplicable,
        (_, true) if c.actuator_mode == crate::control::ActuatorMode::Direct => LyapunovKind::Composite,
        (_, true) => LyapunovKind::NotApplicable,
        _ => LyapunovKind::Position,
    }
}

/// Checks that every gain matches its topology, passes the spectrum test and, for chains,
/// yields a Hurwitz closed loop.
pub fn check_guarantees(sc: &Scenario, gains: &[GainMatrix], basis: &KernelBasis) -> Result<(), SimError> {
    if gains.len() != sc.topologies.len() {
        return Err(SimError::GainCount { expected: sc.topologies.len(), got: gains.len() });
    }
    for (k, (g, t)) in gains.iter().zip(&sc.topologies).enumerate() {
        if g.graph() != &t.graph {
            return Err(SimError::TopologyMismatch { topology: t.name.clone() });
        }
        let report = verify_gains(g, basis, sc.solver.zero_tolerance)?;
        if !report.pass {
            return Err(SimError::Guarantee(format!(
                "gains for topology {} fail the spectrum check (zero count {}, kernel residual {:.3e})",
                sc.topologies[k].name, report.zero_count, report.kernel_residual
            )));
        }
        if sc.agents.model == ModelKind::Chain {
            let h = verify_higher_order_gains(&report.nonzero_eigenvalues(), &sc.controller.k_chain, sc.controller.chain_variant)?;
            if !h.pass {
                return Err(SimError::Hurwitz {
                    topology: sc.topologies[k].name.clone(),
                    mu: h.worst_mu,
                    max_real_part: h.max_real_part,
                });
            }
        }
    }
    Ok(())
}

/// Runs the closed loop. The result depends only on `(scenario, gains)`; repeated runs give
/// bitwise-identical records.
pub fn run(sc: &Scenario, gains: &[GainMatrix]) -> Result<TrajectoryLog, SimError> {
    let started = Instant::now();
    sc.validate()?;
    let spec = sc.formation()?;
    let basis = build_kernel_basis(&spec)?;
    check_guarantees(sc, gains, &basis)?;

    let n = sc.n();
    let layout = StateLayout { model: sc.agents.model, dynamic: sc.agents.dynamic, order: sc.chain_order() };
    let stride = layout.stride();
    let mut rng = ChaCha8Rng::seed_from_u64(sc.sim.seed);
    let (mut x, frames, actuators) = initial_conditions(sc, &layout, &mut rng)?;

    let rows: Vec<Vec<Row>> = gains.iter().map(|g| (0..n).map(|i| g.block_row(i)).collect()).collect();
    let scale_d = match &sc.controller.scale {
        Some(s) => rows
            .iter()
            .map(|tr| {
                tr.iter()
                    .enumerate()
                    .map(|(i, row)| row.iter().map(|&(j, _)| (j, s.distance(i, j, &sc.points).unwrap_or(0.0))).collect())
                    .collect()
            })
            .collect(),
        None => vec![vec![vec![]; n]; gains.len()],
    };
    let plant = Plant {
        sc,
        n,
        layout,
        stride,
        rows,
        scale_d,
        frames,
        actuators: actuators.clone(),
        sat: Saturation { v_max: sc.controller.v_max, omega_max: sc.controller.omega_max },
        geom: CarGeometry { wheelbase: sc.agents.wheelbase, drive: sc.agents.drive, phi_max: sc.controller.phi_max },
    };

    let dt = sc.sim.dt;
    let steps = sc.sim.steps();
    let dim = x.len();
    let mut integral = vec![IntegralState::default(); n];
    let mut records: Vec<StepRecord> = Vec::with_capacity(steps + 1);
    let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; dim], vec![0.0; dim], vec![0.0; dim], vec![0.0; dim]);
    let mut tmp = vec![0.0; dim];
    let mut below_since: Option<f64> = None;
    let mut converged_at = None;
    let mut avoidance_steps = 0;

    for k in 0..=steps {
        let t = k as f64 * dt;
        let topology = sc.schedule.active(t)?;
        let (ctx, flags) = plant.context(&x, topology, &mut integral, &mut rng)?;
        let mut commands = Vec::new();
        plant.field(&x, &ctx, &mut k1, Some(&mut commands))?;
        let q = stacked_positions(&x, stride);
        let m = metrics(&q, gains[topology].dense(), &basis);
        if flags.intervened {
            avoidance_steps += 1;
        }
        records.push(StepRecord {
            t,
            topology,
            state: x.clone(),
            commands,
            metrics: m,
            intervened: flags.intervened,
            uncovered: flags.uncovered,
        });

        if m.subspace_error < sc.sim.convergence_threshold {
            let since = *below_since.get_or_insert(t);
            if converged_at.is_none() && t - since >= sc.sim.sustain - 1e-9 {
                converged_at = Some(since);
            }
        } else {
            below_since = None;
            converged_at = None;
        }
        if k == steps || (sc.sim.stop_on_convergence && converged_at.is_some()) {
            break;
        }

        for s in 0..dim {
            tmp[s] = x[s] + 0.5 * dt * k1[s];
        }
        plant.field(&tmp, &ctx, &mut k2, None)?;
        for s in 0..dim {
            tmp[s] = x[s] + 0.5 * dt * k2[s];
        }
        plant.field(&tmp, &ctx, &mut k3, None)?;
        for s in 0..dim {
            tmp[s] = x[s] + dt * k3[s];
        }
        plant.field(&tmp, &ctx, &mut k4, None)?;
        for s in 0..dim {
            x[s] += dt / 6.0 * (k1[s] + 2.0 * k2[s] + 2.0 * k3[s] + k4[s]);
        }
        if let (ModelKind::Car, Some(b)) = (layout.model, sc.controller.phi_max) {
            for i in 0..n {
                let phi = &mut x[i * stride + 3];
                *phi = phi.clamp(-b, b);
            }
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(SimError::Diverged { t: t + dt });
        }
    }

    let last = records.last().expect("at least one record");
    let final_subspace_error = last.metrics.subspace_error;
    let min_distance = records.iter().map(|r| r.metrics.min_pairwise_distance).fold(f64::INFINITY, f64::min);
    let mut log = TrajectoryLog {
        seed: sc.sim.seed,
        n,
        dt,
        layout,
        actuators,
        records,
        summary: RunSummary {
            final_subspace_error,
            min_distance,
            converged_at,
            lyapunov: super::LyapunovReport::not_applicable(),
            avoidance_steps,
            wall_clock_seconds: 0.0,
        },
    };
    log.summary.lyapunov = lyapunov_monitor(&log, gains, lyapunov_kind(sc));
    log.summary.wall_clock_seconds = started.elapsed().as_secs_f64();
    Ok(log)
}

/// Positions at the first record, for plotting.
pub fn initial_positions(log: &TrajectoryLog) -> Vec<Vec2> {
    positions(&log.records[0].state, log.layout.stride())
}
