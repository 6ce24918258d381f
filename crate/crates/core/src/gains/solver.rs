//! Gain design as an eigenvalue optimization over the free edge parameters.
//!
//! Every admissible gain vector is `x = B y`, where the columns of `B` span the null
//! space of the linear constraints `A q* = 0` (two rows per agent) and `Σ_j b_ij = 0`
//! (one row per agent, needed for `A = Aᵀ`). The reduced matrix is then linear in `y`:
//! `Ā(y) = Σ_k y_k G_k`, and the design problem reads
//!
//! ```text
//! maximize γ   subject to   -Ā(y) - γ I ⪰ 0,   cᵀ y = τ
//! ```
//!
//! with `c` the trace functional. The ADMM splitting keeps `(y, γ)` on the affine set and
//! projects the slack `Z = -Ā(y) - γ I` onto the PSD cone. Several topologies are
//! solved jointly by giving each its own diagonal block of `Z` and a shared `γ`; tied
//! edge slots share one parameter pair.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::formation::{build_kernel_basis, validate_graph, FormationSpec, KernelBasis, SensingGraph};

use super::{GainError, GainMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    #[default]
    Admm,
    ProjectedSubgradient,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverOptions {
    /// Value of `trace(A)`; defaults to `-(2n - 4)`.
    pub trace_budget: Option<f64>,
    pub max_iterations: usize,
    pub primal_tolerance: f64,
    pub dual_tolerance: f64,
    /// Absolute zero band for spectrum checks; defaults to `1e-6 · max|λ|`.
    pub zero_tolerance: Option<f64>,
    /// Smallest acceptable `λ_min(-Ā)`; defaults to `1e-6 · |τ| / (2n - 4)`.
    pub gamma_floor: Option<f64>,
    pub algorithm: Algorithm,
    /// Initial ADMM penalty.
    pub rho: f64,
    /// Give agents with identical neighbor sets in two topologies identical gains.
    pub tie_neighborhoods: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            trace_budget: None,
            max_iterations: 20_000,
            primal_tolerance: 1e-8,
            dual_tolerance: 1e-8,
            zero_tolerance: None,
            gamma_floor: None,
            algorithm: Algorithm::Admm,
            rho: 0.01,
            tie_neighborhoods: true,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<(), GainError> {
        let bad = |m: &str| Err(GainError::InvalidOptions(m.into()));
        if self.trace_budget.is_some_and(|t| !(t < 0.0) || !t.is_finite()) {
            return bad("trace_budget must be negative");
        }
        if !(self.primal_tolerance > 0.0 && self.dual_tolerance > 0.0) {
            return bad("tolerances must be positive");
        }
        if self.zero_tolerance.is_some_and(|z| !(z > 0.0)) {
            return bad("zero_tolerance must be positive");
        }
        if self.gamma_floor.is_some_and(|g| !(g > 0.0)) {
            return bad("gamma_floor must be positive");
        }
        if self.max_iterations == 0 {
            return bad("max_iterations must be at least 1");
        }
        if !(self.rho > 0.0) {
            return bad("rho must be positive");
        }
        Ok(())
    }

    pub fn trace_budget_for(&self, n: usize) -> f64 {
        self.trace_budget.unwrap_or(-((2 * n - 4) as f64))
    }

    pub fn gamma_floor_for(&self, n: usize) -> f64 {
        self.gamma_floor
            .unwrap_or(1e-6 * self.trace_budget_for(n).abs() / (2 * n - 4) as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverReport {
    pub algorithm: Algorithm,
    pub iterations: usize,
    /// `min_k λ_min(-Ā_k)` of the returned gains.
    pub gamma: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub converged: bool,
}

/// Agent `agent` sees the same neighbor set in every listed topology.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TieGroup {
    pub agent: usize,
    pub topologies: Vec<usize>,
}

impl std::fmt::Display for TieGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let t: Vec<String> = self.topologies.iter().map(|k| k.to_string()).collect();
        write!(f, "agent {} in topologies {{{}}}", self.agent, t.join(", "))
    }
}

#[derive(Debug, Clone)]
pub struct GainDesign {
    pub gains: Vec<GainMatrix>,
    pub report: SolverReport,
    pub ties: Vec<TieGroup>,
    pub trace_budget: f64,
}

/// Topologies in which an agent has the same non-empty neighbor set, grouped per agent.
pub fn tie_groups(graphs: &[SensingGraph]) -> Vec<TieGroup> {
    let Some(n) = graphs.first().map(|g| g.n()) else { return Vec::new() };
    let mut out = Vec::new();
    for agent in 0..n {
        let mut used = vec![false; graphs.len()];
        for k in 0..graphs.len() {
            if used[k] || graphs[k].degree(agent) == 0 {
                continue;
            }
            let group: Vec<usize> = (k..graphs.len())
                .filter(|&l| graphs[l].neighbors(agent) == graphs[k].neighbors(agent))
                .collect();
            for &l in &group {
                used[l] = true;
            }
            if group.len() > 1 {
                out.push(TieGroup { agent, topologies: group });
            }
        }
    }
    out
}

pub fn design_gains(graph: &SensingGraph, spec: &FormationSpec, opts: &SolverOptions) -> Result<GainMatrix, GainError> {
    let mut d = solve_gains(std::slice::from_ref(graph), spec, opts)?;
    Ok(d.gains.remove(0))
}

pub fn design_joint_gains(
    graphs: &[SensingGraph],
    spec: &FormationSpec,
    opts: &SolverOptions,
) -> Result<Vec<GainMatrix>, GainError> {
    solve_gains(graphs, spec, opts).map(|d| d.gains)
}

/// Joint design with full reporting. On a joint failure whose topologies are each
/// feasible on their own, the error names the tie groups whose removal restores
/// feasibility.
pub fn solve_gains(graphs: &[SensingGraph], spec: &FormationSpec, opts: &SolverOptions) -> Result<GainDesign, GainError> {
    opts.validate()?;
    if graphs.is_empty() {
        return Err(GainError::InvalidOptions("at least one topology is required".into()));
    }
    for g in graphs {
        if g.n() != spec.n() {
            return Err(GainError::DimensionMismatch { expected: spec.n(), got: g.n() });
        }
        validate_graph(g)?;
    }
    let basis = build_kernel_basis(spec)?;
    let ties = if opts.tie_neighborhoods { tie_groups(graphs) } else { Vec::new() };
    match solve_layout(graphs, spec, &basis, &ties, opts) {
        Err(GainError::InfeasibleTopology { .. }) if graphs.len() > 1 => {
            for (k, g) in graphs.iter().enumerate() {
                match solve_layout(std::slice::from_ref(g), spec, &basis, &[], opts) {
                    Err(GainError::InfeasibleTopology { gamma, .. }) => {
                        return Err(GainError::InfeasibleTopology { topology: Some(k), gamma })
                    }
                    Err(e) => return Err(e),
                    Ok(_) => {}
                }
            }
            let binding = (0..ties.len())
                .filter(|&t| {
                    let rest: Vec<TieGroup> =
                        ties.iter().enumerate().filter(|&(s, _)| s != t).map(|(_, g)| g.clone()).collect();
                    solve_layout(graphs, spec, &basis, &rest, opts).is_ok()
                })
                .map(|t| ties[t].clone())
                .collect();
            Err(GainError::JointInfeasible { binding })
        }
        other => other,
    }
}

/// `λ_min(-Q A Qᵀ)`.
pub fn gamma_of(gain: &GainMatrix, basis: &KernelBasis) -> f64 {
    let q = basis.q();
    let red = -(q.transpose() * gain.dense() * q);
    min_eigenvalue(&red)
}

fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    let sym = (m + m.transpose()) * 0.5;
    SymmetricEigen::new(sym).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Free parameter classes: slot `(k, e)` of topology `k`, edge `e` maps to one class.
struct Layout {
    slot_class: Vec<Vec<usize>>,
    class_count: usize,
    class_mult: Vec<usize>,
}

fn build_layout(graphs: &[SensingGraph], ties: &[TieGroup]) -> Layout {
    let offsets: Vec<usize> = graphs
        .iter()
        .scan(0, |acc, g| {
            let o = *acc;
            *acc += g.edge_count();
            Some(o)
        })
        .collect();
    let total: usize = graphs.iter().map(|g| g.edge_count()).sum();
    let mut parent: Vec<usize> = (0..total).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for tie in ties {
        let k0 = tie.topologies[0];
        for &j in graphs[k0].neighbors(tie.agent) {
            let s0 = offsets[k0] + graphs[k0].edge_index(tie.agent, j).expect("neighbor edge");
            for &l in &tie.topologies[1..] {
                let s1 = offsets[l] + graphs[l].edge_index(tie.agent, j).expect("tied neighbor edge");
                let (r0, r1) = (find(&mut parent, s0), find(&mut parent, s1));
                if r0 != r1 {
                    parent[r0.max(r1)] = r0.min(r1);
                }
            }
        }
    }
    let mut class_of_root = vec![usize::MAX; total];
    let mut class_count = 0;
    let mut class_mult = Vec::new();
    let mut slot_class = Vec::with_capacity(graphs.len());
    for (k, g) in graphs.iter().enumerate() {
        let mut row = Vec::with_capacity(g.edge_count());
        for e in 0..g.edge_count() {
            let r = find(&mut parent, offsets[k] + e);
            if class_of_root[r] == usize::MAX {
                class_of_root[r] = class_count;
                class_count += 1;
                class_mult.push(0);
            }
            class_mult[class_of_root[r]] += 1;
            row.push(class_of_root[r]);
        }
        slot_class.push(row);
    }
    Layout { slot_class, class_count, class_mult }
}

/// Rows `3i, 3i+1`: `Σ_j A_ij (q*_j - q*_i) = 0`; row `3i+2`: `Σ_j b_ij = 0`.
fn constraint_matrix(graphs: &[SensingGraph], layout: &Layout, q: &[f64]) -> DMatrix<f64> {
    let n = graphs[0].n();
    let mut c = DMatrix::zeros(3 * n * graphs.len(), 2 * layout.class_count);
    for (k, g) in graphs.iter().enumerate() {
        let base = 3 * n * k;
        for (e, &(i, j)) in g.edges().iter().enumerate() {
            let (ca, cb) = (2 * layout.slot_class[k][e], 2 * layout.slot_class[k][e] + 1);
            let (dx, dy) = (q[2 * j] - q[2 * i], q[2 * j + 1] - q[2 * i + 1]);
            // Agent i: (aI + bJ) d with J d = (d_y, -d_x).
            c[(base + 3 * i, ca)] += dx;
            c[(base + 3 * i, cb)] += dy;
            c[(base + 3 * i + 1, ca)] += dy;
            c[(base + 3 * i + 1, cb)] -= dx;
            c[(base + 3 * i + 2, cb)] += 1.0;
            // Agent j: (aI - bJ)(-d).
            c[(base + 3 * j, ca)] -= dx;
            c[(base + 3 * j, cb)] += dy;
            c[(base + 3 * j + 1, ca)] -= dy;
            c[(base + 3 * j + 1, cb)] -= dx;
            c[(base + 3 * j + 2, cb)] -= 1.0;
        }
    }
    c
}

/// Orthonormal basis of `ker(c)` from a full SVD.
fn nullspace(c: &DMatrix<f64>) -> DMatrix<f64> {
    let cols = c.ncols();
    let rows = c.nrows().max(cols);
    let mut padded = DMatrix::zeros(rows, cols);
    padded.rows_mut(0, c.nrows()).copy_from(c);
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("right singular vectors requested");
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let tol = 1e-9 * smax.max(f64::MIN_POSITIVE);
    let null: Vec<DVector<f64>> = (0..cols)
        .filter(|&k| svd.singular_values[k] <= tol)
        .map(|k| vt.row(k).transpose())
        .collect();
    if null.is_empty() {
        DMatrix::zeros(cols, 0)
    } else {
        DMatrix::from_columns(&null)
    }
}

fn svec_len(r: usize) -> usize {
    r * (r + 1) / 2
}

fn svec_into(m: &DMatrix<f64>, out: &mut [f64]) {
    let r = m.nrows();
    let mut idx = 0;
    for j in 0..r {
        for i in 0..=j {
            out[idx] = if i == j { m[(i, i)] } else { std::f64::consts::SQRT_2 * 0.5 * (m[(i, j)] + m[(j, i)]) };
            idx += 1;
        }
    }
}

fn unsvec(v: &[f64], r: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(r, r);
    let mut idx = 0;
    for j in 0..r {
        for i in 0..=j {
            if i == j {
                m[(i, i)] = v[idx];
            } else {
                let x = v[idx] / std::f64::consts::SQRT_2;
                m[(i, j)] = x;
                m[(j, i)] = x;
            }
            idx += 1;
        }
    }
    m
}

/// Reduced operator of each edge, as svec columns `[F^a_e, F^b_e]` per topology.
/// `Qᵀ P^a_e Q = -DᵀD` and the symmetric part of `Qᵀ P^b_e Q = -(Q_i + Q_j)ᵀ J D`,
/// where `D = Q_i - Q_j` and `Q_i` are the two rows of `Q` belonging to agent `i`.
fn reduced_operator(graph: &SensingGraph, q: &DMatrix<f64>, slot_class: &[usize], classes: usize) -> DMatrix<f64> {
    let r = q.ncols();
    let s = svec_len(r);
    let mut f = DMatrix::zeros(s, 2 * classes);
    let mut buf = vec![0.0; s];
    for (e, &(i, j)) in graph.edges().iter().enumerate() {
        let qi = q.rows(2 * i, 2);
        let qj = q.rows(2 * j, 2);
        let d = qi - qj;
        let sum = qi + qj;
        let mut jd = DMatrix::zeros(2, r);
        jd.row_mut(0).copy_from(&d.row(1));
        jd.row_mut(1).copy_from(&(-d.row(0)));
        let fa = -(d.transpose() * &d);
        let fb = -(sum.transpose() * jd);
        let cls = slot_class[e];
        svec_into(&fa, &mut buf);
        for (t, &x) in buf.iter().enumerate() {
            f[(t, 2 * cls)] += x;
        }
        svec_into(&fb, &mut buf);
        for (t, &x) in buf.iter().enumerate() {
            f[(t, 2 * cls + 1)] += x;
        }
    }
    f
}

struct Reduced {
    /// Stacked `svec(G_k)` blocks, one block of rows per topology.
    g: DMatrix<f64>,
    /// Trace functional on `y`.
    c: DVector<f64>,
    block: usize,
    blocks: usize,
    r: usize,
}

impl Reduced {
    fn block_matrix(&self, v: &DVector<f64>, k: usize) -> DMatrix<f64> {
        unsvec(&v.as_slice()[k * self.block..(k + 1) * self.block], self.r)
    }

    /// `min_k λ_min(-Ā_k(y))`.
    fn gamma(&self, y: &DVector<f64>) -> f64 {
        let gy = &self.g * y;
        (0..self.blocks)
            .map(|k| min_eigenvalue(&(-self.block_matrix(&gy, k))))
            .fold(f64::INFINITY, f64::min)
    }
}

fn solve_layout(
    graphs: &[SensingGraph],
    spec: &FormationSpec,
    basis: &KernelBasis,
    ties: &[TieGroup],
    opts: &SolverOptions,
) -> Result<GainDesign, GainError> {
    let n = spec.n();
    let m = graphs.len();
    let tau = opts.trace_budget_for(n);
    let floor = opts.gamma_floor_for(n);
    let layout = build_layout(graphs, ties);

    let mut q = spec.centered_q_star();
    let rms = (q.iter().map(|x| x * x).sum::<f64>() / q.len() as f64).sqrt();
    q.iter_mut().for_each(|x| *x /= rms);
    let b = nullspace(&constraint_matrix(graphs, &layout, &q));

    let mut t = DVector::zeros(2 * layout.class_count);
    for (cls, &mult) in layout.class_mult.iter().enumerate() {
        t[2 * cls] = -4.0 * mult as f64;
    }
    let c = b.transpose() * &t;
    if b.ncols() == 0 || c.norm() <= 1e-9 * t.norm() {
        return Err(GainError::InfeasibleTopology { topology: (m == 1).then_some(0), gamma: 0.0 });
    }

    let r = 2 * n - 4;
    let block = svec_len(r);
    let mut g = DMatrix::zeros(block * m, b.ncols());
    for (k, graph) in graphs.iter().enumerate() {
        let f = reduced_operator(graph, basis.q(), &layout.slot_class[k], layout.class_count);
        g.rows_mut(k * block, block).copy_from(&(f * &b));
    }
    let red = Reduced { g, c, block, blocks: m, r };
    let total_tau = tau * m as f64;

    let (y, report) = match opts.algorithm {
        Algorithm::Admm => admm(&red, total_tau, opts),
        Algorithm::ProjectedSubgradient => subgradient(&red, total_tau, opts),
    };
    if report.gamma <= floor {
        return Err(GainError::InfeasibleTopology { topology: (m == 1).then_some(0), gamma: report.gamma });
    }
    if !report.converged {
        return Err(GainError::SolverFailure {
            iterations: report.iterations,
            gamma: report.gamma,
            primal_residual: report.primal_residual,
            dual_residual: report.dual_residual,
        });
    }

    let x = &b * &y;
    let gains = graphs
        .iter()
        .enumerate()
        .map(|(k, graph)| {
            let params = layout.slot_class[k].iter().map(|&cls| (x[2 * cls], x[2 * cls + 1])).collect();
            GainMatrix::new(graph.clone(), params)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(GainDesign { gains, report, ties: ties.to_vec(), trace_budget: tau })
}

fn psd_project(m: DMatrix<f64>) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(m);
    let mut v = eig.eigenvectors;
    for (k, &l) in eig.eigenvalues.iter().enumerate() {
        let s = l.max(0.0).sqrt();
        v.column_mut(k).scale_mut(s);
    }
    &v * v.transpose()
}

const RELAXATION: f64 = 1.6;
const CHECK_EVERY: usize = 10;

fn admm(red: &Reduced, tau: f64, opts: &SolverOptions) -> (DVector<f64>, SolverReport) {
    let p = red.g.ncols();
    let rows = red.g.nrows();
    // M w = svec(-Ā(y) - γ I), w = (y, γ).
    let mut mm = DMatrix::zeros(rows, p + 1);
    mm.columns_mut(0, p).copy_from(&(-&red.g));
    let mut id = vec![0.0; red.block];
    svec_into(&DMatrix::identity(red.r, red.r), &mut id);
    for k in 0..red.blocks {
        for (t, &x) in id.iter().enumerate() {
            mm[(k * red.block + t, p)] = -x;
        }
    }
    let h = mm.transpose() * &mm;
    let mut kkt = DMatrix::zeros(p + 2, p + 2);
    kkt.view_mut((0, 0), (p + 1, p + 1)).copy_from(&h);
    for i in 0..p {
        kkt[(i, p + 1)] = red.c[i];
        kkt[(p + 1, i)] = red.c[i];
    }
    let lu = kkt.lu();

    let y0 = &red.c * (tau / red.c.norm_squared());
    let gamma0 = red.gamma(&y0);
    let mut w = DVector::zeros(p + 1);
    w.rows_mut(0, p).copy_from(&y0);
    w[p] = gamma0;
    let mut z = &mm * &w;
    let mut u = DVector::zeros(rows);
    let mut rho = opts.rho;
    let mut best = (gamma0, y0);
    let (mut r_norm, mut s_norm) = (f64::INFINITY, f64::INFINITY);
    let mut converged = false;
    let mut iterations = 0;
    let sqrt_rows = (rows as f64).sqrt();
    let sqrt_p = ((p + 1) as f64).sqrt();

    for it in 1..=opts.max_iterations {
        iterations = it;
        let v = &z - &u;
        let mut rhs = DVector::zeros(p + 2);
        rhs.rows_mut(0, p + 1).copy_from(&mm.tr_mul(&v));
        rhs[p] += 1.0 / rho;
        rhs[p + 1] = tau;
        let sol = lu.solve(&rhs).expect("KKT system is nonsingular on the trace hyperplane");
        w.copy_from(&sol.rows(0, p + 1));
        let lw = &mm * &w;
        // Over-relaxation.
        let lw_hat = &lw * RELAXATION + &z * (1.0 - RELAXATION);

        let shifted = &lw_hat + &u;
        let mut z_new = DVector::zeros(rows);
        let mut buf = vec![0.0; red.block];
        for k in 0..red.blocks {
            let proj = psd_project(red.block_matrix(&shifted, k));
            svec_into(&proj, &mut buf);
            z_new.rows_mut(k * red.block, red.block).copy_from_slice(&buf);
        }
        u += &lw_hat - &z_new;
        let check = it % CHECK_EVERY == 0 || it == opts.max_iterations;
        if !check {
            z = z_new;
            continue;
        }
        // Residuals and the exact objective are only evaluated every few iterations;
        // each costs a pass over the reduced operator.
        r_norm = (&lw - &z_new).norm();
        s_norm = rho * mm.tr_mul(&(&z_new - &z)).norm();
        z = z_new;
        let eps_pri = opts.primal_tolerance * (sqrt_rows + lw.norm().max(z.norm()));
        let eps_dual = opts.dual_tolerance * (sqrt_p + rho * mm.tr_mul(&u).norm());

        // λ_min(-Ā_k(y)) = λ_min(unsvec(Lw_k)) + γ.
        let gamma = (0..red.blocks)
            .map(|k| min_eigenvalue(&red.block_matrix(&lw, k)))
            .fold(f64::INFINITY, f64::min)
            + w[p];
        if gamma > best.0 {
            best = (gamma, w.rows(0, p).into_owned());
        }
        if r_norm <= eps_pri && s_norm <= eps_dual {
            converged = true;
            break;
        }
        if it % CHECK_EVERY == 0 {
            if r_norm > 10.0 * s_norm {
                rho *= 2.0;
                u /= 2.0;
            } else if s_norm > 10.0 * r_norm {
                rho /= 2.0;
                u *= 2.0;
            }
        }
    }
    let report = SolverReport {
        algorithm: Algorithm::Admm,
        iterations,
        gamma: best.0,
        primal_residual: r_norm,
        dual_residual: s_norm,
        converged,
    };
    (best.1, report)
}

/// Ascent on `γ(y) = λ_min(-Ā(y))` along the averaged eigenvector supergradient of the
/// lowest eigenvalue cluster, projected onto `cᵀ y = τ`, with diminishing steps.
fn subgradient(red: &Reduced, tau: f64, opts: &SolverOptions) -> (DVector<f64>, SolverReport) {
    let p = red.g.ncols();
    let cn2 = red.c.norm_squared();
    let mut y = &red.c * (tau / cn2);
    let step0 = 0.5 * y.norm().max(1e-12);
    let mut best = (red.gamma(&y), y.clone());
    for it in 0..opts.max_iterations {
        let gy = &red.g * &y;
        let mut lowest = (f64::INFINITY, 0usize, None);
        for k in 0..red.blocks {
            let eig = SymmetricEigen::new(-red.block_matrix(&gy, k));
            let lmin = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
            if lmin < lowest.0 {
                lowest = (lmin, k, Some(eig));
            }
        }
        let (lmin, k, eig) = lowest;
        let eig = eig.expect("at least one block");
        if lmin > best.0 {
            best = (lmin, y.clone());
        }
        let spread = eig.eigenvalues.iter().fold(0.0f64, |m, l| m.max(l.abs())).max(1e-300);
        let cluster: Vec<usize> =
            (0..red.r).filter(|&i| eig.eigenvalues[i] - lmin <= 1e-9 * spread).collect();
        // d/dy_t of λ_min(-Ā) is -vᵀ G_t v.
        let mut grad = DVector::zeros(p);
        let gk = red.g.rows(k * red.block, red.block);
        let mut vv = vec![0.0; red.block];
        for &i in &cluster {
            let v = eig.eigenvectors.column(i);
            svec_into(&(v * v.transpose()), &mut vv);
            grad -= gk.transpose() * DVector::from_column_slice(&vv);
        }
        grad /= cluster.len() as f64;
        let cg = red.c.dot(&grad);
        grad -= &red.c * (cg / cn2);
        let gn = grad.norm();
        if gn <= 1e-14 {
            break;
        }
        y += grad * (step0 / ((it + 1) as f64).sqrt() / gn);
    }
    let report = SolverReport {
        algorithm: Algorithm::ProjectedSubgradient,
        iterations: opts.max_iterations,
        gamma: best.0,
        primal_residual: 0.0,
        dual_residual: 0.0,
        converged: true,
    };
    (best.1, report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formation::regular_polygon;

    #[test]
    fn svec_round_trip_preserves_frobenius() {
        let m = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 3.0, 2.0, 4.0, 5.0, 3.0, 5.0, 6.0]);
        let mut v = vec![0.0; 6];
        svec_into(&m, &mut v);
        assert_eq!(unsvec(&v, 3), m);
        let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((norm - m.norm()).abs() < 1e-12);
    }

    #[test]
    fn ties_group_identical_neighborhoods() {
        let a = SensingGraph::new(4, [(0, 1), (0, 3), (1, 2), (2, 3)]).unwrap();
        let b = SensingGraph::new(4, [(0, 1), (0, 3), (1, 3), (2, 3)]).unwrap();
        let ties = tie_groups(&[a.clone(), b, a]);
        assert!(ties.contains(&TieGroup { agent: 0, topologies: vec![0, 1, 2] }));
        assert!(ties.contains(&TieGroup { agent: 2, topologies: vec![0, 2] }));
    }

    #[test]
    fn options_are_validated() {
        let bad = SolverOptions { trace_budget: Some(1.0), ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = SolverOptions { rho: 0.0, ..Default::default() };
        assert!(bad.validate().is_err());
        assert!(SolverOptions::default().validate().is_ok());
    }

    #[test]
    fn constraint_null_space_satisfies_kernel() {
        let spec = FormationSpec::from_points(&regular_polygon(5, 1.0), true).unwrap();
        let graphs = [SensingGraph::complete(5)];
        let layout = build_layout(&graphs, &[]);
        let q = spec.centered_q_star();
        let b = nullspace(&constraint_matrix(&graphs, &layout, &q));
        assert!(b.ncols() > 0);
        for col in 0..b.ncols() {
            let params: Vec<(f64, f64)> = (0..layout.class_count).map(|c| (b[(2 * c, col)], b[(2 * c + 1, col)])).collect();
            let g = GainMatrix::new(graphs[0].clone(), params).unwrap();
            let qs = DVector::from_column_slice(&q);
            assert!((g.dense() * qs).amax() < 1e-12);
            assert!(g.asymmetry() < 1e-12);
        }
    }

    #[test]
    fn reduced_operator_matches_dense_projection() {
        let spec = FormationSpec::from_points(&regular_polygon(5, 1.0), true).unwrap();
        let basis = build_kernel_basis(&spec).unwrap();
        let graphs = [SensingGraph::complete(5)];
        let layout = build_layout(&graphs, &[]);
        let b = nullspace(&constraint_matrix(&graphs, &layout, &spec.centered_q_star()));
        let f = reduced_operator(&graphs[0], basis.q(), &layout.slot_class[0], layout.class_count);
        let col = b.column(0).into_owned();
        let params: Vec<(f64, f64)> = (0..layout.class_count).map(|c| (col[2 * c], col[2 * c + 1])).collect();
        let g = GainMatrix::new(graphs[0].clone(), params).unwrap();
        let dense = basis.q().transpose() * g.dense() * basis.q();
        let fy = f * col;
        assert!((unsvec(fy.as_slice(), 6) - dense).amax() < 1e-12);
    }
}
