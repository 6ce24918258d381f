//! Formation geometry shared by every other module: the sensing graph, the desired
//! formation and its 90-degree rotation, the four-dimensional kernel basis
//! `N = [q*, q̄*, 1, 1̄]` with its orthonormal complement, and the formation metrics.
//!
//! Stacked planar vectors use the interleaved layout `[x_1, y_1, x_2, y_2, ...]`.

mod graph;

pub use graph::{validate_graph, GraphReport, SensingGraph};

use nalgebra::{DMatrix, DVector, Vector2};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Vec2 = Vector2<f64>;

/// Relative rank threshold for the kernel basis.
pub const RANK_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FormationError {
    #[error("stacked planar vector must have even length, got {0}")]
    OddDimension(usize),
    #[error("expected {expected} entries, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("formation needs at least 3 agents, got {0}")]
    TooFewAgents(usize),
    #[error("edge ({i}, {j}) references an agent outside 0..{n}")]
    EdgeOutOfRange { i: usize, j: usize, n: usize },
    #[error("self-loop on agent {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("degenerate formation: kernel basis has rank {rank}, expected 4")]
    DegenerateFormation { rank: usize },
    #[error("formation error is undefined for the zero configuration")]
    ZeroConfiguration,
}

/// Rotates every planar block `(x, y)` to `(-y, x)`.
pub fn rotate90(q: &[f64]) -> Result<Vec<f64>, FormationError> {
    if !q.len().is_multiple_of(2) {
        return Err(FormationError::OddDimension(q.len()));
    }
    Ok(q.chunks_exact(2).flat_map(|p| [-p[1], p[0]]).collect())
}

/// The vectors `1 = [1,0,1,0,...]` and `1̄ = [0,1,0,1,...]` for `n` agents.
pub fn translation_vectors(n: usize) -> (DVector<f64>, DVector<f64>) {
    let ones = DVector::from_fn(2 * n, |k, _| if k % 2 == 0 { 1.0 } else { 0.0 });
    let ones_bar = DVector::from_fn(2 * n, |k, _| if k % 2 == 1 { 1.0 } else { 0.0 });
    (ones, ones_bar)
}

/// Desired formation `q*` and its 90-degree rotation `q̄*`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormationSpec {
    q_star: Vec<f64>,
    q_bar_star: Vec<f64>,
    centered: bool,
}

impl FormationSpec {
    /// Builds the formation from agent coordinates. With `center` set the mean is removed.
    pub fn from_points(points: &[Vec2], center: bool) -> Result<Self, FormationError> {
        if points.len() < 3 {
            return Err(FormationError::TooFewAgents(points.len()));
        }
        let mean = if center {
            points.iter().sum::<Vec2>() / points.len() as f64
        } else {
            Vec2::zeros()
        };
        let q_star: Vec<f64> = points.iter().flat_map(|p| [p.x - mean.x, p.y - mean.y]).collect();
        let q_bar_star = rotate90(&q_star)?;
        Ok(Self { q_star, q_bar_star, centered: center })
    }

    pub fn from_stacked(q: &[f64], center: bool) -> Result<Self, FormationError> {
        if !q.len().is_multiple_of(2) {
            return Err(FormationError::OddDimension(q.len()));
        }
        let pts: Vec<Vec2> = q.chunks_exact(2).map(|p| Vec2::new(p[0], p[1])).collect();
        Self::from_points(&pts, center)
    }

    pub fn n(&self) -> usize {
        self.q_star.len() / 2
    }

    pub fn q_star(&self) -> &[f64] {
        &self.q_star
    }

    pub fn q_bar_star(&self) -> &[f64] {
        &self.q_bar_star
    }

    pub fn centered(&self) -> bool {
        self.centered
    }

    pub fn point(&self, i: usize) -> Vec2 {
        Vec2::new(self.q_star[2 * i], self.q_star[2 * i + 1])
    }

    pub fn points(&self) -> Vec<Vec2> {
        (0..self.n()).map(|i| self.point(i)).collect()
    }

    /// Coordinates with the mean removed, regardless of how the spec was built.
    pub fn centered_q_star(&self) -> Vec<f64> {
        let n = self.n() as f64;
        let (mut mx, mut my) = (0.0, 0.0);
        for p in self.q_star.chunks_exact(2) {
            mx += p[0];
            my += p[1];
        }
        mx /= n;
        my /= n;
        self.q_star.chunks_exact(2).flat_map(|p| [p[0] - mx, p[1] - my]).collect()
    }
}

/// Kernel basis `N = [q*, q̄*, 1, 1̄]`, an orthonormal basis `N_hat` of its range and the
/// orthonormal complement `Q` (the last `2n - 4` left singular vectors of `N`).
#[derive(Debug, Clone)]
pub struct KernelBasis {
    n: usize,
    n_mat: DMatrix<f64>,
    n_hat: DMatrix<f64>,
    q: DMatrix<f64>,
    singular_values: [f64; 4],
}

impl KernelBasis {
    pub fn n(&self) -> usize {
        self.n
    }

    /// `N`, built from the centered formation.
    pub fn kernel(&self) -> &DMatrix<f64> {
        &self.n_mat
    }

    pub fn n_hat(&self) -> &DMatrix<f64> {
        &self.n_hat
    }

    pub fn q(&self) -> &DMatrix<f64> {
        &self.q
    }

    pub fn singular_values(&self) -> [f64; 4] {
        self.singular_values
    }

    /// Applies `I - N_hat N_hatᵀ`.
    pub fn project_out(&self, q: &DVector<f64>) -> DVector<f64> {
        q - &self.n_hat * (self.n_hat.transpose() * q)
    }

    /// The projector `I - N_hat N_hatᵀ` as a dense matrix.
    pub fn complement_projector(&self) -> DMatrix<f64> {
        let dim = 2 * self.n;
        DMatrix::identity(dim, dim) - &self.n_hat * self.n_hat.transpose()
    }
}

pub fn build_kernel_basis(spec: &FormationSpec) -> Result<KernelBasis, FormationError> {
    let n = spec.n();
    if n < 3 {
        return Err(FormationError::TooFewAgents(n));
    }
    let dim = 2 * n;
    let q_star = DVector::from_vec(spec.centered_q_star());
    let q_bar = DVector::from_vec(rotate90(q_star.as_slice())?);
    let (ones, ones_bar) = translation_vectors(n);
    let n_mat = DMatrix::from_columns(&[q_star, q_bar, ones, ones_bar]);

    // Full SVD: pad N with zero columns so the decomposition returns a square U.
    let mut padded = DMatrix::zeros(dim, dim);
    padded.columns_mut(0, 4).copy_from(&n_mat);
    let svd = padded.svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));

    let sigma_max = svd.singular_values[order[0]];
    let rank = order
        .iter()
        .filter(|&&k| svd.singular_values[k] > RANK_TOLERANCE * sigma_max)
        .count();
    if rank != 4 {
        return Err(FormationError::DegenerateFormation { rank });
    }
    let cols: Vec<_> = order.iter().map(|&k| u.column(k).into_owned()).collect();
    let n_hat = DMatrix::from_columns(&cols[..4]);
    let q = DMatrix::from_columns(&cols[4..]);
    let singular_values = [0, 1, 2, 3].map(|k| svd.singular_values[order[k]]);
    Ok(KernelBasis { n, n_mat, n_hat, q, singular_values })
}

/// Relative distance of `q` from the set of all similarity transforms of the formation:
/// `‖(I - N_hat N_hatᵀ) q‖ / ‖q‖`.
pub fn formation_error(q: &[f64], basis: &KernelBasis) -> Result<f64, FormationError> {
    if q.len() != 2 * basis.n {
        return Err(FormationError::DimensionMismatch { expected: 2 * basis.n, got: q.len() });
    }
    let v = DVector::from_column_slice(q);
    let norm = v.norm();
    if norm == 0.0 {
        return Err(FormationError::ZeroConfiguration);
    }
    Ok((basis.project_out(&v).norm() / norm).min(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FormationMetrics {
    pub subspace_error: f64,
    /// `V = -½ qᵀ A q` for the active gain matrix.
    pub lyapunov_value: f64,
    pub min_pairwise_distance: f64,
}

pub fn min_pairwise_distance(points: &[Vec2]) -> f64 {
    let mut best = f64::INFINITY;
    for (i, p) in points.iter().enumerate() {
        for r in &points[i + 1..] {
            best = best.min((p - r).norm());
        }
    }
    best
}

/// `-½ qᵀ A q`.
pub fn lyapunov_value(q: &[f64], a: &DMatrix<f64>) -> f64 {
    let v = DVector::from_column_slice(q);
    -0.5 * v.dot(&(a * &v))
}

pub fn metrics(q: &[f64], a: &DMatrix<f64>, basis: &KernelBasis) -> FormationMetrics {
    let pts: Vec<Vec2> = q.chunks_exact(2).map(|p| Vec2::new(p[0], p[1])).collect();
    FormationMetrics {
        subspace_error: formation_error(q, basis).unwrap_or(0.0),
        lyapunov_value: lyapunov_value(q, a),
        min_pairwise_distance: min_pairwise_distance(&pts),
    }
}

/// Regular polygon with unit circumradius, first vertex on the positive x-axis.
pub fn regular_polygon(n: usize, radius: f64) -> Vec<Vec2> {
    (0..n)
        .map(|k| {
            let a = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            Vec2::new(radius * a.cos(), radius * a.sin())
        })
        .collect()
}

/// Square grid, row-major from the top-left corner, with the given spacing.
pub fn square_grid(side: usize, spacing: f64) -> Vec<Vec2> {
    let mut pts = Vec::with_capacity(side * side);
    for row in 0..side {
        for col in 0..side {
            pts.push(Vec2::new(col as f64 * spacing, -(row as f64) * spacing));
        }
    }
    pts
}
