use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::formation::{translation_vectors, KernelBasis};

use super::{GainError, GainMatrix};

/// Relative zero tolerance used when none is given: `1e-6 · max|λ|`.
pub const DEFAULT_RELATIVE_ZERO_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    /// Eigenvalues of the symmetric part of `A`, sorted descending.
    pub eigenvalues: Vec<f64>,
    pub zero_tolerance: f64,
    pub zero_count: usize,
    /// `-λ_5` in descending order: the magnitude of the nonzero eigenvalue nearest zero.
    pub spectral_gap: f64,
    /// `max ‖A v‖ / ‖v‖` over `q*`, `q̄*`, `1`, `1̄`.
    pub kernel_residual: f64,
    pub pass: bool,
}

impl SpectrumReport {
    /// Eigenvalues outside the zero band.
    pub fn nonzero_eigenvalues(&self) -> Vec<f64> {
        self.eigenvalues.iter().copied().filter(|l| l.abs() > self.zero_tolerance).collect()
    }
}

/// `Ā = Qᵀ A Q`.
pub fn reduced_matrix(a: &DMatrix<f64>, basis: &KernelBasis) -> Result<DMatrix<f64>, GainError> {
    let dim = 2 * basis.n();
    if a.shape() != (dim, dim) {
        return Err(GainError::DimensionMismatch { expected: dim, got: a.nrows() });
    }
    let q = basis.q();
    Ok(q.transpose() * a * q)
}

pub(crate) fn sorted_symmetric_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let sym = (m + m.transpose()) * 0.5;
    let mut ev: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

/// Checks the convergence conditions: exactly four zero eigenvalues, every other one
/// strictly negative, and the four kernel vectors annihilated.
///
/// `zero_tol` defaults to `1e-6 · max|λ|`.
pub fn verify_gains(gain: &GainMatrix, basis: &KernelBasis, zero_tol: Option<f64>) -> Result<SpectrumReport, GainError> {
    verify_dense(gain.dense(), basis, zero_tol)
}

pub fn verify_dense(a: &DMatrix<f64>, basis: &KernelBasis, zero_tol: Option<f64>) -> Result<SpectrumReport, GainError> {
    let n = basis.n();
    if a.shape() != (2 * n, 2 * n) {
        return Err(GainError::DimensionMismatch { expected: 2 * n, got: a.nrows() });
    }
    let eigenvalues = sorted_symmetric_eigenvalues(a);
    let max_abs = eigenvalues.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    let tol = zero_tol.unwrap_or(DEFAULT_RELATIVE_ZERO_TOL * max_abs);
    let zero_count = eigenvalues.iter().filter(|l| l.abs() <= tol).count();
    let spectral_gap = eigenvalues.get(4).map_or(0.0, |l| -l);

    let (ones, ones_bar) = translation_vectors(n);
    let k = basis.kernel();
    let kernel_residual = [k.column(0).into_owned(), k.column(1).into_owned(), ones, ones_bar]
        .iter()
        .map(|v: &DVector<f64>| (a * v).norm() / v.norm())
        .fold(0.0f64, f64::max);

    let others_negative = eigenvalues.iter().filter(|l| l.abs() > tol).all(|&l| l < -tol);
    let pass = max_abs > 0.0 && zero_count == 4 && others_negative && kernel_residual <= tol;
    Ok(SpectrumReport { eigenvalues, zero_tolerance: tol, zero_count, spectral_gap, kernel_residual, pass })
}
