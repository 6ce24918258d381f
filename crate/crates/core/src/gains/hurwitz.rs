//! Stability of the higher-order chain closed loop, one characteristic polynomial per
//! nonzero eigenvalue `μ` of the gain matrix.
//!
//! With `u = k_0 A q + k_1 A q' + ... + k_m A q⁽ᵐ⁾` each mode obeys
//! `λ^{m+1} - k_m μ λ^m - ... - k_0 μ = 0`.
//! With own-state damping `u = k_0 A q - k_1 q' - ... - k_m q⁽ᵐ⁾` it obeys
//! `λ^{m+1} + k_m λ^m + ... + k_1 λ - k_0 μ = 0`.

use nalgebra::{Complex, DMatrix};
use serde::{Deserialize, Serialize};

use super::GainError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum HigherOrderVariant {
    FullA,
    #[default]
    IdentityDerivatives,
}

impl HigherOrderVariant {
    pub fn needs_neighbor_derivatives(self) -> bool {
        matches!(self, Self::FullA)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeCheck {
    pub mu: f64,
    /// `(re, im)` pairs.
    pub roots: Vec<(f64, f64)>,
    pub max_real_part: f64,
    pub routh_stable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HurwitzReport {
    pub variant: HigherOrderVariant,
    pub k: Vec<f64>,
    pub modes: Vec<ModeCheck>,
    pub max_real_part: f64,
    /// Eigenvalue with the largest root real part.
    pub worst_mu: f64,
    pub pass: bool,
}

/// Coefficients `[c_0, ..., c_m]` of the monic polynomial `λ^{m+1} + Σ c_j λ^j`.
pub fn characteristic_coefficients(mu: f64, k: &[f64], variant: HigherOrderVariant) -> Vec<f64> {
    k.iter()
        .enumerate()
        .map(|(j, &kj)| match variant {
            HigherOrderVariant::FullA => -kj * mu,
            HigherOrderVariant::IdentityDerivatives if j == 0 => -kj * mu,
            HigherOrderVariant::IdentityDerivatives => kj,
        })
        .collect()
}

/// Roots of the monic polynomial with lower coefficients `c`, via the companion matrix.
pub fn monic_roots(c: &[f64]) -> Vec<Complex<f64>> {
    let d = c.len();
    if d == 1 {
        return vec![Complex::new(-c[0], 0.0)];
    }
    let mut comp = DMatrix::zeros(d, d);
    for r in 1..d {
        comp[(r, r - 1)] = 1.0;
    }
    for (r, &cr) in c.iter().enumerate() {
        comp[(r, d - 1)] = -cr;
    }
    comp.complex_eigenvalues().iter().copied().collect()
}

/// Routh test on the monic polynomial with lower coefficients `c`.
/// Returns true only when every first-column entry is strictly positive.
pub fn routh_stable(c: &[f64]) -> bool {
    // Coefficients from the highest power down.
    let p: Vec<f64> = std::iter::once(1.0).chain(c.iter().rev().copied()).collect();
    let deg = p.len() - 1;
    let width = deg / 2 + 1;
    let mut rows = vec![vec![0.0; width + 1]; deg + 1];
    for (idx, &x) in p.iter().enumerate() {
        rows[idx % 2][idx / 2] = x;
    }
    for r in 2..=deg {
        let pivot = rows[r - 1][0];
        if pivot <= 0.0 {
            return false;
        }
        for i in 0..width {
            rows[r][i] = rows[r - 2][i + 1] - rows[r - 2][0] * rows[r - 1][i + 1] / pivot;
        }
    }
    rows.iter().all(|row| row[0] > 0.0)
}

pub fn verify_higher_order_gains(
    spectrum: &[f64],
    k: &[f64],
    variant: HigherOrderVariant,
) -> Result<HurwitzReport, GainError> {
    if spectrum.is_empty() {
        return Err(GainError::EmptySpectrum);
    }
    if k.is_empty() {
        return Err(GainError::InvalidOptions("gain list k must have at least one entry".into()));
    }
    let mut modes = Vec::with_capacity(spectrum.len());
    let mut worst = (f64::NEG_INFINITY, spectrum[0]);
    for &mu in spectrum {
        let c = characteristic_coefficients(mu, k, variant);
        let roots = monic_roots(&c);
        let max_real = roots.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
        if max_real > worst.0 {
            worst = (max_real, mu);
        }
        modes.push(ModeCheck {
            mu,
            roots: roots.iter().map(|z| (z.re, z.im)).collect(),
            max_real_part: max_real,
            routh_stable: routh_stable(&c),
        });
    }
    Ok(HurwitzReport {
        variant,
        k: k.to_vec(),
        modes,
        max_real_part: worst.0,
        worst_mu: worst.1,
        pass: worst.0 < 0.0,
    })
}

/// Closed-loop matrix over the stacked state `[q, q', ..., q⁽ᵐ⁾]`.
pub fn closed_loop_matrix(a: &DMatrix<f64>, k: &[f64], variant: HigherOrderVariant) -> DMatrix<f64> {
    let d = a.nrows();
    let m = k.len() - 1;
    let size = d * (m + 1);
    let mut e = DMatrix::zeros(size, size);
    for blk in 0..m {
        for r in 0..d {
            e[(blk * d + r, (blk + 1) * d + r)] = 1.0;
        }
    }
    let last = m * d;
    for (j, &kj) in k.iter().enumerate() {
        let mut view = e.view_mut((last, j * d), (d, d));
        match variant {
            HigherOrderVariant::IdentityDerivatives if j > 0 => {
                for r in 0..d {
                    view[(r, r)] = -kj;
                }
            }
            _ => view.copy_from(&(a * kj)),
        }
    }
    e
}
