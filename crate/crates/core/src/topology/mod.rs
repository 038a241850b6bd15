//! Singular values of `H + i omega` as the spectrum of a chiral Hermitian
//! Hamiltonian, edge singular vectors, Bloch winding numbers and symmetry
//! classes.

mod bloch;
mod phase_map;

pub use bloch::{
    critical_pump_rates, symmetry_class, winding_number, winding_number_with, BlochModel, SymmetryClass,
    DEFAULT_K_SAMPLES,
};
pub use phase_map::{singular_gap_map, PhaseMap};

use crate::error::Result;
use crate::model::DynamicalMatrix;
use crate::numerics::{hermitian_eigenvalues, linear_fit, svd, CMat, CVec};

/// `[[0, H + i omega], [H^dagger - i omega, 0]]`.
#[derive(Debug, Clone)]
pub struct EffectiveHamiltonian {
    pub omega: f64,
    pub mat: CMat,
}

impl EffectiveHamiltonian {
    pub fn n_sites(&self) -> usize {
        self.mat.nrows() / 2
    }

    /// `diag(+1, ..., +1, -1, ..., -1)`.
    pub fn chiral_operator(&self) -> CMat {
        let n = self.n_sites();
        CMat::from_fn(2 * n, 2 * n, |i, j| {
            if i != j {
                0.0.into()
            } else if i < n {
                1.0.into()
            } else {
                (-1.0).into()
            }
        })
    }
}

pub fn effective_hamiltonian(h: &DynamicalMatrix, omega: f64) -> EffectiveHamiltonian {
    doubled(&h.shifted(omega), omega)
}

fn doubled(a: &CMat, omega: f64) -> EffectiveHamiltonian {
    let n = a.nrows();
    let mut mat = CMat::zeros(2 * n, 2 * n);
    mat.view_mut((0, n), (n, n)).copy_from(a);
    mat.view_mut((n, 0), (n, n)).copy_from(&a.adjoint());
    EffectiveHamiltonian { omega, mat }
}

#[derive(Debug, Clone, Copy)]
pub struct DualityReport {
    /// Largest gap between the sorted spectrum of the doubled Hamiltonian and
    /// the sorted set `{+s_n, -s_n}`.
    pub eigenvalue_deviation: f64,
    /// Largest `||H_eff w - (+-s_n) w||` for `w = (u_n, +-v_n)/sqrt(2)`.
    pub vector_residual: f64,
}

impl DualityReport {
    pub fn max_deviation(&self) -> f64 {
        self.eigenvalue_deviation.max(self.vector_residual)
    }
}

pub fn verify_svd_duality(h: &DynamicalMatrix, omega: f64) -> Result<DualityReport> {
    svd_duality(&h.shifted(omega))
}

/// Duality check for an arbitrary square matrix `a` in place of `H + i omega`.
pub fn svd_duality(a: &CMat) -> Result<DualityReport> {
    crate::numerics::ensure_square(a)?;
    let eff = doubled(a, 0.0);
    let d = svd(a)?;
    let mut expected: Vec<f64> = d.s.iter().flat_map(|&s| [s, -s]).collect();
    expected.sort_by(f64::total_cmp);
    let found = hermitian_eigenvalues(&eff.mat)?;
    let eigenvalue_deviation = expected.iter().zip(&found).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);

    let n = d.n();
    let mut vector_residual = 0.0_f64;
    for k in 0..n {
        for sign in [1.0, -1.0] {
            let mut w = CVec::zeros(2 * n);
            for i in 0..n {
                w[i] = d.u[(i, k)] / 2f64.sqrt();
                w[n + i] = d.v[(i, k)] * (sign / 2f64.sqrt());
            }
            let r = &eff.mat * &w - w.scale(sign * d.s[k]);
            vector_residual = vector_residual.max(r.norm());
        }
    }
    Ok(DualityReport { eigenvalue_deviation, vector_residual })
}

#[derive(Debug, Clone)]
pub struct EdgeMode {
    pub singular_value: f64,
    /// Left singular vector `u`.
    pub left: CVec,
    /// Right singular vector `v`.
    pub right: CVec,
    /// Decay length from a log-linear fit of `|u_j|`; `None` when the profile
    /// is flat or too short to fit.
    pub localization_fit: Option<f64>,
}

/// The `n_edge` smallest singular values of `H + i omega` with their vectors,
/// smallest first.
pub fn edge_modes(h: &DynamicalMatrix, omega: f64, n_edge: usize) -> Result<Vec<EdgeMode>> {
    if n_edge == 0 {
        return Err(crate::error::Error::param("n_edge", "must be at least 1"));
    }
    let d = svd(&h.shifted(omega))?;
    let n = d.n();
    Ok((0..n_edge.min(n))
        .map(|k| {
            let idx = n - 1 - k;
            let left: CVec = d.u.column(idx).into_owned();
            let right: CVec = d.v.column(idx).into_owned();
            let localization_fit = fit_decay_length(&left);
            EdgeMode { singular_value: d.s[idx], left, right, localization_fit }
        })
        .collect())
}

fn fit_decay_length(u: &CVec) -> Option<f64> {
    let peak = u.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let (x, y): (Vec<f64>, Vec<f64>) =
        u.iter().enumerate().filter(|(_, z)| z.norm() > 1e-13 * peak).map(|(j, z)| (j as f64, z.norm().ln())).unzip();
    let fit = linear_fit(&x, &y, None).ok()?;
    (fit.slope.abs() > 1e-12).then(|| 1.0 / fit.slope.abs())
}
