//! Dense complex linear algebra and quadrature kernels.
//!
//! Every other module goes through these entry points for decompositions,
//! linear solves and frequency integrals, so the accuracy contracts live here:
//!
//! * [`svd`] returns singular values sorted in descending order, so edge modes
//!   of a topological lattice sit at the *last* indices.
//! * [`eig`] returns right eigenvectors normalized to unit 2-norm with the
//!   first non-negligible component real and positive.
//! * [`solve_linear`] refuses systems whose condition estimate exceeds
//!   [`DEFAULT_MAX_CONDITION`].
//! * [`quad_adaptive`] integrates over the whole real line.

mod decomp;
mod fit;
mod quad;
mod solve;

pub use decomp::{eig, hermitian_eigenvalues, svd, EigenSystem, SvdTriple};
pub use fit::{linear_fit, LinearFit};
pub use quad::{quad_adaptive, quad_adaptive_vec, QuadOptions, QuadResult};
pub use solve::{solve_linear, solve_linear_with, solve_sylvester_conj, Solution, SolveOptions, DEFAULT_MAX_CONDITION};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex matrix used throughout the crate.
pub type CMat = DMatrix<Complex64>;
/// Dense complex vector.
pub type CVec = DVector<Complex64>;

pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub(crate) fn ensure_finite(a: &CMat) -> Result<()> {
    if a.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

pub(crate) fn ensure_square(a: &CMat) -> Result<usize> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch {
            expected: "square matrix".into(),
            found: format!("{}x{}", a.nrows(), a.ncols()),
        });
    }
    Ok(a.nrows())
}

/// Largest entry modulus; cheap scale for relative tolerances.
pub fn max_abs(a: &CMat) -> f64 {
    a.iter().fold(0.0_f64, |m, z| m.max(z.norm()))
}

/// Spectral-norm-free residual `||a - b||_F / max(||a||_F, tiny)`.
pub fn relative_difference(a: &CMat, b: &CMat) -> f64 {
    let scale = a.norm().max(f64::MIN_POSITIVE);
    (a - b).norm() / scale
}

/// `e^{i phi}` with round-off components flushed to zero, so that multiples
/// of `pi/2` give exact axis-aligned phases.
pub fn unit_phase(phi: f64) -> Complex64 {
    let (s, co) = phi.sin_cos();
    let snap = |x: f64| if x.abs() < 4.0 * f64::EPSILON { 0.0 } else { x };
    c(snap(co), snap(s))
}

/// Returns `a + i*omega*1`.
pub fn shift_imag(a: &CMat, omega: f64) -> CMat {
    let mut out = a.clone();
    for d in 0..out.nrows() {
        out[(d, d)] += c(0.0, omega);
    }
    out
}
