use nalgebra::linalg::Schur;
use num_complex::Complex64;

use super::{ensure_finite, ensure_square, max_abs, CMat};
use crate::error::{Error, Result};

/// Condition-number ceiling applied by [`solve_linear`].
pub const DEFAULT_MAX_CONDITION: f64 = 1e14;

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    /// Reject systems whose 1-norm condition estimate exceeds this value.
    /// `f64::INFINITY` skips the estimate; exactly singular pivots are still rejected.
    pub max_condition: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { max_condition: DEFAULT_MAX_CONDITION }
    }
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub x: CMat,
    /// 1-norm condition estimate, when it was computed.
    pub condition: Option<f64>,
}

/// Solves `a x = b` by LU with partial pivoting.
pub fn solve_linear(a: &CMat, b: &CMat) -> Result<CMat> {
    solve_linear_with(a, b, SolveOptions::default()).map(|s| s.x)
}

pub fn solve_linear_with(a: &CMat, b: &CMat, opts: SolveOptions) -> Result<Solution> {
    let n = ensure_square(a)?;
    if b.nrows() != n {
        return Err(Error::DimensionMismatch { expected: format!("{n} rows"), found: format!("{} rows", b.nrows()) });
    }
    ensure_finite(a)?;
    ensure_finite(b)?;
    if n == 0 {
        return Ok(Solution { x: b.clone(), condition: Some(1.0) });
    }

    let lu = a.clone().lu();
    let u = lu.u();
    let min_pivot = (0..n).map(|i| u[(i, i)].norm()).fold(f64::INFINITY, f64::min);
    let pivot_floor = if opts.max_condition.is_finite() { n as f64 * f64::EPSILON * max_abs(a) } else { 0.0 };
    if min_pivot <= pivot_floor {
        return Err(Error::NearSingular { condition: f64::INFINITY });
    }

    let condition = if opts.max_condition.is_finite() {
        let inv = lu.solve(&CMat::identity(n, n)).ok_or(Error::NearSingular { condition: f64::INFINITY })?;
        let cond = one_norm(a) * one_norm(&inv);
        if !(cond <= opts.max_condition) {
            return Err(Error::NearSingular { condition: cond });
        }
        Some(cond)
    } else {
        None
    };

    let x = lu.solve(b).ok_or(Error::NearSingular { condition: f64::INFINITY })?;
    if x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NearSingular { condition: f64::INFINITY });
    }
    Ok(Solution { x, condition })
}

fn one_norm(a: &CMat) -> f64 {
    a.column_iter().map(|col| col.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// Solves `conj(H) X + X H^T = rhs` by Bartels-Stewart on the complex Schur
/// form of `H`.
///
/// This is the stationarity condition of two-point correlators
/// `<a_j^dagger a_l>` driven by a linear drift `H`. It stays well posed for
/// defective `H` as long as no `conj(lambda_i) + lambda_l` vanishes.
pub fn solve_sylvester_conj(h: &CMat, rhs: &CMat) -> Result<CMat> {
    let n = ensure_square(h)?;
    ensure_finite(h)?;
    ensure_finite(rhs)?;
    if rhs.nrows() != n || rhs.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: format!("{n}x{n}"),
            found: format!("{}x{}", rhs.nrows(), rhs.ncols()),
        });
    }
    let (z, t) = schur_form(h)?;

    // With X = conj(Z) Y Z^T the equation becomes conj(T) Y + Y T^T = Z^T rhs conj(Z).
    let f = z.transpose() * rhs * z.conjugate();
    let tol = 1e-13 * t.norm().max(f64::MIN_POSITIVE);
    let mut y = CMat::zeros(n, n);
    for l in (0..n).rev() {
        let mut col: Vec<Complex64> = (0..n).map(|i| f[(i, l)]).collect();
        for m in l + 1..n {
            let b_ml = t[(l, m)];
            if b_ml != Complex64::ZERO {
                for (i, v) in col.iter_mut().enumerate() {
                    *v -= y[(i, m)] * b_ml;
                }
            }
        }
        for i in (0..n).rev() {
            let mut acc = col[i];
            for k in i + 1..n {
                acc -= t[(i, k)].conj() * y[(k, l)];
            }
            let den = t[(i, i)].conj() + t[(l, l)];
            if den.norm() <= tol {
                return Err(Error::IllConditioned(format!(
                    "conj(lambda_{i}) + lambda_{l} = {den:.3e} is numerically zero"
                )));
            }
            y[(i, l)] = acc / den;
        }
    }
    Ok(z.conjugate() * y * z.transpose())
}

/// Unitary `Z` and upper-triangular `T` with `H = Z T Z^dagger`.
fn schur_form(h: &CMat) -> Result<(CMat, CMat)> {
    let n = h.nrows();
    let upper = (0..n).all(|j| (j + 1..n).all(|i| h[(i, j)] == Complex64::ZERO));
    if upper {
        return Ok((CMat::identity(n, n), h.clone()));
    }
    let lower = (0..n).all(|j| (0..j).all(|i| h[(i, j)] == Complex64::ZERO));
    if lower {
        // Index reversal maps lower-triangular onto upper-triangular exactly.
        let p = CMat::from_fn(n, n, |i, j| if i + j == n - 1 { Complex64::ONE } else { Complex64::ZERO });
        let t = &p * h * &p;
        return Ok((p, t));
    }
    let schur = Schur::try_new(h.clone(), f64::EPSILON, 0).ok_or(Error::NoConvergence("schur"))?;
    Ok(schur.unpack())
}
