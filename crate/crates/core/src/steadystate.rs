//! Steady-state two-point correlations `M_jl = <da_j^dagger da_l>` of the
//! lattice fluctuations.
//!
//! Stationarity of the linear Langevin dynamics requires
//! `conj(H) M + M H^T = -pump^T`. Two evaluation paths are offered: the
//! eigendecomposition `M = conj(B) Y B^T` with
//! `Y_nm = -F_nm / (conj(lambda_n) + lambda_m)`, and the frequency integral
//! `M = (1/2pi) int conj(Q) pump^T Q^T d omega`. Defective drifts, such as the
//! uni-directional chain, fall back to a Schur-based Sylvester solve.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::{build_dynamical_matrix, DynamicalMatrix, LatticeSpec};
use crate::numerics::{
    c, eig, ensure_square, hermitian_eigenvalues, quad_adaptive_vec, solve_linear_with, solve_sylvester_conj, CMat,
    QuadOptions, SolveOptions,
};
use crate::response::{output_noise_profile, response_matrix, spectral_window};

#[derive(Debug, Clone)]
pub struct CorrelationMatrix {
    pub m: CMat,
}

impl CorrelationMatrix {
    pub fn hermiticity_residual(&self) -> f64 {
        (&self.m - self.m.adjoint()).norm()
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        let sym = (&self.m + self.m.adjoint()).scale(0.5);
        Ok(hermitian_eigenvalues(&sym)?.first().copied().unwrap_or(0.0))
    }

    /// Mean occupation of each mode.
    pub fn occupations(&self) -> Vec<f64> {
        (0..self.m.nrows()).map(|j| self.m[(j, j)].re).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    /// Eigendecomposition when the drift is safely diagonalizable, Schur otherwise.
    #[default]
    Auto,
    Eigen,
    Schur,
}

/// Eigenvector condition above which [`Method::Auto`] abandons the eigen path.
const MAX_EIGENVECTOR_CONDITION: f64 = 1e8;

fn check_inputs(h: &DynamicalMatrix, pump: &CMat) -> Result<()> {
    let n = h.n();
    if ensure_square(pump)? != n {
        return Err(Error::DimensionMismatch {
            expected: format!("{n}x{n} pump"),
            found: format!("{}x{}", pump.nrows(), pump.ncols()),
        });
    }
    Ok(())
}

/// Steady state by the eigensystem formula.
pub fn steady_correlation_eig(h: &DynamicalMatrix, pump: &CMat) -> Result<CorrelationMatrix> {
    steady_correlation_with(h, pump, Method::Auto)
}

pub fn steady_correlation_with(h: &DynamicalMatrix, pump: &CMat, method: Method) -> Result<CorrelationMatrix> {
    check_inputs(h, pump)?;
    let es = eig(&h.h)?;
    let max_re = es.max_real();
    if !(max_re < 0.0) {
        return Err(Error::Unstable { max_re });
    }
    let source = -pump.transpose();
    match method {
        Method::Schur => Ok(CorrelationMatrix { m: solve_sylvester_conj(&h.h, &source)? }),
        Method::Eigen => eigen_path(h, &es, &source),
        Method::Auto => {
            if es.residual <= 1e-10 {
                match eigen_path(h, &es, &source) {
                    Ok(m) => return Ok(m),
                    Err(Error::NearSingular { .. }) | Err(Error::IllConditioned(_)) => {}
                    Err(e) => return Err(e),
                }
            }
            log::debug!("eigenvector basis unusable (residual {:.2e}); using Schur path", es.residual);
            Ok(CorrelationMatrix { m: solve_sylvester_conj(&h.h, &source)? })
        }
    }
}

fn eigen_path(h: &DynamicalMatrix, es: &crate::numerics::EigenSystem, source: &CMat) -> Result<CorrelationMatrix> {
    if es.residual > 1e-8 {
        return Err(Error::IllConditioned(format!(
            "drift is defective or nearly so (eigen residual {:.2e})",
            es.residual
        )));
    }
    let n = h.n();
    let b = &es.vectors;
    let opts = SolveOptions { max_condition: MAX_EIGENVECTOR_CONDITION };
    // F = conj(B)^{-1} source B^{-T}
    let left = solve_linear_with(&b.conjugate(), source, opts)?.x;
    let f = solve_linear_with(b, &left.transpose(), opts)?.x.transpose();
    let tol = 1e-13 * h.h.norm().max(f64::MIN_POSITIVE);
    let mut y = CMat::zeros(n, n);
    for a in 0..n {
        for m in 0..n {
            let den = es.values[a].conj() + es.values[m];
            if den.norm() <= tol {
                return Err(Error::IllConditioned(format!("conj(lambda_{a}) + lambda_{m} vanishes")));
            }
            y[(a, m)] = f[(a, m)] / den;
        }
    }
    Ok(CorrelationMatrix { m: b.conjugate() * y * b.transpose() })
}

/// Steady state by frequency integration of the response.
///
/// Entry `(j, l)` converges to `rel_tol * sqrt(M_jj M_ll)`, so the diagonal
/// sets the accuracy scale for the off-diagonal correlations.
pub fn steady_correlation_integral(h: &DynamicalMatrix, pump: &CMat, rel_tol: f64) -> Result<CorrelationMatrix> {
    check_inputs(h, pump)?;
    let (center, scale) = spectral_window(h)?;
    let n = h.n();
    let gt = pump.transpose();
    let integrand = |w: f64| -> Vec<f64> {
        match response_matrix(h, w) {
            Ok(r) => {
                let m = r.q.conjugate() * &gt * r.q.transpose();
                m.iter().flat_map(|z| [z.re, z.im]).collect()
            }
            Err(_) => vec![f64::NAN; 2 * n * n],
        }
    };
    let reference = |v: &[f64]| -> Vec<f64> {
        // column-major (j, l) -> index 2 (j + l n)
        let diag: Vec<f64> = (0..n).map(|j| v[2 * (j + j * n)].abs()).collect();
        let mut out = Vec::with_capacity(2 * n * n);
        for l in 0..n {
            for j in 0..n {
                let s = (diag[j] * diag[l]).sqrt();
                out.push(s);
                out.push(s);
            }
        }
        out
    };
    let res = quad_adaptive_vec(integrand, center, scale, &QuadOptions::with_rel_tol(rel_tol), reference)?;
    let v = res.value;
    let m = CMat::from_fn(n, n, |j, l| {
        let k = 2 * (j + l * n);
        c(v[k], v[k + 1]) / (2.0 * PI)
    });
    Ok(CorrelationMatrix { m })
}

/// `||conj(H) M + M H^T + pump^T||`.
pub fn stationarity_residual(h: &DynamicalMatrix, pump: &CMat, m: &CorrelationMatrix) -> f64 {
    (h.h.conjugate() * &m.m + &m.m * h.h.transpose() + pump.transpose()).norm()
}

/// Largest relative gap between `kappa_j M_jj` and the integrated output noise
/// `N_j` of the input-output solution.
pub fn consistency_with_io(spec: &LatticeSpec) -> Result<f64> {
    let h = build_dynamical_matrix(spec)?;
    let m = steady_correlation_eig(&h, &spec.pump)?;
    let noise = output_noise_profile(spec, 1e-10)?;
    let mut worst = 0.0_f64;
    for (j, nj) in noise.iter().enumerate() {
        let from_m = spec.kappa[j] * m.m[(j, j)].re;
        let dev = if *nj > 0.0 { (from_m - nj).abs() / nj } else { from_m.abs() };
        worst = worst.max(dev);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain1d::ChainParams;
    use crate::model::{build_chain_spec, Boundary};
    use proptest::prelude::*;

    fn single(g: f64) -> LatticeSpec {
        let mut s = LatticeSpec::uncoupled(vec![0.0], vec![2.0]);
        s.pump = CMat::from_element(1, 1, c(g, 0.0));
        s
    }

    #[test]
    fn single_mode_fixed_point() {
        let spec = single(0.8);
        let h = build_dynamical_matrix(&spec).unwrap();
        for method in [Method::Auto, Method::Eigen, Method::Schur] {
            let m = steady_correlation_with(&h, &spec.pump, method).unwrap();
            // 2 Re(H) M = -g with H = -0.6
            assert!((m.m[(0, 0)] - c(2.0 / 3.0, 0.0)).norm() < 1e-14);
        }
        let mi = steady_correlation_integral(&h, &spec.pump, 1e-10).unwrap();
        assert!((mi.m[(0, 0)].re - 2.0 / 3.0).abs() < 1e-10);
        assert!(consistency_with_io(&spec).unwrap() < 1e-8);
    }

    #[test]
    fn vacuum_without_pump() {
        let mut spec = build_chain_spec(&ChainParams::reference_chain(), Boundary::Open).unwrap();
        spec.pump = CMat::zeros(10, 10);
        spec.kappa = vec![4.0; 10];
        let h = build_dynamical_matrix(&spec).unwrap();
        assert_eq!(steady_correlation_eig(&h, &spec.pump).unwrap().m, CMat::zeros(10, 10));
        assert_eq!(steady_correlation_integral(&h, &spec.pump, 1e-6).unwrap().m, CMat::zeros(10, 10));
        assert_eq!(consistency_with_io(&spec).unwrap(), 0.0);
    }

    #[test]
    fn chain_a_uses_schur_fallback_and_grows_fourfold() {
        let spec = build_chain_spec(&ChainParams::reference_chain(), Boundary::Open).unwrap();
        let h = build_dynamical_matrix(&spec).unwrap();
        assert!(steady_correlation_with(&h, &spec.pump, Method::Eigen).is_err());
        let m = steady_correlation_eig(&h, &spec.pump).unwrap();
        assert!(stationarity_residual(&h, &spec.pump, &m) <= 1e-8 * spec.pump.norm() * m.m.norm().max(1.0));
        let occ = m.occupations();
        for j in 5..9 {
            let ratio = occ[j + 1] / occ[j];
            assert!((ratio - 4.0).abs() < 0.6, "{ratio}");
        }
        let mi = steady_correlation_integral(&h, &spec.pump, 1e-9).unwrap();
        assert!((&mi.m - &m.m).norm() <= 1e-6 * m.m.norm());
        assert!(consistency_with_io(&spec).unwrap() < 1e-4);
    }

    #[test]
    fn unstable_drift_is_refused() {
        let spec = build_chain_spec(&ChainParams::reference_chain().with_gamma_p(2.2), Boundary::Open).unwrap();
        let h = build_dynamical_matrix(&spec).unwrap();
        assert!(matches!(steady_correlation_eig(&h, &spec.pump), Err(Error::Unstable { .. })));
        assert!(matches!(steady_correlation_integral(&h, &spec.pump, 1e-6), Err(Error::Unstable { .. })));
    }

    pub(crate) fn arb_stable_pumped() -> impl Strategy<Value = LatticeSpec> {
        (1usize..=8).prop_flat_map(|n| {
            let omega = proptest::collection::vec(-1.0..1.0f64, n);
            let kappa = proptest::collection::vec(0.5..3.0f64, n);
            let entries = proptest::collection::vec((-0.5..0.5f64, -0.5..0.5f64), 3 * n * n);
            (omega, kappa, entries).prop_filter_map("stable", move |(omega, kappa, e)| {
                let raw =
                    |k: usize| CMat::from_fn(n, n, |i, j| c(e[k * n * n + i * n + j].0, e[k * n * n + i * n + j].1));
                let a = raw(0);
                let mut coupling = (&a + a.adjoint()).scale(0.5);
                for d in 0..n {
                    coupling[(d, d)] = c(0.0, 0.0);
                }
                let b = raw(1);
                let d = raw(2);
                let spec = LatticeSpec { omega, kappa, coupling, pump: &b * b.adjoint(), loss: &d * d.adjoint() };
                let h = build_dynamical_matrix(&spec).ok()?;
                (eig(&h.h).ok()?.max_real() < -0.05).then_some(spec)
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn steady_state_is_hermitian_psd_and_stationary(spec in arb_stable_pumped()) {
            let h = build_dynamical_matrix(&spec).unwrap();
            let m = steady_correlation_eig(&h, &spec.pump).unwrap();
            let scale = m.m.norm().max(1e-300);
            prop_assert!(m.hermiticity_residual() <= 1e-9 * scale.max(1.0));
            prop_assert!(m.min_eigenvalue().unwrap() >= -1e-9 * scale.max(1.0));
            prop_assert!(stationarity_residual(&h, &spec.pump, &m) <= 1e-8 * spec.pump.norm());
        }

        #[test]
        fn eigen_and_integral_paths_agree(spec in arb_stable_pumped()) {
            let h = build_dynamical_matrix(&spec).unwrap();
            let a = steady_correlation_eig(&h, &spec.pump).unwrap();
            let b = steady_correlation_integral(&h, &spec.pump, 1e-9).unwrap();
            prop_assert!((&a.m - &b.m).norm() <= 1e-6 * a.m.norm());
        }
    }
}
