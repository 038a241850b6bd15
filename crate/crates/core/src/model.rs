//! Lattice specifications and the non-Hermitian dynamical matrix.
//!
//! A lattice of `N` bosonic modes is described by local frequencies `omega_j`,
//! local decay rates `kappa_j`, a Hermitian coherent coupling matrix `G` and
//! two positive semi-definite matrices for incoherent pumping and loss. The
//! linearized Langevin drift is
//!
//! ```text
//! H = Gamma - i diag(omega) - i G,
//! Gamma = -diag(kappa)/2 + pump/2 - loss^T/2.
//! ```

use std::fmt;
use std::sync::Arc;

use crate::chain1d::ChainParams;
use crate::error::{Error, Result};
use crate::numerics::{c, hermitian_eigenvalues, shift_imag, unit_phase, CMat, I};

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeSpec {
    pub omega: Vec<f64>,
    pub kappa: Vec<f64>,
    /// Coherent tunneling `G`; Hermitian with zero diagonal.
    pub coupling: CMat,
    /// Incoherent pump matrix; Hermitian PSD.
    pub pump: CMat,
    /// Incoherent loss matrix; Hermitian PSD.
    pub loss: CMat,
}

impl LatticeSpec {
    /// Uncoupled modes with the given frequencies and decay rates.
    pub fn uncoupled(omega: Vec<f64>, kappa: Vec<f64>) -> Self {
        let n = omega.len();
        LatticeSpec { omega, kappa, coupling: CMat::zeros(n, n), pump: CMat::zeros(n, n), loss: CMat::zeros(n, n) }
    }

    pub fn n_sites(&self) -> usize {
        self.omega.len()
    }

    pub(crate) fn check_site(&self, site: usize) -> Result<()> {
        if site < self.n_sites() {
            Ok(())
        } else {
            Err(Error::SiteOutOfRange { site, n_sites: self.n_sites() })
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub field: &'static str,
    pub invariant: &'static str,
    pub residual: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, invariant: &str) -> bool {
        self.violations.iter().any(|v| v.invariant == invariant)
    }

    fn push(&mut self, field: &'static str, invariant: &'static str, residual: f64) {
        self.violations.push(Violation { field, invariant, residual });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "no violations");
        }
        for (k, v) in self.violations.iter().enumerate() {
            if k > 0 {
                writeln!(f)?;
            }
            write!(f, "  {}: {} (residual {:.3e})", v.field, v.invariant, v.residual)?;
        }
        Ok(())
    }
}

pub const G_NOT_HERMITIAN: &str = "G not Hermitian";
pub const G_DIAGONAL: &str = "G has nonzero diagonal";
pub const PUMP_NOT_HERMITIAN: &str = "pump not Hermitian";
pub const PUMP_NOT_PSD: &str = "pump not PSD";
pub const LOSS_NOT_HERMITIAN: &str = "loss not Hermitian";
pub const LOSS_NOT_PSD: &str = "loss not PSD";
pub const KAPPA_NEGATIVE: &str = "kappa negative";
pub const NON_FINITE: &str = "non-finite entry";
pub const SHAPE: &str = "dimension mismatch";
pub const EMPTY: &str = "no sites";

const REL_TOL: f64 = 1e-10;

/// Checks every [`LatticeSpec`] invariant and reports all violations.
pub fn validate_spec(spec: &LatticeSpec) -> ValidationReport {
    let mut report = ValidationReport::default();
    let n = spec.omega.len();
    if n == 0 {
        report.push("omega", EMPTY, 0.0);
        return report;
    }
    if spec.kappa.len() != n {
        report.push("kappa", SHAPE, spec.kappa.len().abs_diff(n) as f64);
    }
    for (field, m) in [("coupling", &spec.coupling), ("pump", &spec.pump), ("loss", &spec.loss)] {
        if m.nrows() != n || m.ncols() != n {
            report.push(field, SHAPE, (m.nrows() * m.ncols()).abs_diff(n * n) as f64);
        }
    }
    if !report.is_ok() {
        return report;
    }

    if spec.omega.iter().any(|w| !w.is_finite()) {
        report.push("omega", NON_FINITE, f64::NAN);
    }
    if spec.kappa.iter().any(|k| !k.is_finite()) {
        report.push("kappa", NON_FINITE, f64::NAN);
    }
    let most_negative = spec.kappa.iter().copied().fold(0.0, f64::min);
    if most_negative < 0.0 {
        report.push("kappa", KAPPA_NEGATIVE, -most_negative);
    }

    let finite = |m: &CMat| m.iter().all(|z| z.re.is_finite() && z.im.is_finite());
    let mut matrices_ok = true;
    for (field, m) in [("coupling", &spec.coupling), ("pump", &spec.pump), ("loss", &spec.loss)] {
        if !finite(m) {
            report.push(field, NON_FINITE, f64::NAN);
            matrices_ok = false;
        }
    }
    if !matrices_ok {
        return report;
    }

    let g = &spec.coupling;
    let tol = REL_TOL * g.norm();
    let herm = hermiticity_residual(g);
    if herm > tol {
        report.push("coupling", G_NOT_HERMITIAN, herm);
    }
    let diag = (0..n).map(|j| g[(j, j)].norm()).fold(0.0, f64::max);
    if diag > tol {
        report.push("coupling", G_DIAGONAL, diag);
    }

    for (field, m, not_herm, not_psd) in
        [("pump", &spec.pump, PUMP_NOT_HERMITIAN, PUMP_NOT_PSD), ("loss", &spec.loss, LOSS_NOT_HERMITIAN, LOSS_NOT_PSD)]
    {
        let tol = REL_TOL * m.norm();
        let herm = hermiticity_residual(m);
        if herm > tol {
            report.push(field, not_herm, herm);
        }
        let sym = (m + m.adjoint()).scale(0.5);
        match hermitian_eigenvalues(&sym) {
            Ok(ev) => {
                let lowest = ev.first().copied().unwrap_or(0.0);
                if lowest < -tol {
                    report.push(field, not_psd, -lowest);
                }
            }
            Err(_) => report.push(field, not_psd, f64::NAN),
        }
    }
    report
}

fn hermiticity_residual(m: &CMat) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for j in 0..n {
        for l in j..n {
            worst = worst.max((m[(j, l)] - m[(l, j)].conj()).norm());
        }
    }
    worst
}

/// The drift matrix `H` together with the spec it was assembled from.
#[derive(Debug, Clone)]
pub struct DynamicalMatrix {
    pub h: CMat,
    pub spec: Arc<LatticeSpec>,
}

impl DynamicalMatrix {
    pub fn n(&self) -> usize {
        self.h.nrows()
    }

    /// `H + i omega 1`.
    pub fn shifted(&self, omega: f64) -> CMat {
        shift_imag(&self.h, omega)
    }
}

/// Dissipative part `Gamma = -diag(kappa)/2 + pump/2 - loss^T/2`.
pub fn dissipative_part(spec: &LatticeSpec) -> CMat {
    let mut gamma = (&spec.pump - spec.loss.transpose()).scale(0.5);
    for (j, k) in spec.kappa.iter().enumerate() {
        gamma[(j, j)] -= c(0.5 * k, 0.0);
    }
    gamma
}

/// Assembles `H`; rejects specs that fail [`validate_spec`].
pub fn build_dynamical_matrix(spec: &LatticeSpec) -> Result<DynamicalMatrix> {
    let report = validate_spec(spec);
    if !report.is_ok() {
        return Err(Error::InvalidSpec(report));
    }
    let mut h = dissipative_part(spec) - spec.coupling.map(|z| z * I);
    for (j, w) in spec.omega.iter().enumerate() {
        h[(j, j)] -= c(0.0, *w);
    }
    Ok(DynamicalMatrix { h, spec: Arc::new(spec.clone()) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Boundary {
    Open,
    Periodic,
}

/// Reference chain: coherent hopping `t_c e^{i phi}` from site `j` to `j+1`,
/// dissipative hopping `t_d` and uniform decay `kappa = 8 t_d - 2 gamma_p`.
///
/// With `phi = pi/2` and `t_c = t_d` the drift only couples forward
/// (`H_{j+1,j} = 2 t_d`), so signals injected at the first site are amplified
/// towards the last one.
pub fn build_chain_spec(p: &ChainParams, boundary: Boundary) -> Result<LatticeSpec> {
    p.validate()?;
    let n = p.n_sites;
    if boundary == Boundary::Periodic && n < 3 {
        return Err(Error::param("n_sites", "periodic chains need at least 3 sites"));
    }
    let forward = unit_phase(p.phi) * p.t_c;
    let mut g = CMat::zeros(n, n);
    let mut pump = CMat::from_diagonal_element(n, n, c(4.0 * p.t_d, 0.0));
    let mut link = |a: usize, b: usize| {
        // b is the successor of a
        g[(b, a)] = forward;
        g[(a, b)] = forward.conj();
        pump[(a, b)] = c(2.0 * p.t_d, 0.0);
        pump[(b, a)] = c(2.0 * p.t_d, 0.0);
    };
    for j in 0..n.saturating_sub(1) {
        link(j, j + 1);
    }
    if boundary == Boundary::Periodic {
        link(n - 1, 0);
    }
    Ok(LatticeSpec { omega: vec![p.omega0; n], kappa: vec![p.kappa(); n], coupling: g, pump, loss: CMat::zeros(n, n) })
}
