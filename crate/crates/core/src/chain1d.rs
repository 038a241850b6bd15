//! Non-reciprocal reference chain: closed-form edge-mode analytics and exact
//! spectra.
//!
//! The chain has coherent hopping `t_c e^{i phi}`, dissipative hopping `t_d`,
//! a net pump rate `gamma_p` and uniform decay `kappa = 8 t_d - 2 gamma_p`.
//! For `phi = pi/2`, `t_c = t_d` the drift is strictly lower bidiagonal and
//! the edge-mode closed forms below are exact up to finite-size terms of
//! order `e^{-N/xi}`. Site arguments are 0-based; the formulas use the 1-based
//! position `j = site + 1`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::Boundary;
use crate::numerics::{c, unit_phase};
use crate::topology::BlochModel;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainParams {
    pub t_c: f64,
    pub t_d: f64,
    pub phi: f64,
    pub gamma_p: f64,
    pub omega0: f64,
    pub n_sites: usize,
}

impl ChainParams {
    /// `t_c = t_d = 1`, `phi = pi/2`, `gamma_p = 1`, `omega0 = 0`, ten sites.
    pub fn reference_chain() -> Self {
        ChainParams { t_c: 1.0, t_d: 1.0, phi: FRAC_PI_2, gamma_p: 1.0, omega0: 0.0, n_sites: 10 }
    }

    pub fn with_gamma_p(mut self, gamma_p: f64) -> Self {
        self.gamma_p = gamma_p;
        self
    }

    pub fn with_sites(mut self, n_sites: usize) -> Self {
        self.n_sites = n_sites;
        self
    }

    pub fn kappa(&self) -> f64 {
        8.0 * self.t_d - 2.0 * self.gamma_p
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("t_c", self.t_c), ("t_d", self.t_d)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::param(name, format!("must be positive, got {v}")));
            }
        }
        if !self.phi.is_finite() {
            return Err(Error::param("phi", "must be finite"));
        }
        if !self.omega0.is_finite() {
            return Err(Error::param("omega0", "must be finite"));
        }
        if !(self.gamma_p >= 0.0 && self.gamma_p < 4.0 * self.t_d) {
            return Err(Error::param(
                "gamma_p",
                format!(
                    "must satisfy 0 <= gamma_p < 4 t_d so that kappa > 0 (gamma_p = {}, t_d = {})",
                    self.gamma_p, self.t_d
                ),
            ));
        }
        if self.n_sites == 0 {
            return Err(Error::param("n_sites", "must be at least 1"));
        }
        Ok(())
    }

    /// True in the regime where the edge-mode closed forms apply.
    pub fn is_analytic(&self) -> bool {
        (self.phi - FRAC_PI_2).abs() <= 1e-12 && (self.t_c - self.t_d).abs() <= 1e-12 * self.t_d
    }

    fn require_analytic(&self) -> Result<()> {
        self.validate()?;
        if self.is_analytic() {
            Ok(())
        } else {
            log::warn!(
                "closed forms only hold for phi = pi/2 and t_c = t_d (phi = {}, t_c = {}, t_d = {}); use the dense path",
                self.phi,
                self.t_c,
                self.t_d
            );
            Err(Error::param("phi", "closed forms need phi = pi/2 and t_c = t_d"))
        }
    }

    fn position(&self, site: usize) -> Result<f64> {
        if site < self.n_sites {
            Ok((site + 1) as f64)
        } else {
            Err(Error::SiteOutOfRange { site, n_sites: self.n_sites })
        }
    }
}

/// Distance of the Bloch circle's center from the probe point,
/// `sqrt((omega - omega0)^2 + (gamma_p - 2 t_d)^2)`.
pub fn r_of_omega(p: &ChainParams, omega: f64) -> f64 {
    (omega - p.omega0).hypot(p.gamma_p - 2.0 * p.t_d)
}

/// Edge-mode localization length `1 / ln(2 t_d / r)`.
pub fn localization_length(p: &ChainParams, omega: f64) -> Result<f64> {
    let r = r_of_omega(p, omega);
    let limit = 2.0 * p.t_d;
    if r >= limit {
        return Err(Error::TrivialPhase { r, limit });
    }
    Ok(1.0 / (limit / r).ln())
}

/// Edge-mode quantities at one probe frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SshAnalytics {
    pub r: f64,
    pub xi: f64,
    /// Normalization `1 / (1 - e^{-2/xi})`.
    pub rho: f64,
    /// Bulk scale `2 t_d (1 - (r / 2 t_d)^2)`.
    pub s0: f64,
    /// Smallest singular value `s0 e^{-N/xi}`.
    pub s_n: f64,
    n_sites: usize,
}

impl SshAnalytics {
    /// `e^{-1/xi} = r / 2 t_d`.
    pub fn decay(&self) -> f64 {
        (-1.0 / self.xi).exp()
    }

    /// Edge singular-vector moduli `rho^{-1/2} e^{-(j-1)/xi}`, j = 1..N.
    pub fn edge_profile(&self) -> Vec<f64> {
        let q = self.decay();
        let norm = self.rho.sqrt().recip();
        (0..self.n_sites).map(|k| norm * q.powi(k as i32)).collect()
    }
}

pub fn ssh_closed_forms(p: &ChainParams, omega: f64) -> Result<SshAnalytics> {
    p.require_analytic()?;
    let r = r_of_omega(p, omega);
    let xi = localization_length(p, omega)?;
    let q = r / (2.0 * p.t_d);
    let rho = 1.0 / (1.0 - q * q);
    let s0 = 2.0 * p.t_d * (1.0 - q * q);
    Ok(SshAnalytics { r, xi, rho, s0, s_n: s0 * q.powi(p.n_sites as i32), n_sites: p.n_sites })
}

/// Edge-mode estimate of `|Q_{j l}(omega)|`, `e^{(j - l + 1)/xi} / (rho s0)`.
///
/// Valid for `j >= l`, away from the first site; upstream elements are
/// exponentially small and not captured.
pub fn closed_form_q(p: &ChainParams, omega: f64, site: usize, from: usize) -> Result<f64> {
    let a = ssh_closed_forms(p, omega)?;
    let j = p.position(site)?;
    let l = p.position(from)?;
    Ok(((j - l + 1.0) / a.xi).exp() / (a.rho * a.s0))
}

/// Gain at site `j > 1` for a signal injected at the first site,
/// `kappa^2 e^{2j/xi} / (rho s0)^2`.
pub fn closed_form_gain(p: &ChainParams, omega_d: f64, site: usize) -> Result<f64> {
    let a = ssh_closed_forms(p, omega_d)?;
    let j = p.position(site)?;
    if site == 0 {
        return Err(Error::param("site", "no closed form at the input site"));
    }
    let k = p.kappa();
    Ok(k * k * (2.0 * j / a.xi).exp() / (a.rho * a.s0).powi(2))
}

/// Total gain summed over the chain, `kappa^2 e^{2N/xi} / (rho s0^2)`.
pub fn closed_form_total_gain(p: &ChainParams, omega_d: f64) -> Result<f64> {
    let a = ssh_closed_forms(p, omega_d)?;
    let k = p.kappa();
    Ok(k * k * (2.0 * p.n_sites as f64 / a.xi).exp() / (a.rho * a.s0 * a.s0))
}

/// Half-width of the gain peak at site `j`, `(2 t_d - gamma_p) / sqrt(j)`.
pub fn bandwidth(p: &ChainParams, site: usize) -> Result<f64> {
    p.require_analytic()?;
    let j = p.position(site)?;
    Ok((2.0 * p.t_d - p.gamma_p).abs() / j.sqrt())
}

fn require_amplifying(p: &ChainParams) -> Result<()> {
    if p.gamma_p >= 2.0 * p.t_d {
        return Err(Error::Unstable { max_re: p.gamma_p - 2.0 * p.t_d });
    }
    Ok(())
}

/// `(1/2pi) int ((2t_d)^2 / ((omega-omega0)^2 + (2t_d-gamma_p)^2))^j d omega`
/// evaluated exactly through the central binomial coefficient.
pub fn noise_integral_exact(p: &ChainParams, j: usize) -> Result<f64> {
    p.validate()?;
    require_amplifying(p)?;
    if j == 0 {
        return Err(Error::param("j", "must be at least 1"));
    }
    let b = 2.0 * p.t_d - p.gamma_p;
    // C(2m, m) / 4^m with m = j - 1, accumulated as a product to avoid overflow.
    let m = j - 1;
    let central = (1..=m).fold(1.0, |acc, k| acc * (2 * k - 1) as f64 / (2 * k) as f64);
    Ok(0.5 * b * central * (2.0 * p.t_d / b).powi(2 * j as i32))
}

/// Large-`j` form of [`noise_integral_exact`].
pub fn noise_integral_asymptotic(p: &ChainParams, j: usize) -> Result<f64> {
    p.validate()?;
    require_amplifying(p)?;
    if j < 2 {
        return Err(Error::param("j", "asymptotic form needs j >= 2"));
    }
    let b = 2.0 * p.t_d - p.gamma_p;
    Ok(b / (2.0 * PI.sqrt()) / ((j - 1) as f64).sqrt() * (2.0 * p.t_d / b).powi(2 * j as i32))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseClosedForm {
    /// `n_amp_j(omega0) / e^{2j/xi}`.
    pub amp_prefactor: f64,
    /// `N_0` in `N_j = N_0 e^{2j/xi} / sqrt(j-1)`.
    pub noise_scale: f64,
    /// Output noise flux at the requested site, large-`j` form.
    pub site: f64,
    /// Same, with the exact binomial frequency integral.
    pub site_exact_integral: f64,
    /// Output noise summed over the chain.
    pub total: f64,
}

/// Output noise flux at `site` and summed over the chain at zero input noise.
pub fn closed_form_noise(p: &ChainParams, site: usize) -> Result<NoiseClosedForm> {
    require_amplifying(p)?;
    let a = ssh_closed_forms(p, p.omega0)?;
    let j = p.position(site)?;
    if j < 2.0 {
        return Err(Error::param("site", "noise closed form needs j >= 2"));
    }
    let (k, td, b) = (p.kappa(), p.t_d, 2.0 * p.t_d - p.gamma_p);
    let e = a.decay();
    let amp_prefactor = 4.0 * k * td * (1.0 + e) / (a.rho * a.s0 * a.s0);
    let noise_scale = 2.0 * k * td * b * (1.0 + e) / (PI.sqrt() * a.rho * a.s0 * a.s0);
    let growth = |x: f64| (2.0 * x / a.xi).exp();
    let n = p.n_sites as f64;
    let total = if p.n_sites >= 2 {
        2.0 * k * td * b * (1.0 + e) / (PI.sqrt() * a.s0 * a.s0) * growth(n) / (n - 1.0).sqrt()
    } else {
        f64::NAN
    };
    Ok(NoiseClosedForm {
        amp_prefactor,
        noise_scale,
        site: noise_scale * growth(j) / (j - 1.0).sqrt(),
        site_exact_integral: amp_prefactor * noise_integral_exact(p, j as usize)?,
        total,
    })
}

/// Added noise deep inside the chain, `(4 t_d / kappa) / (1 - e^{-1/xi})`.
pub fn closed_form_added_noise(p: &ChainParams, omega: f64) -> Result<f64> {
    let a = ssh_closed_forms(p, omega)?;
    Ok(4.0 * p.t_d / p.kappa() / (1.0 - a.decay()))
}

/// Resonant special case `8 t_d^2 / (kappa (2 t_d - |gamma_p - 2 t_d|))`.
pub fn closed_form_added_noise_resonant(p: &ChainParams) -> Result<f64> {
    p.require_analytic()?;
    localization_length(p, p.omega0)?;
    let td = p.t_d;
    Ok(8.0 * td * td / (p.kappa() * (2.0 * td - (p.gamma_p - 2.0 * td).abs())))
}

fn nsr_core(p: &ChainParams, amplitude_sq: f64, j: f64) -> Result<f64> {
    p.require_analytic()?;
    require_amplifying(p)?;
    if !(amplitude_sq > 0.0) {
        return Err(Error::param("amplitude_sq", "must be positive"));
    }
    if !(p.gamma_p > 0.0) {
        return Err(Error::TrivialPhase { r: 2.0 * p.t_d, limit: 2.0 * p.t_d });
    }
    if j < 2.0 {
        return Err(Error::param("site", "noise-to-signal closed form needs j >= 2"));
    }
    let td = p.t_d;
    Ok(4.0 * td * td * (2.0 * td - p.gamma_p) / (p.kappa() * p.gamma_p * amplitude_sq * (PI * (j - 1.0)).sqrt()))
}

/// Resonant noise-to-signal ratio at `site`.
pub fn closed_form_nsr(p: &ChainParams, amplitude_sq: f64, site: usize) -> Result<f64> {
    let j = p.position(site)?;
    nsr_core(p, amplitude_sq, j)
}

/// Resonant noise-to-signal ratio of the summed output.
pub fn closed_form_nsr_total(p: &ChainParams, amplitude_sq: f64) -> Result<f64> {
    nsr_core(p, amplitude_sq, p.n_sites as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilitySpectrum {
    pub eigenvalues: Vec<Complex64>,
    pub max_real: f64,
    pub stable: bool,
}

/// Exact spectrum of the chain drift.
///
/// Periodic: `gamma_p - 2t_d - i omega0 + 2 t_d cos k - 2i t_c cos(k - phi)`,
/// `k = 2 pi m / N`. Open: `gamma_p - 2t_d - i omega0 + 2 sqrt(a b) cos(n pi/(N+1))`
/// with forward and backward hoppings `a = t_d - i t_c e^{i phi}`, `b = t_d - i t_c e^{-i phi}`.
pub fn stability_spectrum(p: &ChainParams, boundary: Boundary) -> Result<StabilitySpectrum> {
    p.validate()?;
    let n = p.n_sites;
    let diag = c(p.gamma_p - 2.0 * p.t_d, -p.omega0);
    let eigenvalues: Vec<Complex64> = match boundary {
        Boundary::Periodic => (0..n)
            .map(|m| {
                let k = 2.0 * PI * m as f64 / n as f64;
                diag + c(2.0 * p.t_d * k.cos(), -2.0 * p.t_c * (k - p.phi).cos())
            })
            .collect(),
        Boundary::Open => {
            let a = c(p.t_d, 0.0) - c(0.0, p.t_c) * unit_phase(p.phi);
            let b = c(p.t_d, 0.0) - c(0.0, p.t_c) * unit_phase(-p.phi);
            let root = (a * b).sqrt();
            (1..=n).map(|m| diag + root * (2.0 * (m as f64 * PI / (n + 1) as f64).cos())).collect()
        }
    };
    let max_real = eigenvalues.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    Ok(StabilitySpectrum { eigenvalues, max_real, stable: max_real < 0.0 })
}

/// Bloch vector of the periodic chain:
/// `h_x = gamma_p - 2 t_d + 2 t_d cos k`, `h_y = 2 t_c cos(k + phi) + omega0`.
pub fn chain_bloch_model(p: &ChainParams) -> BlochModel {
    let (gp, td, tc, phi, w0) = (p.gamma_p, p.t_d, p.t_c, p.phi, p.omega0);
    BlochModel::new(move |k: f64| gp - 2.0 * td + 2.0 * td * k.cos(), move |k: f64| 2.0 * tc * (k + phi).cos() + w0, w0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_chain_spec, build_dynamical_matrix};
    use crate::numerics::{eig, quad_adaptive, svd};

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs()
    }

    #[test]
    fn r_examples() {
        let p = ChainParams::reference_chain();
        assert_eq!(r_of_omega(&p, 0.0), 1.0);
        assert_eq!(r_of_omega(&p.with_gamma_p(2.0), 0.0), 0.0);
        assert!((r_of_omega(&p, 3f64.sqrt()) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn localization_length_examples() {
        let p = ChainParams::reference_chain();
        assert!((localization_length(&p, 0.0).unwrap() - 1.0 / 2f64.ln()).abs() < 1e-15);
        assert!(localization_length(&p.with_gamma_p(1.999_999), 0.0).unwrap() < 0.1);
        assert!(matches!(localization_length(&p, 3f64.sqrt() + 1e-12), Err(Error::TrivialPhase { .. })));
    }

    #[test]
    fn chain_a_edge_quantities() {
        let a = ssh_closed_forms(&ChainParams::reference_chain(), 0.0).unwrap();
        assert!((a.rho - 4.0 / 3.0).abs() < 1e-14);
        assert!((a.s0 - 1.5).abs() < 1e-14);
        assert!((a.s_n - 1.5 / 1024.0).abs() < 1e-15);
        let u = a.edge_profile();
        assert!((u[0] / u[1] - 2.0).abs() < 1e-14);
        let norm: f64 = u.iter().map(|x| x * x).sum();
        assert!((norm - 1.0).abs() < 1e-5);
    }

    #[test]
    fn smallest_singular_value_matches_dense() {
        let p = ChainParams::reference_chain();
        let h = build_dynamical_matrix(&build_chain_spec(&p, Boundary::Open).unwrap()).unwrap();
        let s = svd(&h.h).unwrap();
        let predicted = ssh_closed_forms(&p, 0.0).unwrap().s_n;
        assert!(close(s.smallest(), predicted, 0.15));
    }

    #[test]
    fn q_and_gain_examples() {
        let p = ChainParams::reference_chain();
        assert!(close(closed_form_q(&p, 0.0, 9, 0).unwrap(), 512.0, 1e-12));
        assert!(close(closed_form_q(&p, 0.0, 9, 9).unwrap(), 1.0, 1e-12));
        assert!(close(closed_form_gain(&p, 0.0, 4).unwrap(), 9216.0, 1e-12));
        assert!(close(bandwidth(&p, 8).unwrap(), 1.0 / 3.0, 1e-12));
        assert!(closed_form_gain(&p, 0.0, 0).is_err());
        assert!(closed_form_gain(&p, 0.0, 10).is_err());
    }

    #[test]
    fn gain_at_half_pump_matches_dense() {
        let p = ChainParams::reference_chain().with_gamma_p(0.5).with_sites(20);
        let spec = build_chain_spec(&p, Boundary::Open).unwrap();
        let dense = crate::response::gain(&spec, 0.0, 0, 19).unwrap();
        let k = 7.0;
        let a = ssh_closed_forms(&p, 0.0).unwrap();
        let by_hand = k * k / (a.rho * a.s0).powi(2) * (2.0f64 / 1.5).powi(40);
        assert!(close(closed_form_gain(&p, 0.0, 19).unwrap(), by_hand, 1e-12));
        assert!(close(dense, by_hand, 0.05));
    }

    #[test]
    fn noise_integral_second_order_is_four() {
        let p = ChainParams::reference_chain();
        assert!((noise_integral_exact(&p, 2).unwrap() - 4.0).abs() < 1e-14);
    }

    #[test]
    fn noise_integral_matches_quadrature() {
        for gp in [0.5, 1.0, 1.5] {
            let p = ChainParams::reference_chain().with_gamma_p(gp);
            let b = 2.0 - gp;
            for j in 2..=8 {
                let f = |w: f64| (4.0 / (w * w + b * b)).powi(j as i32) / (2.0 * PI);
                let q = quad_adaptive(f, 0.0, b / (j as f64).sqrt(), 1e-10).unwrap();
                let exact = noise_integral_exact(&p, j).unwrap();
                assert!(close(q, exact, 1e-6), "gp {gp} j {j}: {q} vs {exact}");
            }
            for j in 10..=40 {
                let ratio = noise_integral_asymptotic(&p, j).unwrap() / noise_integral_exact(&p, j).unwrap();
                assert!((ratio - 1.0).abs() < 0.05);
            }
        }
    }

    #[test]
    fn noise_examples() {
        let p = ChainParams::reference_chain();
        let n = closed_form_noise(&p, 4).unwrap();
        assert!(close(n.amp_prefactor, 12.0, 1e-12));
        assert!(close(n.noise_scale, 18.0 / (PI.sqrt() * 3.0), 1e-12));
        assert!(close(n.site, n.noise_scale * 512.0, 1e-12));
        assert!(closed_form_noise(&p.with_gamma_p(2.5), 4).is_err());
    }

    #[test]
    fn added_noise_examples() {
        let p = ChainParams::reference_chain();
        assert!(close(closed_form_added_noise(&p, 0.0).unwrap(), 4.0 / 3.0, 1e-12));
        assert!(close(closed_form_added_noise_resonant(&p).unwrap(), 4.0 / 3.0, 1e-12));
        let hi = p.with_gamma_p(1.9);
        assert!(close(closed_form_added_noise_resonant(&hi).unwrap(), 8.0 / (4.2 * 1.9), 1e-12));
        assert!(close(closed_form_added_noise(&hi, 0.0).unwrap(), 8.0 / (4.2 * 1.9), 1e-12));
        let lo = closed_form_added_noise_resonant(&p.with_gamma_p(1e-6)).unwrap();
        assert!(lo > 1e5);
        // off resonance the added noise only grows
        assert!(closed_form_added_noise(&p, 0.5).unwrap() > 4.0 / 3.0);
    }

    #[test]
    fn nsr_examples() {
        let p = ChainParams::reference_chain();
        let v = closed_form_nsr(&p, 1.0, 4).unwrap();
        assert!(close(v, 4.0 / (6.0 * (4.0 * PI).sqrt()), 1e-12));
        assert!((v - 0.188).abs() < 1e-3);
        let a = closed_form_nsr_total(&p.with_sites(10), 1.0).unwrap();
        let b = closed_form_nsr_total(&p.with_sites(37), 1.0).unwrap();
        assert!(close(b / a, 0.5, 1e-12));
        assert!(closed_form_nsr(&p.with_gamma_p(1.999_999), 1.0, 4).unwrap() < 1e-5);
        assert!(closed_form_nsr(&p, 0.0, 4).is_err());
    }

    #[test]
    fn non_analytic_parameters_are_refused() {
        let mut p = ChainParams::reference_chain();
        p.phi = 0.3;
        assert!(ssh_closed_forms(&p, 0.0).is_err());
        assert!(r_of_omega(&p, 0.0) > 0.0);
    }

    #[test]
    fn open_spectrum_examples() {
        let p = ChainParams::reference_chain();
        let s = stability_spectrum(&p, Boundary::Open).unwrap();
        assert!(s.eigenvalues.iter().all(|z| (z - c(-1.0, 0.0)).norm() < 1e-15));
        assert!(s.stable);
        let s = stability_spectrum(&p.with_gamma_p(2.5), Boundary::Open).unwrap();
        assert!(!s.stable);
        assert!((s.max_real - 0.5).abs() < 1e-15);
    }

    #[test]
    fn periodic_spectrum_is_unstable() {
        let p = ChainParams::reference_chain();
        let s = stability_spectrum(&p, Boundary::Periodic).unwrap();
        assert!(!s.stable);
        assert!((s.max_real - 1.0).abs() < 1e-14);
    }

    fn sorted(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    fn match_spectra(a: &[Complex64], b: &[Complex64]) -> f64 {
        // greedy nearest matching, tolerant of ordering ties
        let mut used = vec![false; b.len()];
        let mut worst = 0.0_f64;
        for x in a {
            let (k, d) = b
                .iter()
                .enumerate()
                .filter(|(k, _)| !used[*k])
                .map(|(k, y)| (k, (x - y).norm()))
                .fold((usize::MAX, f64::INFINITY), |acc, v| if v.1 < acc.1 { v } else { acc });
            used[k] = true;
            worst = worst.max(d);
        }
        worst
    }

    #[test]
    fn closed_spectra_match_dense_eigenvalues() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(73);
        for trial in 0..30 {
            let p = ChainParams {
                t_c: rng.random_range(0.2..1.5),
                t_d: rng.random_range(0.2..1.5),
                phi: rng.random_range(-PI..PI),
                gamma_p: 0.0,
                omega0: rng.random_range(-1.0..1.0),
                n_sites: rng.random_range(3..9),
            };
            let p = p.with_gamma_p(rng.random_range(0.0..3.9 * p.t_d));
            for boundary in [Boundary::Open, Boundary::Periodic] {
                let h = build_dynamical_matrix(&build_chain_spec(&p, boundary).unwrap()).unwrap();
                let dense = eig(&h.h).unwrap();
                let closed = stability_spectrum(&p, boundary).unwrap();
                let d = match_spectra(&sorted(closed.eigenvalues.clone()), &sorted(dense.values.to_vec()));
                assert!(d < 1e-8, "trial {trial} {boundary:?}: {d}");
            }
        }
    }

    #[test]
    fn skin_effect() {
        for gp in [0.5, 1.0, 1.5, 1.9] {
            let p = ChainParams::reference_chain().with_gamma_p(gp).with_sites(20);
            let open = stability_spectrum(&p, Boundary::Open).unwrap();
            let periodic = stability_spectrum(&p, Boundary::Periodic).unwrap();
            assert!(periodic.max_real - open.max_real >= gp - 1e-12);
        }
    }
}
