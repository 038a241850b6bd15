//! Frequency-domain input-output response.
//!
//! `Q(omega) = (H + i omega)^{-1}` maps input fields to intracavity fields and
//! the scattering matrix is `Z_jl = delta_jl + sqrt(kappa_j kappa_l) Q_jl`.
//! Gains, amplifier noise and noise-to-signal ratios all derive from it.
//! Sites are 0-based; unless stated otherwise the signal enters at site 0.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::chain1d::ChainParams;
use crate::error::{Error, Result};
use crate::model::{build_dynamical_matrix, DynamicalMatrix, LatticeSpec};
use crate::numerics::{eig, quad_adaptive_vec, solve_linear_with, CMat, QuadOptions, SolveOptions};

/// Gains below this are treated as zero when dividing by them.
pub const GAIN_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone)]
pub struct ResponseMatrix {
    pub omega: f64,
    pub q: CMat,
}

/// `Q(omega)` by LU.
///
/// No condition ceiling is applied: a chain of `N` sites legitimately reaches
/// condition numbers of order `e^{2N/xi}`. Only numerically singular pivots
/// (exceptional or marginal points) are rejected.
pub fn response_matrix(h: &DynamicalMatrix, omega: f64) -> Result<ResponseMatrix> {
    let n = h.n();
    let opts = SolveOptions { max_condition: f64::INFINITY };
    let sol = solve_linear_with(&h.shifted(omega), &CMat::identity(n, n), opts)?;
    Ok(ResponseMatrix { omega, q: sol.x })
}

/// Relative inversion residual `||(H + i omega) Q - 1|| / (||H + i omega|| ||Q||)`.
pub fn inversion_residual(h: &DynamicalMatrix, r: &ResponseMatrix) -> f64 {
    let a = h.shifted(r.omega);
    let n = h.n();
    (&a * &r.q - CMat::identity(n, n)).norm() / (a.norm() * r.q.norm()).max(f64::MIN_POSITIVE)
}

/// `Z_jl = delta_jl + sqrt(kappa_j kappa_l) Q_jl`.
pub fn scattering_element(r: &ResponseMatrix, spec: &LatticeSpec, j: usize, l: usize) -> Result<Complex64> {
    spec.check_site(j)?;
    spec.check_site(l)?;
    let delta = if j == l { 1.0 } else { 0.0 };
    Ok(Complex64::new(delta, 0.0) + r.q[(j, l)] * (spec.kappa[j] * spec.kappa[l]).sqrt())
}

fn gain_from(r: &ResponseMatrix, spec: &LatticeSpec, input: usize, output: usize) -> Result<f64> {
    Ok(scattering_element(r, spec, output, input)?.norm_sqr())
}

/// Power gain `|Z_{out,in}(omega)|^2`.
pub fn gain(spec: &LatticeSpec, omega: f64, input_site: usize, output_site: usize) -> Result<f64> {
    spec.check_site(input_site)?;
    spec.check_site(output_site)?;
    let h = build_dynamical_matrix(spec)?;
    gain_from(&response_matrix(&h, omega)?, spec, input_site, output_site)
}

/// Gain at every output site for one input site.
pub fn gains_at(h: &DynamicalMatrix, omega: f64, input_site: usize) -> Result<Vec<f64>> {
    let spec = &h.spec;
    spec.check_site(input_site)?;
    let n = h.n();
    let mut rhs = CMat::zeros(n, 1);
    rhs[(input_site, 0)] = Complex64::new(1.0, 0.0);
    let opts = SolveOptions { max_condition: f64::INFINITY };
    let col = solve_linear_with(&h.shifted(omega), &rhs, opts)?.x;
    Ok((0..n)
        .map(|j| {
            let delta = if j == input_site { 1.0 } else { 0.0 };
            let z = Complex64::new(delta, 0.0) + col[(j, 0)] * (spec.kappa[j] * spec.kappa[input_site]).sqrt();
            z.norm_sqr()
        })
        .collect())
}

pub fn gain_db(gain: f64) -> f64 {
    10.0 * gain.log10()
}

/// Sum of the gains at all sites for a signal entering at site 0.
pub fn total_gain(spec: &LatticeSpec, omega: f64) -> Result<f64> {
    let h = build_dynamical_matrix(spec)?;
    Ok(gains_at(&h, omega, 0)?.iter().sum())
}

/// `n_amp_j = kappa_j sum_{l l'} conj(Q_jl) Q_jl' pump_{l' l} = kappa_j (Q pump Q^dagger)_jj`
/// at every site.
pub fn amp_noise_profile(h: &DynamicalMatrix, omega: f64) -> Result<Vec<f64>> {
    let r = response_matrix(h, omega)?;
    Ok(amp_noise_from(&r.q, &h.spec))
}

fn amp_noise_from(q: &CMat, spec: &LatticeSpec) -> Vec<f64> {
    let qg = q * &spec.pump;
    (0..q.nrows())
        .map(|j| {
            let diag: Complex64 = (0..q.ncols()).map(|l| qg[(j, l)] * q[(j, l)].conj()).sum();
            (spec.kappa[j] * diag.re).max(0.0)
        })
        .collect()
}

pub fn amp_noise_density(spec: &LatticeSpec, omega: f64, site: usize) -> Result<f64> {
    spec.check_site(site)?;
    let h = build_dynamical_matrix(spec)?;
    Ok(amp_noise_profile(&h, omega)?[site])
}

/// Amplifier noise referred to the input, `n_amp_j / G_j` with the signal at site 0.
pub fn added_noise(spec: &LatticeSpec, omega: f64, site: usize) -> Result<f64> {
    spec.check_site(site)?;
    let h = build_dynamical_matrix(spec)?;
    let r = response_matrix(&h, omega)?;
    let g = gain_from(&r, spec, 0, site)?;
    if g <= GAIN_FLOOR {
        return Err(Error::ZeroGain { site });
    }
    Ok(amp_noise_from(&r.q, spec)[site] / g)
}

/// Center and width of the response peak closest to the real axis; refuses
/// unstable drifts.
pub(crate) fn spectral_window(h: &DynamicalMatrix) -> Result<(f64, f64)> {
    let es = eig(&h.h)?;
    let lead =
        es.values.iter().copied().max_by(|a, b| a.re.total_cmp(&b.re)).ok_or(Error::param("spec", "empty lattice"))?;
    if !(lead.re < 0.0) {
        return Err(Error::Unstable { max_re: lead.re });
    }
    // Q has its poles at omega = i lambda.
    Ok((-lead.im, -lead.re))
}

/// Per-site output noise flux `(1/2pi) int n_amp_j d omega` at zero input noise.
pub fn output_noise_profile(spec: &LatticeSpec, rel_tol: f64) -> Result<Vec<f64>> {
    let h = build_dynamical_matrix(spec)?;
    let (center, scale) = spectral_window(&h)?;
    let failure = std::sync::Mutex::new(None);
    let integrand = |w: f64| match amp_noise_profile(&h, w) {
        Ok(v) => v,
        Err(e) => {
            failure.lock().unwrap().get_or_insert(e);
            vec![f64::NAN; h.n()]
        }
    };
    let opts = QuadOptions::with_rel_tol(rel_tol);
    let res = quad_adaptive_vec(integrand, center, scale, &opts, |v| v.iter().map(|x| x.abs()).collect());
    if let Some(e) = failure.into_inner().unwrap() {
        return Err(e);
    }
    Ok(res?.value.into_iter().map(|v| v / (2.0 * std::f64::consts::PI)).collect())
}

pub fn output_noise_total(spec: &LatticeSpec, site: usize, rel_tol: f64) -> Result<f64> {
    spec.check_site(site)?;
    Ok(output_noise_profile(spec, rel_tol)?[site])
}

/// Output noise flux when the input port at `input_site` carries a noise
/// spectral density `n_in(omega)` on top of the amplifier noise.
pub fn output_noise_total_with_input<F>(
    spec: &LatticeSpec,
    site: usize,
    input_site: usize,
    n_in: F,
    rel_tol: f64,
) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    spec.check_site(site)?;
    spec.check_site(input_site)?;
    let h = build_dynamical_matrix(spec)?;
    let (center, scale) = spectral_window(&h)?;
    let integrand = |w: f64| match response_matrix(&h, w) {
        Ok(r) => {
            let g = gain_from(&r, spec, input_site, site).unwrap_or(f64::NAN);
            vec![amp_noise_from(&r.q, spec)[site] + g * n_in(w)]
        }
        Err(_) => vec![f64::NAN],
    };
    let res = quad_adaptive_vec(integrand, center, scale, &QuadOptions::with_rel_tol(rel_tol), |v| vec![v[0].abs()])?;
    Ok(res.value[0] / (2.0 * std::f64::consts::PI))
}

/// Noise-to-signal ratio `N_j / (G_j(omega_d) |alpha|^2)` with the full
/// frequency integral of the amplifier noise.
pub fn noise_to_signal(spec: &LatticeSpec, omega_d: f64, amplitude_sq: f64, site: usize) -> Result<f64> {
    noise_to_signal_with_tol(spec, omega_d, amplitude_sq, site, 1e-8)
}

pub fn noise_to_signal_with_tol(
    spec: &LatticeSpec,
    omega_d: f64,
    amplitude_sq: f64,
    site: usize,
    rel_tol: f64,
) -> Result<f64> {
    if !(amplitude_sq > 0.0) {
        return Err(Error::param("amplitude_sq", "must be positive"));
    }
    let noise = output_noise_total(spec, site, rel_tol)?;
    let g = gain(spec, omega_d, 0, site)?;
    if g <= GAIN_FLOOR {
        return Err(Error::ZeroGain { site });
    }
    Ok(noise / (g * amplitude_sq))
}

/// Gains on a frequency grid, `gain[site][k]` at `omegas[k]`.
#[derive(Debug, Clone)]
pub struct GainSpectrum {
    pub omegas: Vec<f64>,
    pub gain: Vec<Vec<f64>>,
    pub input_site: usize,
}

pub fn gain_spectrum(spec: &LatticeSpec, omegas: &[f64], input_site: usize) -> Result<GainSpectrum> {
    let h = build_dynamical_matrix(spec)?;
    let columns: Vec<Vec<f64>> = omegas.par_iter().map(|&w| gains_at(&h, w, input_site)).collect::<Result<_>>()?;
    Ok(GainSpectrum { omegas: omegas.to_vec(), gain: transpose(&columns, h.n()), input_site })
}

#[derive(Debug, Clone)]
pub struct NoiseReport {
    pub omegas: Vec<f64>,
    /// `n_amp[site][k]`.
    pub n_amp: Vec<Vec<f64>>,
    /// `n_add[site][k]`; NaN where the gain vanishes.
    pub n_add: Vec<Vec<f64>>,
    pub n_out_total: Vec<f64>,
    /// Noise-to-signal ratio per site at the drive frequency.
    pub nsr: Vec<f64>,
}

/// Full noise characterization with the signal at site 0.
pub fn noise_report(
    spec: &LatticeSpec,
    omegas: &[f64],
    omega_d: f64,
    amplitude_sq: f64,
    rel_tol: f64,
) -> Result<NoiseReport> {
    if !(amplitude_sq > 0.0) {
        return Err(Error::param("amplitude_sq", "must be positive"));
    }
    let h = build_dynamical_matrix(spec)?;
    let n = h.n();
    let columns: Vec<(Vec<f64>, Vec<f64>)> = omegas
        .par_iter()
        .map(|&w| {
            let r = response_matrix(&h, w)?;
            let amp = amp_noise_from(&r.q, spec);
            let add = (0..n)
                .map(|j| {
                    let g = gain_from(&r, spec, 0, j)?;
                    Ok(if g > GAIN_FLOOR { amp[j] / g } else { f64::NAN })
                })
                .collect::<Result<Vec<f64>>>()?;
            Ok((amp, add))
        })
        .collect::<Result<_>>()?;
    let (amp_cols, add_cols): (Vec<_>, Vec<_>) = columns.into_iter().unzip();
    let n_out_total = output_noise_profile(spec, rel_tol)?;
    let g_d = gains_at(&h, omega_d, 0)?;
    let nsr = n_out_total
        .iter()
        .zip(&g_d)
        .map(|(noise, g)| if *g > GAIN_FLOOR { noise / (g * amplitude_sq) } else { f64::NAN })
        .collect();
    Ok(NoiseReport {
        omegas: omegas.to_vec(),
        n_amp: transpose(&amp_cols, n),
        n_add: transpose(&add_cols, n),
        n_out_total,
        nsr,
    })
}

fn transpose(columns: &[Vec<f64>], n: usize) -> Vec<Vec<f64>> {
    (0..n).map(|j| columns.iter().map(|c| c[j]).collect()).collect()
}

/// Default probe grid: 401 points over `omega0 +- 3 (2 t_d - gamma_p)`.
pub fn default_omega_grid(p: &ChainParams) -> Vec<f64> {
    let mut half = 3.0 * (2.0 * p.t_d - p.gamma_p).abs();
    if half < 1e-3 * p.t_d {
        half = 3.0 * p.t_d;
    }
    linspace(p.omega0 - half, p.omega0 + half, 401)
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![a],
        _ => (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect(),
    }
}
