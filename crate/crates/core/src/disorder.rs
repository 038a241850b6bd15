//! Diagonal-disorder Monte Carlo for the reference chain.
//!
//! Each instance shifts the local frequencies by i.i.d. normal offsets of
//! standard deviation `W`. Every instance draws from its own ChaCha8 stream
//! keyed by `(seed, W index, N index, instance)`, and the reduction runs in a
//! fixed order, so results are bit-identical for any thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::chain1d::ChainParams;
use crate::error::{Error, Result};
use crate::model::{build_chain_spec, build_dynamical_matrix, Boundary, LatticeSpec};
use crate::numerics::{eig, linear_fit};
use crate::response::gains_at;

/// Above this fraction of unstable instances a cell is flagged unreliable.
pub const MAX_UNSTABLE_FRACTION: f64 = 0.2;

#[derive(Debug, Clone, PartialEq)]
pub struct DisorderConfig {
    pub base: ChainParams,
    /// Disorder strengths (standard deviations of the frequency offsets).
    pub w_list: Vec<f64>,
    pub instances: usize,
    pub seed: u64,
    pub n_list: Vec<usize>,
    /// Sizes used for the exponent fit; a subset of `n_list`.
    pub fit_range: Vec<usize>,
}

impl DisorderConfig {
    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if self.w_list.is_empty() || self.w_list.iter().any(|w| !(*w >= 0.0 && w.is_finite())) {
            return Err(Error::param("w_list", "needs at least one finite W >= 0"));
        }
        if self.instances == 0 {
            return Err(Error::param("instances", "must be at least 1"));
        }
        if self.n_list.is_empty() || self.n_list.contains(&0) {
            return Err(Error::param("n_list", "needs positive sizes"));
        }
        if self.fit_range.len() < 3 {
            return Err(Error::param("fit_range", "needs at least 3 sizes"));
        }
        if let Some(n) = self.fit_range.iter().find(|n| !self.n_list.contains(n)) {
            return Err(Error::param("fit_range", format!("size {n} is not in n_list")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentFit {
    pub w: f64,
    pub slope: f64,
    pub intercept: f64,
    /// RMS residual of the log-linear fit.
    pub residual: f64,
    /// Slope uncertainty propagated from the per-size standard errors.
    pub slope_stderr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DisorderResult {
    pub w_list: Vec<f64>,
    pub n_list: Vec<usize>,
    /// Mean total gain at `omega0`, `[W][N]`.
    pub mean_gain: Vec<Vec<f64>>,
    pub stderr: Vec<Vec<f64>>,
    pub unstable_fraction: Vec<Vec<f64>>,
    /// False when any cell excluded more than [`MAX_UNSTABLE_FRACTION`].
    pub reliable: bool,
    pub m_of_w: Vec<ExponentFit>,
}

/// Stream for one instance.
pub fn instance_rng(seed: u64, w_index: usize, n_index: usize, instance: usize) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&(w_index as u64).to_le_bytes());
    key[16..24].copy_from_slice(&(n_index as u64).to_le_bytes());
    key[24..].copy_from_slice(&(instance as u64).to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// Open chain with `omega_j = omega0 + w z_j`, `z_j ~ N(0, 1)`.
pub fn sample_disordered_spec<R: Rng + ?Sized>(base: &ChainParams, w: f64, rng: &mut R) -> Result<LatticeSpec> {
    if !(w >= 0.0 && w.is_finite()) {
        return Err(Error::param("w", "must be finite and non-negative"));
    }
    let mut spec = build_chain_spec(base, Boundary::Open)?;
    if w > 0.0 {
        for om in spec.omega.iter_mut() {
            let z: f64 = rng.sample(StandardNormal);
            *om += w * z;
        }
    }
    Ok(spec)
}

/// Total gain at `omega0`, or `None` for an unstable instance.
fn instance_gain(spec: &LatticeSpec, omega: f64) -> Result<Option<f64>> {
    let h = build_dynamical_matrix(spec)?;
    if !(eig(&h.h)?.max_real() < 0.0) {
        return Ok(None);
    }
    Ok(Some(gains_at(&h, omega, 0)?.iter().sum()))
}

/// Disorder-averaged total gain for every `(W, N)` pair, with the exponent
/// fit over `fit_range`.
pub fn mean_total_gain(cfg: &DisorderConfig) -> Result<DisorderResult> {
    cfg.validate()?;
    let cells: Vec<(usize, usize)> =
        (0..cfg.w_list.len()).flat_map(|wi| (0..cfg.n_list.len()).map(move |ni| (wi, ni))).collect();
    let stats: Vec<(f64, f64, f64)> = cells
        .iter()
        .map(|&(wi, ni)| {
            let p = cfg.base.with_sites(cfg.n_list[ni]);
            let w = cfg.w_list[wi];
            let samples: Vec<Option<f64>> = (0..cfg.instances)
                .into_par_iter()
                .map(|k| {
                    let mut rng = instance_rng(cfg.seed, wi, ni, k);
                    let spec = sample_disordered_spec(&p, w, &mut rng)?;
                    instance_gain(&spec, p.omega0)
                })
                .collect::<Result<_>>()?;
            Ok(reduce(&samples))
        })
        .collect::<Result<_>>()?;

    let shape = |f: fn(&(f64, f64, f64)) -> f64| -> Vec<Vec<f64>> {
        (0..cfg.w_list.len())
            .map(|wi| (0..cfg.n_list.len()).map(|ni| f(&stats[wi * cfg.n_list.len() + ni])).collect())
            .collect()
    };
    let unstable_fraction = shape(|s| s.2);
    let reliable = unstable_fraction.iter().flatten().all(|&f| f <= MAX_UNSTABLE_FRACTION);
    if !reliable {
        log::warn!("more than {:.0}% of disorder instances were unstable in some cells", 100.0 * MAX_UNSTABLE_FRACTION);
    }
    let mut result = DisorderResult {
        w_list: cfg.w_list.clone(),
        n_list: cfg.n_list.clone(),
        mean_gain: shape(|s| s.0),
        stderr: shape(|s| s.1),
        unstable_fraction,
        reliable,
        m_of_w: vec![],
    };
    result.m_of_w = fit_exponent(&result, &cfg.fit_range)?;
    Ok(result)
}

/// Mean, standard error and unstable fraction, summed in instance order.
fn reduce(samples: &[Option<f64>]) -> (f64, f64, f64) {
    let stable: Vec<f64> = samples.iter().flatten().copied().collect();
    let unstable = (samples.len() - stable.len()) as f64 / samples.len() as f64;
    if stable.is_empty() {
        return (f64::NAN, f64::NAN, unstable);
    }
    let n = stable.len() as f64;
    let mean = stable.iter().sum::<f64>() / n;
    let stderr = if stable.len() > 1 {
        (stable.iter().map(|g| (g - mean).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt()
    } else {
        0.0
    };
    (mean, stderr, unstable)
}

/// Least-squares slope `m(W)` of `ln G_T` against `N` over `fit_range`.
pub fn fit_exponent(result: &DisorderResult, fit_range: &[usize]) -> Result<Vec<ExponentFit>> {
    if fit_range.len() < 3 {
        return Err(Error::Fit("at least 3 sizes".into()));
    }
    let idx: Vec<usize> = fit_range
        .iter()
        .map(|n| {
            result
                .n_list
                .iter()
                .position(|m| m == n)
                .ok_or_else(|| Error::Fit(format!("size {n} present in the result")))
        })
        .collect::<Result<_>>()?;
    result
        .w_list
        .iter()
        .enumerate()
        .map(|(wi, &w)| {
            let x: Vec<f64> = idx.iter().map(|&k| result.n_list[k] as f64).collect();
            let g: Vec<f64> = idx.iter().map(|&k| result.mean_gain[wi][k]).collect();
            if g.iter().any(|v| !(*v > 0.0)) {
                return Err(Error::Fit(format!("positive mean gains (W = {w})")));
            }
            let y: Vec<f64> = g.iter().map(|v| v.ln()).collect();
            let sigma: Vec<f64> = idx.iter().zip(&g).map(|(&k, v)| result.stderr[wi][k] / v).collect();
            let fit = linear_fit(&x, &y, None)?;
            let xbar = x.iter().sum::<f64>() / x.len() as f64;
            let sxx: f64 = x.iter().map(|v| (v - xbar).powi(2)).sum();
            let var: f64 = x.iter().zip(&sigma).map(|(v, s)| ((v - xbar) * s).powi(2)).sum();
            Ok(ExponentFit {
                w,
                slope: fit.slope,
                intercept: fit.intercept,
                residual: fit.rms_residual,
                slope_stderr: var.sqrt() / sxx,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain1d::closed_form_total_gain;
    use crate::response::total_gain;

    fn base() -> ChainParams {
        ChainParams::reference_chain().with_gamma_p(0.1)
    }

    #[test]
    fn zero_disorder_is_the_clean_chain() {
        let mut rng = instance_rng(1, 0, 0, 0);
        let spec = sample_disordered_spec(&base(), 0.0, &mut rng).unwrap();
        assert_eq!(spec, build_chain_spec(&base(), Boundary::Open).unwrap());
    }

    #[test]
    fn fixed_stream_is_reproducible() {
        let a = sample_disordered_spec(&base(), 1.0, &mut instance_rng(9, 1, 2, 3)).unwrap();
        let b = sample_disordered_spec(&base(), 1.0, &mut instance_rng(9, 1, 2, 3)).unwrap();
        assert_eq!(a, b);
        let c = sample_disordered_spec(&base(), 1.0, &mut instance_rng(9, 1, 2, 4)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn offsets_are_standard_normal() {
        let p = base().with_sites(1000);
        let mut draws = Vec::with_capacity(100_000);
        for k in 0..100 {
            let spec = sample_disordered_spec(&p, 1.0, &mut instance_rng(3, 0, 0, k)).unwrap();
            draws.extend(spec.omega.iter().map(|w| w - p.omega0));
        }
        let n = draws.len() as f64;
        let mean = draws.iter().sum::<f64>() / n;
        let std = (draws.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        assert!(mean.abs() < 0.02);
        assert!((0.99..=1.01).contains(&std), "{std}");
    }

    fn cfg(w_list: Vec<f64>, instances: usize) -> DisorderConfig {
        DisorderConfig {
            base: base(),
            w_list,
            instances,
            seed: 17,
            n_list: vec![40, 60, 80],
            fit_range: vec![40, 60, 80],
        }
    }

    #[test]
    fn clean_limit_matches_exact_gain() {
        let r = mean_total_gain(&cfg(vec![0.0], 3)).unwrap();
        for (k, &n) in r.n_list.iter().enumerate() {
            let spec = build_chain_spec(&base().with_sites(n), Boundary::Open).unwrap();
            assert_eq!(r.mean_gain[0][k], total_gain(&spec, 0.0).unwrap());
            assert_eq!(r.stderr[0][k], 0.0);
            assert_eq!(r.unstable_fraction[0][k], 0.0);
            let closed = closed_form_total_gain(&base().with_sites(n), 0.0).unwrap();
            assert!((r.mean_gain[0][k] / closed - 1.0).abs() < 0.05);
        }
        let m = r.m_of_w[0];
        assert!((m.slope - 2.0 * (2.0f64 / 1.9).ln()).abs() < 1e-3);
        assert_eq!(m.slope_stderr, 0.0);
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let c = cfg(vec![0.5, 1.0], 40);
        let a = mean_total_gain(&c).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| mean_total_gain(&c).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn exponent_of_synthetic_data() {
        let n_list = vec![10, 20, 30, 40];
        let r = DisorderResult {
            w_list: vec![0.0],
            n_list: n_list.clone(),
            mean_gain: vec![n_list.iter().map(|&n| (0.5 * n as f64 + 1.0).exp()).collect()],
            stderr: vec![vec![0.0; 4]],
            unstable_fraction: vec![vec![0.0; 4]],
            reliable: true,
            m_of_w: vec![],
        };
        let fit = fit_exponent(&r, &n_list).unwrap()[0];
        assert!((fit.slope - 0.5).abs() < 1e-12);
        assert!((fit.intercept - 1.0).abs() < 1e-9);
        let mut bad = r.clone();
        bad.mean_gain[0][1] = 0.0;
        assert!(fit_exponent(&bad, &n_list).is_err());
        assert!(fit_exponent(&r, &n_list[..2]).is_err());
    }

    #[test]
    fn config_validation() {
        let mut c = cfg(vec![0.0], 1);
        c.fit_range = vec![40, 60, 100];
        assert!(mean_total_gain(&c).is_err());
        let mut c = cfg(vec![-1.0], 1);
        assert!(c.validate().is_err());
        c.w_list = vec![0.0];
        c.instances = 0;
        assert!(c.validate().is_err());
    }
}
