//! One runner per experiment kind. Grid points are evaluated on the rayon
//! pool and assembled in grid order.

use std::fmt;

use rayon::prelude::*;

use topamp_core::chain1d::{
    chain_bloch_model, closed_form_added_noise, closed_form_added_noise_resonant, closed_form_gain, closed_form_noise,
    closed_form_nsr, closed_form_total_gain, stability_spectrum,
};
use topamp_core::disorder::{mean_total_gain, DisorderConfig};
use topamp_core::numerics::{eig, linear_fit};
use topamp_core::response::{added_noise, default_omega_grid, gains_at, output_noise_profile};
use topamp_core::steadystate::{stationarity_residual, steady_correlation_with, Method};
use topamp_core::topology::{critical_pump_rates, singular_gap_map, symmetry_class, winding_number};
use topamp_core::{
    build_chain_spec, build_dynamical_matrix, Boundary, ChainParams, Complex64, Error as CoreError, LatticeSpec,
    SymmetryClass,
};

use crate::config::{
    AddedNoise, BoundaryName, ChainModel, Classify, ConfigError, Disorder, Experiment, ExperimentConfig, GainSweep,
    MethodName, NoiseProfile, Nsr, PhaseMapExperiment, Stability, SteadyState,
};
use crate::table::{Column, GridError, ResultTable};

type CoreResult<T> = Result<T, CoreError>;

#[derive(Debug)]
pub enum RunError {
    Config(ConfigError),
    /// A failure that invalidates the whole experiment.
    Runtime(String),
    /// A grid-point failure in strict mode.
    Strict(GridError),
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(e) => write!(f, "{e}"),
            RunError::Runtime(msg) => write!(f, "{msg}"),
            RunError::Strict(e) => write!(f, "grid point {} failed: {}", e.point, e.message),
        }
    }
}

impl std::error::Error for RunError {}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e)
    }
}

fn runtime(what: &str) -> impl FnOnce(CoreError) -> RunError + '_ {
    move |e| RunError::Runtime(format!("{what}: {e}"))
}

/// A grid point: coordinate columns and the value rows computed there.
struct Point {
    coords: Vec<f64>,
    label: String,
    values: CoreResult<Vec<Vec<f64>>>,
}

impl Point {
    fn single(coords: Vec<f64>, label: String, values: CoreResult<Vec<f64>>) -> Self {
        Point { coords, label, values: values.map(|v| vec![v]) }
    }
}

fn fill(table: &mut ResultTable, points: Vec<Point>, strict: bool) -> Result<(), RunError> {
    let width = table.columns.len();
    for p in points {
        match p.values {
            Ok(rows) => {
                for v in rows {
                    let mut row = p.coords.clone();
                    row.extend(v);
                    table.push(row);
                }
            }
            Err(e) => {
                let err = GridError { point: p.label, message: e.to_string() };
                if strict {
                    return Err(RunError::Strict(err));
                }
                log::warn!("{}: grid point {} failed: {}", table.name, err.point, err.message);
                let mut row = p.coords;
                row.resize(width, f64::NAN);
                table.push(row);
                table.errors.push(err);
            }
        }
    }
    Ok(())
}

fn or_nan(r: CoreResult<f64>) -> f64 {
    r.unwrap_or(f64::NAN)
}

fn bool_value(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

fn boundary_code(b: BoundaryName) -> f64 {
    match b {
        BoundaryName::Open => 0.0,
        BoundaryName::Periodic => 1.0,
    }
}

/// Closed forms only describe the open reference chain with `phi = pi/2`,
/// `t_c = t_d`.
fn analytic(m: &ChainModel, p: &ChainParams) -> bool {
    m.boundary == BoundaryName::Open && p.is_analytic()
}

/// Runs the configured experiment. In strict mode the first grid-point
/// failure aborts the run.
pub fn run_experiment(cfg: &ExperimentConfig, strict: bool) -> Result<Vec<ResultTable>, RunError> {
    match &cfg.experiment {
        Experiment::GainSweep(g) => gain_sweep(cfg, g, strict),
        Experiment::PhaseMap(p) => phase_map(cfg, p, strict),
        Experiment::NoiseProfile(n) => noise_profile(cfg, n),
        Experiment::AddedNoise(a) => added_noise_sweep(cfg, a, strict),
        Experiment::Nsr(s) => nsr(cfg, s),
        Experiment::Stability(s) => stability(cfg, s, strict),
        Experiment::SteadyState(s) => steady_state(cfg, s),
        Experiment::Disorder(d) => disorder(cfg, d),
        Experiment::Classify(c) => classify(cfg, c, strict),
    }
}

fn chain_of(cfg: &ExperimentConfig) -> Result<&ChainModel, RunError> {
    cfg.chain().ok_or_else(|| RunError::Runtime(format!("experiment `{}` needs a chain model", cfg.experiment.kind())))
}

fn chain_spec(m: &ChainModel, p: &ChainParams) -> CoreResult<LatticeSpec> {
    build_chain_spec(p, m.boundary.into())
}

fn gain_sweep(cfg: &ExperimentConfig, g: &GainSweep, strict: bool) -> Result<Vec<ResultTable>, RunError> {
    let input = g.input_site.unwrap_or(1) - 1;
    let Some(m) = cfg.chain() else {
        let spec = cfg.lattice()?;
        let n = spec.n_sites();
        let output = g.output_site.unwrap_or(n) - 1;
        let h = build_dynamical_matrix(&spec).map_err(runtime("building the drift"))?;
        let omegas = g.omega.as_ref().map(|o| o.values()).unwrap_or_default();
        let mut table =
            ResultTable::new("vs-omega", vec![Column::new("omega", ""), Column::db("gain"), Column::db("total_gain")]);
        let points = omegas
            .par_iter()
            .map(|&w| {
                let values = gains_at(&h, w, input).map(|gs| vec![gs[output], gs.iter().sum()]);
                Point::single(vec![w], format!("omega={w}"), values)
            })
            .collect();
        fill(&mut table, points, strict)?;
        table.extra("input_site", input + 1);
        table.extra("output_site", output + 1);
        return Ok(vec![table]);
    };

    let gammas = g.gamma_p.clone().unwrap_or_else(|| vec![m.gamma_p]);
    let sizes = g.n_sites.clone().unwrap_or_else(|| vec![m.n_sites]);
    let omega_d = g.omega_d.unwrap_or(m.omega0);
    let closed_ok = |p: &ChainParams| analytic(m, p) && input == 0;

    let mut vs_n = ResultTable::new(
        "vs-n",
        vec![
            Column::new("gamma_p", "t_d"),
            Column::new("n_sites", ""),
            Column::db("gain"),
            Column::db("closed_form_gain"),
            Column::db("total_gain"),
            Column::db("closed_form_total_gain"),
        ],
    );
    let combos: Vec<(f64, usize)> = gammas.iter().flat_map(|&gp| sizes.iter().map(move |&n| (gp, n))).collect();
    let points = combos
        .par_iter()
        .map(|&(gp, n)| {
            let p = m.params().with_gamma_p(gp).with_sites(n);
            let values = chain_spec(m, &p).and_then(|s| build_dynamical_matrix(&s)).and_then(|h| {
                let gs = gains_at(&h, omega_d, input)?;
                let (closed, closed_total) = if closed_ok(&p) {
                    (or_nan(closed_form_gain(&p, omega_d, n - 1)), or_nan(closed_form_total_gain(&p, omega_d)))
                } else {
                    (f64::NAN, f64::NAN)
                };
                Ok(vec![gs[n - 1], closed, gs.iter().sum(), closed_total])
            });
            Point::single(vec![gp, n as f64], format!("gamma_p={gp}, n_sites={n}"), values)
        })
        .collect();
    fill(&mut vs_n, points, strict)?;
    vs_n.extra("omega_d", omega_d);

    let mut vs_omega = ResultTable::new(
        "vs-omega",
        vec![
            Column::new("gamma_p", "t_d"),
            Column::new("n_sites", ""),
            Column::new("omega", "t_d"),
            Column::db("gain"),
            Column::db("closed_form_gain"),
        ],
    );
    let mut triples = vec![];
    for &(gp, n) in &combos {
        let p = m.params().with_gamma_p(gp).with_sites(n);
        let omegas = g.omega.as_ref().map(|o| o.values()).unwrap_or_else(|| default_omega_grid(&p));
        triples.extend(omegas.into_iter().map(|w| (gp, n, w)));
    }
    let points = triples
        .par_iter()
        .map(|&(gp, n, w)| {
            let p = m.params().with_gamma_p(gp).with_sites(n);
            let output = g.output_site.unwrap_or(n) - 1;
            let values = chain_spec(m, &p).and_then(|s| build_dynamical_matrix(&s)).and_then(|h| {
                let gs = gains_at(&h, w, input)?;
                let closed = if closed_ok(&p) { or_nan(closed_form_gain(&p, w, output)) } else { f64::NAN };
                Ok(vec![gs[output], closed])
            });
            Point::single(vec![gp, n as f64, w], format!("gamma_p={gp}, n_sites={n}, omega={w}"), values)
        })
        .collect();
    fill(&mut vs_omega, points, strict)?;
    Ok(vec![vs_n, vs_omega])
}

fn phase_map(cfg: &ExperimentConfig, pm: &PhaseMapExperiment, strict: bool) -> Result<Vec<ResultTable>, RunError> {
    let m = chain_of(cfg)?;
    let base = m.params();
    let omegas = pm.omega.values();
    let gammas = pm.gamma_p.values();
    let n = pm.n_sites.unwrap_or(m.n_sites);
    let map = singular_gap_map(&base, &omegas, &gammas, n).map_err(runtime("phase map"))?;
    let mut table = ResultTable::new(
        "phase-map",
        vec![
            Column::new("gamma_p", "t_d"),
            Column::new("omega", "t_d"),
            Column::new("gap", "t_d"),
            Column::new("winding", ""),
            Column::new("boundary_lower", "t_d"),
            Column::new("boundary_upper", "t_d"),
        ],
    );
    let mut points = vec![];
    for (gi, &gp) in gammas.iter().enumerate() {
        for (wi, &w) in omegas.iter().enumerate() {
            let gap = map.gap[gi][wi];
            let (lo, hi) = map.boundary[wi].unwrap_or((f64::NAN, f64::NAN));
            let winding = map.winding[gi][wi].map_or(f64::NAN, f64::from);
            let values = if gap.is_nan() {
                let p = ChainParams { gamma_p: gp, n_sites: n, ..base };
                Err(p.validate().err().unwrap_or(CoreError::NoConvergence("svd")))
            } else {
                Ok(vec![gap, winding, lo, hi])
            };
            points.push(Point::single(vec![gp, w], format!("gamma_p={gp}, omega={w}"), values));
        }
    }
    fill(&mut table, points, strict)?;
    table.extra("n_sites", n);
    Ok(vec![table])
}

fn noise_profile(cfg: &ExperimentConfig, np: &NoiseProfile) -> Result<Vec<ResultTable>, RunError> {
    let spec = cfg.lattice()?;
    let rel_tol = np.rel_tol.unwrap_or(crate::config::DEFAULT_NOISE_TOL);
    let profile = output_noise_profile(&spec, rel_tol).map_err(runtime("output noise"))?;
    let closed = cfg.chain().map(|m| (m, m.params())).filter(|(m, p)| analytic(m, p));
    let mut table = ResultTable::new(
        "noise-profile",
        vec![
            Column::new("site", ""),
            Column::new("output_noise", "t_d"),
            Column::new("closed_form", "t_d"),
            Column::new("closed_form_exact_integral", "t_d"),
        ],
    );
    let mut closed_total = f64::NAN;
    for (k, &v) in profile.iter().enumerate() {
        let (site, exact) = match &closed {
            Some((_, p)) => match closed_form_noise(p, k) {
                Ok(cf) => {
                    closed_total = cf.total;
                    (cf.site, cf.site_exact_integral)
                }
                Err(_) => (f64::NAN, f64::NAN),
            },
            None => (f64::NAN, f64::NAN),
        };
        table.push(vec![(k + 1) as f64, v, site, exact]);
    }
    table.extra("total_output_noise", profile.iter().sum::<f64>());
    table.extra("closed_form_total", closed_total);
    table.extra("rel_tol", rel_tol);
    Ok(vec![table])
}

fn added_noise_sweep(cfg: &ExperimentConfig, a: &AddedNoise, strict: bool) -> Result<Vec<ResultTable>, RunError> {
    let m = chain_of(cfg)?;
    let gammas = a.gamma_p.clone().unwrap_or_else(|| vec![m.gamma_p]);
    let site = a.site.unwrap_or(m.n_sites) - 1;

    let mut resonant = ResultTable::new(
        "vs-gamma-p",
        vec![
            Column::new("gamma_p", "t_d"),
            Column::new("added_noise", ""),
            Column::new("closed_form", ""),
            Column::new("closed_form_resonant", ""),
        ],
    );
    let points = gammas
        .par_iter()
        .map(|&gp| {
            let p = m.params().with_gamma_p(gp);
            let values = chain_spec(m, &p).and_then(|s| added_noise(&s, p.omega0, site)).map(|v| {
                let (cf, res) = if analytic(m, &p) {
                    (or_nan(closed_form_added_noise(&p, p.omega0)), or_nan(closed_form_added_noise_resonant(&p)))
                } else {
                    (f64::NAN, f64::NAN)
                };
                vec![v, cf, res]
            });
            Point::single(vec![gp], format!("gamma_p={gp}"), values)
        })
        .collect();
    fill(&mut resonant, points, strict)?;

    let mut spectrum = ResultTable::new(
        "vs-omega",
        vec![
            Column::new("gamma_p", "t_d"),
            Column::new("omega", "t_d"),
            Column::new("added_noise", ""),
            Column::new("closed_form", ""),
        ],
    );
    let mut pairs = vec![];
    for &gp in &gammas {
        let p = m.params().with_gamma_p(gp);
        let omegas = a.omega.as_ref().map(|o| o.values()).unwrap_or_else(|| default_omega_grid(&p));
        pairs.extend(omegas.into_iter().map(|w| (gp, w)));
    }
    let points = pairs
        .par_iter()
        .map(|&(gp, w)| {
            let p = m.params().with_gamma_p(gp);
            let values = chain_spec(m, &p).and_then(|s| added_noise(&s, w, site)).map(|v| {
                let cf = if analytic(m, &p) { or_nan(closed_form_added_noise(&p, w)) } else { f64::NAN };
                vec![v, cf]
            });
            Point::single(vec![gp, w], format!("gamma_p={gp}, omega={w}"), values)
        })
        .collect();
    fill(&mut spectrum, points, strict)?;
    for t in [&mut resonant, &mut spectrum] {
        t.extra("site", site + 1);
    }
    Ok(vec![resonant, spectrum])
}

fn nsr(cfg: &ExperimentConfig, s: &Nsr) -> Result<Vec<ResultTable>, RunError> {
    let spec = cfg.lattice()?;
    let n = spec.n_sites();
    let amplitude_sq = s.amplitude_sq.unwrap_or(1.0);
    let omega_d = s.omega_d.or(cfg.chain().map(|m| m.omega0)).unwrap_or(0.0);
    let rel_tol = s.rel_tol.unwrap_or(crate::config::DEFAULT_NOISE_TOL);
    let profile = output_noise_profile(&spec, rel_tol).map_err(runtime("output noise"))?;
    let h = build_dynamical_matrix(&spec).map_err(runtime("building the drift"))?;
    let gains = gains_at(&h, omega_d, 0).map_err(runtime("gain"))?;
    let ratio: Vec<f64> = profile.iter().zip(&gains).map(|(nj, gj)| nj / (gj * amplitude_sq)).collect();

    let [lo, hi] = s.fit_sites.unwrap_or([5.min(n), n]);
    let fit_sites: Vec<usize> = (lo..=hi).collect();
    let y: Vec<f64> = fit_sites.iter().map(|&j| ratio[j - 1].ln()).collect();
    let x_shift: Vec<f64> = fit_sites.iter().map(|&j| ((j - 1) as f64).ln()).collect();
    let x_site: Vec<f64> = fit_sites.iter().map(|&j| (j as f64).ln()).collect();
    let fit = linear_fit(&x_shift, &y, None).map_err(runtime("power-law fit"))?;
    let fit_site = linear_fit(&x_site, &y, None).map_err(runtime("power-law fit"))?;

    let closed = cfg.chain().map(|m| (m, m.params())).filter(|(m, p)| analytic(m, p));
    let mut table = ResultTable::new(
        "nsr",
        vec![Column::new("site", ""), Column::new("nsr", ""), Column::new("closed_form", ""), Column::new("fit", "")],
    );
    for j in 2..=n {
        let cf = match &closed {
            Some((_, p)) if (p.omega0 - omega_d).abs() == 0.0 => or_nan(closed_form_nsr(p, amplitude_sq, j - 1)),
            _ => f64::NAN,
        };
        let fitted = (fit.intercept + fit.slope * ((j - 1) as f64).ln()).exp();
        table.push(vec![j as f64, ratio[j - 1], cf, fitted]);
    }
    table.extra("fit_power", fit.slope);
    table.extra("fit_power_stderr", fit.slope_stderr);
    table.extra("fit_prefactor", fit.intercept.exp());
    table.extra("fit_power_vs_site", fit_site.slope);
    table.extra("fit_sites", vec![lo, hi]);
    table.extra("amplitude_sq", amplitude_sq);
    table.extra("omega_d", omega_d);
    Ok(vec![table])
}

/// Pairs each reference eigenvalue with the nearest unused numerical one.
fn pair_spectra(reference: &[Complex64], numeric: &[Complex64]) -> Vec<Complex64> {
    let mut free = numeric.to_vec();
    reference
        .iter()
        .map(|x| {
            let k = free
                .iter()
                .enumerate()
                .min_by(|a, b| (a.1 - x).norm().total_cmp(&(b.1 - x).norm()))
                .map(|(k, _)| k)
                .expect("spectra of equal size");
            free.swap_remove(k)
        })
        .collect()
}

fn stability(cfg: &ExperimentConfig, s: &Stability, strict: bool) -> Result<Vec<ResultTable>, RunError> {
    let Some(m) = cfg.chain() else {
        let spec = cfg.lattice()?;
        let h = build_dynamical_matrix(&spec).map_err(runtime("building the drift"))?;
        let e = eig(&h.h).map_err(runtime("eigendecomposition"))?;
        let mut table = ResultTable::new(
            "stability",
            vec![Column::new("index", ""), Column::new("re", "t_d"), Column::new("im", "t_d")],
        );
        for (k, z) in e.values.iter().enumerate() {
            table.push(vec![k as f64, z.re, z.im]);
        }
        table.extra("max_real", e.max_real());
        table.extra("stable", e.max_real() < 0.0);
        table.extra("eigen_residual", e.residual);
        return Ok(vec![table]);
    };

    let gammas = s.gamma_p.clone().unwrap_or_else(|| vec![m.gamma_p]);
    let boundaries = s.boundaries.clone().unwrap_or_else(|| vec![BoundaryName::Open, BoundaryName::Periodic]);
    let mut table = ResultTable::new(
        "stability",
        vec![
            Column::new("gamma_p", "t_d"),
            Column::new("boundary", "0=open,1=periodic"),
            Column::new("index", ""),
            Column::new("re", "t_d"),
            Column::new("im", "t_d"),
            Column::new("closed_form_re", "t_d"),
            Column::new("closed_form_im", "t_d"),
            Column::new("stable", ""),
            Column::new("closed_form_stable", ""),
        ],
    );
    let combos: Vec<(f64, BoundaryName)> =
        gammas.iter().flat_map(|&gp| boundaries.iter().map(move |&b| (gp, b))).collect();
    let points = combos
        .par_iter()
        .map(|&(gp, b)| {
            let p = m.params().with_gamma_p(gp);
            let boundary: Boundary = b.into();
            let values = build_chain_spec(&p, boundary)
                .and_then(|spec| build_dynamical_matrix(&spec))
                .and_then(|h| eig(&h.h))
                .and_then(|e| {
                    let exact = stability_spectrum(&p, boundary)?;
                    let paired = pair_spectra(&exact.eigenvalues, &e.values);
                    let stable = bool_value(e.max_real() < 0.0);
                    Ok(exact
                        .eigenvalues
                        .iter()
                        .zip(&paired)
                        .enumerate()
                        .map(|(k, (x, z))| vec![k as f64, z.re, z.im, x.re, x.im, stable, bool_value(exact.stable)])
                        .collect())
                });
            Point { coords: vec![gp, boundary_code(b)], label: format!("gamma_p={gp}, boundary={b:?}"), values }
        })
        .collect();
    fill(&mut table, points, strict)?;
    Ok(vec![table])
}

fn steady_state(cfg: &ExperimentConfig, s: &SteadyState) -> Result<Vec<ResultTable>, RunError> {
    let spec = cfg.lattice()?;
    let h = build_dynamical_matrix(&spec).map_err(runtime("building the drift"))?;
    let method = match s.method.unwrap_or_default() {
        MethodName::Auto => Method::Auto,
        MethodName::Eigen => Method::Eigen,
        MethodName::Schur => Method::Schur,
    };
    let m = steady_correlation_with(&h, &spec.pump, method).map_err(runtime("steady state"))?;
    let rel_tol = s.rel_tol.unwrap_or(crate::config::DEFAULT_STEADY_TOL);
    let io = output_noise_profile(&spec, rel_tol).map_err(runtime("output noise"))?;
    let occupations = m.occupations();
    let mut table = ResultTable::new(
        "steady-state",
        vec![
            Column::new("site", ""),
            Column::new("occupation", ""),
            Column::new("steady_state_noise", "t_d"),
            Column::new("input_output_noise", "t_d"),
            Column::new("relative_difference", ""),
        ],
    );
    let mut worst = 0.0_f64;
    for (k, &occ) in occupations.iter().enumerate() {
        let ss = spec.kappa[k] * occ;
        let rel = if io[k] == 0.0 && ss == 0.0 { 0.0 } else { (ss - io[k]).abs() / io[k].abs().max(ss.abs()) };
        worst = worst.max(rel);
        table.push(vec![(k + 1) as f64, occ, ss, io[k], rel]);
    }
    table.extra("method", format!("{:?}", s.method.unwrap_or_default()).to_lowercase());
    table.extra("hermiticity_residual", m.hermiticity_residual());
    table.extra("min_eigenvalue", m.min_eigenvalue().map_err(runtime("eigenvalues of M"))?);
    table.extra("stationarity_residual", stationarity_residual(&h, &spec.pump, &m));
    table.extra("max_relative_difference", worst);
    Ok(vec![table])
}

fn disorder(cfg: &ExperimentConfig, d: &Disorder) -> Result<Vec<ResultTable>, RunError> {
    let m = chain_of(cfg)?;
    let dc = DisorderConfig {
        base: m.params(),
        w_list: d.w.clone(),
        instances: d.instances.unwrap_or(crate::config::DEFAULT_INSTANCES),
        seed: d.seed.unwrap_or(0),
        n_list: d.n_sites.clone(),
        fit_range: d.fit_range.clone().unwrap_or_else(|| d.n_sites.clone()),
    };
    let r = mean_total_gain(&dc).map_err(runtime("disorder average"))?;
    let mut gain = ResultTable::new(
        "gain",
        vec![
            Column::new("w", "t_d"),
            Column::new("n_sites", ""),
            Column::new("mean_total_gain", ""),
            Column::new("stderr", ""),
            Column::new("unstable_fraction", ""),
        ],
    );
    for (wi, &w) in r.w_list.iter().enumerate() {
        for (ni, &n) in r.n_list.iter().enumerate() {
            gain.push(vec![w, n as f64, r.mean_gain[wi][ni], r.stderr[wi][ni], r.unstable_fraction[wi][ni]]);
        }
    }
    let mut exponent = ResultTable::new(
        "exponent",
        vec![
            Column::new("w", "t_d"),
            Column::new("m", "1/site"),
            Column::new("m_stderr", "1/site"),
            Column::new("intercept", ""),
            Column::new("fit_residual", ""),
        ],
    );
    for f in &r.m_of_w {
        exponent.push(vec![f.w, f.slope, f.slope_stderr, f.intercept, f.residual]);
    }
    for t in [&mut gain, &mut exponent] {
        t.extra("reliable", r.reliable);
        t.extra("instances", dc.instances);
        t.extra("seed", dc.seed);
        t.extra("fit_range", dc.fit_range.clone());
    }
    Ok(vec![gain, exponent])
}

fn classify(cfg: &ExperimentConfig, c: &Classify, strict: bool) -> Result<Vec<ResultTable>, RunError> {
    let m = chain_of(cfg)?;
    let phis = c.phi.values();
    let omegas = c.omega.values();
    let mut table = ResultTable::new(
        "classify",
        vec![
            Column::new("phi", "rad"),
            Column::new("omega", "t_d"),
            Column::new("aiii", ""),
            Column::new("bdi", ""),
            Column::new("ci", ""),
            Column::new("diii", ""),
            Column::new("winding", ""),
            Column::new("boundary_lower", "t_d"),
            Column::new("boundary_upper", "t_d"),
        ],
    );
    let pairs: Vec<(f64, f64)> = phis.iter().flat_map(|&phi| omegas.iter().map(move |&w| (phi, w))).collect();
    let points = pairs
        .par_iter()
        .map(|&(phi, w)| {
            let p = ChainParams { phi, ..m.params() };
            let values = p.validate().map(|_| {
                let model = chain_bloch_model(&p);
                let classes = symmetry_class(&model, w);
                let has = |k: SymmetryClass| bool_value(classes.contains(&k));
                let winding = winding_number(&model, w).map_or(f64::NAN, f64::from);
                let (lo, hi) = critical_pump_rates(p.t_c, p.t_d, phi, w - p.omega0).unwrap_or((f64::NAN, f64::NAN));
                vec![
                    has(SymmetryClass::Aiii),
                    has(SymmetryClass::Bdi),
                    has(SymmetryClass::Ci),
                    has(SymmetryClass::Diii),
                    winding,
                    lo,
                    hi,
                ]
            });
            Point::single(vec![phi, w], format!("phi={phi}, omega={w}"), values)
        })
        .collect();
    fill(&mut table, points, strict)?;
    table.extra("gamma_p", m.gamma_p);
    Ok(vec![table])
}
