//! Adaptive Gauss-Kronrod quadrature over the whole real line.
//!
//! The line is mapped onto `(-pi/2, pi/2)` by `omega = center + scale * tan(theta)`.
//! Integrands decaying like `1/omega^2` become bounded on the mapped interval,
//! so no truncation window or tail correction is needed. Panels are bisected
//! until every component meets its relative tolerance.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub rel_tol: f64,
    /// Refinement budget in panels.
    pub max_panels: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions { rel_tol: 1e-6, max_panels: 20_000 }
    }
}

impl QuadOptions {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        QuadOptions { rel_tol, ..Default::default() }
    }
}

#[derive(Debug, Clone)]
pub struct QuadResult<T> {
    pub value: T,
    pub error: T,
    pub evaluations: usize,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

/// `int_{-inf}^{inf} f(omega) d omega` to relative accuracy `rel_tol`.
///
/// `center` and `scale` locate the bulk of the integrand (peak position and
/// characteristic width); they only affect efficiency.
pub fn quad_adaptive<F>(f: F, center: f64, scale: f64, rel_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let opts = QuadOptions::with_rel_tol(rel_tol);
    let res = quad_adaptive_vec(|w| vec![f(w)], center, scale, &opts, |v: &[f64]| vec![v[0].abs()])?;
    Ok(res.value[0])
}

/// Vector-valued variant: all components share the integrand evaluations.
///
/// `reference` maps the current estimate to a per-component magnitude; the
/// run converges once each component's error is below `rel_tol * reference`.
pub fn quad_adaptive_vec<F, R>(
    f: F,
    center: f64,
    scale: f64,
    opts: &QuadOptions,
    reference: R,
) -> Result<QuadResult<Vec<f64>>>
where
    F: Fn(f64) -> Vec<f64>,
    R: Fn(&[f64]) -> Vec<f64>,
{
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::param("scale", format!("must be positive and finite, got {scale}")));
    }
    if !center.is_finite() {
        return Err(Error::param("center", "must be finite"));
    }
    if !(opts.rel_tol > 0.0) {
        return Err(Error::param("rel_tol", "must be positive"));
    }

    let half_pi = std::f64::consts::FRAC_PI_2;
    let mapped = |theta: f64| -> Vec<f64> {
        let cos = theta.cos();
        let jac = scale / (cos * cos);
        let mut v = f(center + scale * theta.tan());
        for x in v.iter_mut() {
            *x *= jac;
        }
        v
    };

    let mut evaluations = 0usize;
    let initial = 16;
    let width = 2.0 * half_pi / initial as f64;
    let mut panels: Vec<Panel> = (0..initial)
        .map(|i| {
            let a = -half_pi + i as f64 * width;
            Panel::new(a, a + width, &mapped, &mut evaluations)
        })
        .collect();
    let dim = panels[0].value.len();

    loop {
        let mut total = vec![0.0; dim];
        let mut err = vec![0.0; dim];
        for p in &panels {
            for c in 0..dim {
                total[c] += p.value[c];
                err[c] += p.error[c];
            }
        }
        if total.iter().any(|x| !x.is_finite()) {
            return Err(Error::Quadrature { estimate: f64::NAN, error: f64::INFINITY });
        }
        let tol: Vec<f64> = reference(&total).into_iter().map(|r| opts.rel_tol * r.abs()).collect();
        if err.iter().zip(&tol).all(|(e, t)| e <= t) {
            return Ok(QuadResult { value: total, error: err, evaluations });
        }
        if panels.len() >= opts.max_panels {
            let (worst, _) = err
                .iter()
                .zip(&tol)
                .enumerate()
                .map(|(c, (e, t))| (c, e / t.max(f64::MIN_POSITIVE)))
                .fold((0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            return Err(Error::Quadrature { estimate: total[worst], error: err[worst] });
        }

        let score = |p: &Panel| -> f64 {
            p.error
                .iter()
                .zip(&tol)
                .map(|(e, t)| if *e == 0.0 { 0.0 } else { e / t.max(f64::MIN_POSITIVE) })
                .fold(0.0, f64::max)
        };
        let scores: Vec<f64> = panels.iter().map(score).collect();
        let best = scores.iter().copied().fold(0.0, f64::max);
        let mut next = Vec::with_capacity(panels.len() + 8);
        let mut split = false;
        for (p, s) in panels.into_iter().zip(scores) {
            if s >= 0.5 * best && s > 0.0 && (p.b - p.a) > 1e-14 {
                let mid = 0.5 * (p.a + p.b);
                split = true;
                next.push(Panel::new(p.a, mid, &mapped, &mut evaluations));
                next.push(Panel::new(mid, p.b, &mapped, &mut evaluations));
            } else {
                next.push(p);
            }
        }
        if !split {
            // every offending panel is at the width floor
            return Err(Error::Quadrature { estimate: total[0], error: err[0] });
        }
        panels = next;
    }
}

struct Panel {
    a: f64,
    b: f64,
    value: Vec<f64>,
    error: Vec<f64>,
}

impl Panel {
    fn new<G>(a: f64, b: f64, g: &G, evaluations: &mut usize) -> Panel
    where
        G: Fn(f64) -> Vec<f64>,
    {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let fc = g(mid);
        let dim = fc.len();
        let mut kron: Vec<f64> = fc.iter().map(|v| v * WGK[7]).collect();
        let mut gauss: Vec<f64> = fc.iter().map(|v| v * WG[3]).collect();
        let mut resabs: Vec<f64> = fc.iter().map(|v| v.abs() * WGK[7]).collect();
        let mut samples: Vec<(f64, Vec<f64>)> = Vec::with_capacity(15);
        samples.push((WGK[7], fc));
        for k in 0..7 {
            let dx = half * XGK[k];
            let f1 = g(mid - dx);
            let f2 = g(mid + dx);
            for c in 0..dim {
                kron[c] += WGK[k] * (f1[c] + f2[c]);
                resabs[c] += WGK[k] * (f1[c].abs() + f2[c].abs());
                if k % 2 == 1 {
                    gauss[c] += WG[k / 2] * (f1[c] + f2[c]);
                }
            }
            samples.push((WGK[k], f1));
            samples.push((WGK[k], f2));
        }
        *evaluations += 15;

        let mut error = vec![0.0; dim];
        for c in 0..dim {
            let mean = 0.5 * kron[c];
            let resasc: f64 = samples.iter().map(|(w, v)| w * (v[c] - mean).abs()).sum::<f64>() * half;
            let resabs_c = resabs[c] * half.abs();
            let mut e = ((kron[c] - gauss[c]) * half).abs();
            if resasc != 0.0 && e != 0.0 {
                e = resasc * (200.0 * e / resasc).powf(1.5).min(1.0);
            }
            if resabs_c > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
                e = e.max(50.0 * f64::EPSILON * resabs_c);
            }
            error[c] = e;
        }
        let value = kron.into_iter().map(|k| k * half).collect();
        Panel { a, b, value, error }
    }
}
