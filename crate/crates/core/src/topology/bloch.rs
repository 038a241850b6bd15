use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model::{build_dynamical_matrix, LatticeSpec};

pub const DEFAULT_K_SAMPLES: usize = 8192;

type BandFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Momentum-space drift of a translation-invariant 1D lattice,
/// `H(k) = h_x(k) - i h_y(k)`, so that the doubled Hamiltonian reads
/// `h_x sigma_x - (h_y - omega) sigma_y`.
#[derive(Clone)]
pub struct BlochModel {
    pub hx: BandFn,
    pub hy: BandFn,
    pub omega0: f64,
}

impl fmt::Debug for BlochModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BlochModel").field("omega0", &self.omega0).finish_non_exhaustive()
    }
}

impl BlochModel {
    pub fn new<X, Y>(hx: X, hy: Y, omega0: f64) -> Self
    where
        X: Fn(f64) -> f64 + Send + Sync + 'static,
        Y: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        BlochModel { hx: Arc::new(hx), hy: Arc::new(hy), omega0 }
    }

    /// Bloch functions of a periodic lattice with one mode per unit cell.
    ///
    /// The drift must be circulant; `H(k) = sum_d H_{0,d} e^{-i k d}` with the
    /// offsets `d` folded into `(-N/2, N/2]`.
    pub fn from_periodic_spec(spec: &LatticeSpec) -> Result<Self> {
        let h = build_dynamical_matrix(spec)?.h;
        let n = h.nrows();
        let scale = h.norm().max(f64::MIN_POSITIVE);
        for j in 0..n {
            for l in 0..n {
                if (h[(j, l)] - h[((j + 1) % n, (l + 1) % n)]).norm() > 1e-12 * scale {
                    return Err(Error::param("spec", "lattice is not translation invariant"));
                }
            }
        }
        let row: Vec<(f64, num_complex::Complex64)> = (0..n)
            .map(|l| {
                let d = if 2 * l > n { l as f64 - n as f64 } else { l as f64 };
                (d, h[(0, l)])
            })
            .filter(|(_, z)| z.norm() > 0.0)
            .collect();
        let row = Arc::new(row);
        let symbol = move |k: f64| -> num_complex::Complex64 {
            row.iter().map(|(d, z)| z * num_complex::Complex64::from_polar(1.0, -k * d)).sum()
        };
        let s1 = symbol.clone();
        let omega0 = -h[(0, 0)].im;
        Ok(BlochModel::new(move |k| s1(k).re, move |k| -symbol(k).im, omega0))
    }

    /// `h_x(k) - i (h_y(k) - omega)`, the off-diagonal entry of the doubled
    /// Bloch Hamiltonian.
    pub fn symbol(&self, k: f64, omega: f64) -> num_complex::Complex64 {
        num_complex::Complex64::new((self.hx)(k), -((self.hy)(k) - omega))
    }
}

/// Winding of `(h_x, h_y - omega)` around the origin over the Brillouin zone.
pub fn winding_number(model: &BlochModel, omega: f64) -> Result<i32> {
    winding_number_with(model, omega, DEFAULT_K_SAMPLES)
}

/// Winding with an explicit number of `k` samples.
///
/// Positive when `h_x - i (h_y - omega)` circles the origin counter-clockwise
/// as `k` increases; the chain with forward amplification has `+1`.
pub fn winding_number_with(model: &BlochModel, omega: f64, samples: usize) -> Result<i32> {
    if samples < 8 {
        return Err(Error::param("samples", "need at least 8 k-points"));
    }
    let points: Vec<(f64, num_complex::Complex64)> = (0..=samples)
        .map(|m| {
            let k = 2.0 * PI * m as f64 / samples as f64;
            (k, model.symbol(k, omega))
        })
        .collect();
    let scale = points.iter().map(|(_, z)| z.norm()).fold(0.0, f64::max);
    if !scale.is_finite() {
        return Err(Error::NonFinite);
    }
    let gap_tol = 1e-8 * scale;
    let (k_min, n_min) =
        points
            .iter()
            .map(|(k, z)| (*k, z.norm()))
            .fold((0.0, f64::INFINITY), |acc, v| if v.1 < acc.1 { v } else { acc });
    if n_min <= gap_tol {
        return Err(Error::Gapless { k: k_min, norm: n_min });
    }
    let mut total = 0.0;
    for w in points.windows(2) {
        total += (w[1].1 / w[0].1).arg();
    }
    let turns = total / (2.0 * PI);
    let nu = turns.round();
    if (turns - nu).abs() >= 0.01 {
        return Err(Error::NoConvergence("winding number did not settle on an integer"));
    }
    Ok(nu as i32)
}

/// Pump rates bounding the `nu = 1` region of the reference chain at
/// detuning `omega - omega0`; `None` once `|omega - omega0| >= 2 t_c`.
pub fn critical_pump_rates(t_c: f64, t_d: f64, phi: f64, detuning: f64) -> Option<(f64, f64)> {
    if !(t_c > 0.0) || detuning.abs() >= 2.0 * t_c {
        return None;
    }
    let center = 2.0 * t_d - detuning * (t_d / t_c) * phi.cos();
    let half = 2.0 * t_d * phi.sin() * (1.0 - (detuning / (2.0 * t_c)).powi(2)).sqrt();
    let (a, b) = (center - half, center + half);
    Some((a.min(b), a.max(b)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SymmetryClass {
    Aiii,
    Bdi,
    Ci,
    Diii,
}

impl fmt::Display for SymmetryClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SymmetryClass::Aiii => "AIII",
            SymmetryClass::Bdi => "BDI",
            SymmetryClass::Ci => "CI",
            SymmetryClass::Diii => "DIII",
        })
    }
}

/// Symmetry classes compatible with the Bloch vector at probe frequency
/// `omega`, tested on a symmetric k-grid with relative tolerance `1e-9`.
///
/// * CI: `h_x` and `h_y - omega` both even in `k`.
/// * DIII: both odd.
/// * BDI: `(h_x(k), -(h_y(k) - omega))` and `(h_x(-k), h_y(-k) - omega)`
///   differ by one k-independent rotation.
/// * AIII: none of the above (in particular `|h(k)| != |h(-k)|`).
///
/// Every matching class is returned, sorted.
pub fn symmetry_class(model: &BlochModel, omega: f64) -> Vec<SymmetryClass> {
    symmetry_class_with(model, omega, 256)
}

pub fn symmetry_class_with(model: &BlochModel, omega: f64, samples: usize) -> Vec<SymmetryClass> {
    let ks: Vec<f64> = (0..samples).map(|m| 2.0 * PI * (m as f64 + 0.37) / samples as f64).collect();
    let eval = |k: f64| ((model.hx)(k), (model.hy)(k) - omega);
    let plus: Vec<(f64, f64)> = ks.iter().map(|&k| eval(k)).collect();
    let minus: Vec<(f64, f64)> = ks.iter().map(|&k| eval(-k)).collect();
    let scale = plus.iter().map(|(x, y)| x.hypot(*y)).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let tol = 1e-9 * scale;

    let mut classes = Vec::new();
    type Pred<'a> = &'a dyn Fn(&(f64, f64), &(f64, f64)) -> bool;
    let all = |f: Pred| plus.iter().zip(&minus).all(|(a, b)| f(a, b));
    if all(&|a, b| (a.0 - b.0).abs() <= tol && (a.1 - b.1).abs() <= tol) {
        classes.push(SymmetryClass::Ci);
    }
    if all(&|a, b| (a.0 + b.0).abs() <= tol && (a.1 + b.1).abs() <= tol) {
        classes.push(SymmetryClass::Diii);
    }
    let norms_match = all(&|a, b| (a.0.hypot(a.1) - b.0.hypot(b.1)).abs() <= tol);
    if norms_match {
        // a = (h_x(k), -(h_y(k) - omega)), b = (h_x(-k), h_y(-k) - omega) as complex numbers
        let za: Vec<num_complex::Complex64> = plus.iter().map(|p| num_complex::Complex64::new(p.0, -p.1)).collect();
        let zb: Vec<num_complex::Complex64> = minus.iter().map(|p| num_complex::Complex64::new(p.0, p.1)).collect();
        let anchor = (0..za.len()).max_by(|&i, &j| za[i].norm().total_cmp(&za[j].norm()));
        if let Some(i) = anchor {
            if za[i].norm() > tol {
                let rot = zb[i] / za[i];
                let rot = rot / rot.norm();
                if za.iter().zip(&zb).all(|(a, b)| (b - rot * a).norm() <= tol) {
                    classes.push(SymmetryClass::Bdi);
                }
            }
        }
    }
    if classes.is_empty() {
        classes.push(SymmetryClass::Aiii);
    }
    classes.sort();
    classes
}
