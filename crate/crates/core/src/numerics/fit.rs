use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual.
    pub rms_residual: f64,
    /// Standard error of the slope. With weights it is the formal error
    /// `sqrt(1 / sum(w (x - xbar)^2))`; without, it is estimated from the residuals.
    pub slope_stderr: f64,
}

/// Least-squares line through `(x, y)`, optionally weighted by `weights`
/// (typically `1 / sigma^2`).
pub fn linear_fit(x: &[f64], y: &[f64], weights: Option<&[f64]>) -> Result<LinearFit> {
    if x.len() != y.len() {
        return Err(Error::Fit(format!("equal lengths, got {} and {}", x.len(), y.len())));
    }
    if let Some(w) = weights {
        if w.len() != x.len() {
            return Err(Error::Fit("one weight per point".into()));
        }
        if w.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::Fit("positive finite weights".into()));
        }
    }
    if x.len() < 2 {
        return Err(Error::Fit("at least two points".into()));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::Fit("finite data".into()));
    }
    let w = |i: usize| weights.map_or(1.0, |w| w[i]);
    let n = x.len();
    let sw: f64 = (0..n).map(w).sum();
    let xbar = (0..n).map(|i| w(i) * x[i]).sum::<f64>() / sw;
    let ybar = (0..n).map(|i| w(i) * y[i]).sum::<f64>() / sw;
    let sxx: f64 = (0..n).map(|i| w(i) * (x[i] - xbar).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(Error::Fit("at least two distinct abscissae".into()));
    }
    let sxy: f64 = (0..n).map(|i| w(i) * (x[i] - xbar) * (y[i] - ybar)).sum();
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let ss: f64 = (0..n).map(|i| (y[i] - intercept - slope * x[i]).powi(2)).sum();
    let rms_residual = (ss / n as f64).sqrt();
    let slope_stderr = if weights.is_some() {
        (1.0 / sxx).sqrt()
    } else if n > 2 {
        (ss / (n - 2) as f64 / sxx).sqrt()
    } else {
        0.0
    };
    Ok(LinearFit { slope, intercept, rms_residual, slope_stderr })
}
