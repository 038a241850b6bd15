use rayon::prelude::*;

use super::bloch::{critical_pump_rates, winding_number};
use crate::chain1d::{chain_bloch_model, ChainParams};
use crate::error::{Error, Result};
use crate::model::{build_chain_spec, build_dynamical_matrix, Boundary};
use crate::numerics::svd;

/// Singular-value gap and winding number over a `(gamma_p, omega)` grid.
///
/// Rows follow `gamma_ps`, columns follow `omegas`. Points where the chain is
/// invalid (`gamma_p >= 4 t_d`) or the SVD fails have a NaN gap; winding is
/// `None` there and wherever the Bloch vector closes its gap.
#[derive(Debug, Clone)]
pub struct PhaseMap {
    pub omegas: Vec<f64>,
    pub gamma_ps: Vec<f64>,
    pub n_sites: usize,
    /// `s_{N-1} - s_N`.
    pub gap: Vec<Vec<f64>>,
    pub winding: Vec<Vec<Option<i32>>>,
    /// Critical pump rates per omega column.
    pub boundary: Vec<Option<(f64, f64)>>,
}

impl PhaseMap {
    pub fn len(&self) -> usize {
        self.omegas.len() * self.gamma_ps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Open chain of `n_sites` built from `base` with `gamma_p` swept.
pub fn singular_gap_map(base: &ChainParams, omegas: &[f64], gamma_ps: &[f64], n_sites: usize) -> Result<PhaseMap> {
    if omegas.is_empty() || gamma_ps.is_empty() {
        return Err(Error::param("grid", "omega and gamma_p grids must be non-empty"));
    }
    if n_sites < 2 {
        return Err(Error::param("n_sites", "gap needs at least 2 sites"));
    }
    let rows: Vec<(Vec<f64>, Vec<Option<i32>>)> = gamma_ps
        .par_iter()
        .map(|&gp| {
            let p = ChainParams { gamma_p: gp, n_sites, ..*base };
            let drift = build_chain_spec(&p, Boundary::Open).and_then(|s| build_dynamical_matrix(&s));
            let model = p.validate().ok().map(|_| chain_bloch_model(&p));
            omegas
                .par_iter()
                .map(|&w| {
                    let gap = match &drift {
                        Ok(h) => svd(&h.shifted(w)).map(|d| d.edge_gap()).unwrap_or(f64::NAN),
                        Err(_) => f64::NAN,
                    };
                    let nu = model.as_ref().and_then(|m| winding_number(m, w).ok());
                    (gap, nu)
                })
                .unzip()
        })
        .collect();
    let (gap, winding) = rows.into_iter().unzip();
    let boundary = omegas.iter().map(|&w| critical_pump_rates(base.t_c, base.t_d, base.phi, w - base.omega0)).collect();
    Ok(PhaseMap { omegas: omegas.to_vec(), gamma_ps: gamma_ps.to_vec(), n_sites, gap, winding, boundary })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gap_open_inside_topological_region() {
        let m = singular_gap_map(&ChainParams::reference_chain(), &[0.0, 3.0], &[1.0, 3.5, 4.0], 40).unwrap();
        assert!(m.gap[0][0] > 0.1 && m.gap[1][0] > 0.1);
        assert_eq!(m.winding[0][0], Some(1));
        assert_eq!(m.winding[0][1], Some(0));
        assert_eq!(m.winding[1][1], Some(0));
        assert!(m.gap[2][0].is_nan() && m.winding[2][0].is_none());
        assert_eq!(m.boundary[1], None);
        assert!(m.gap.iter().flatten().filter(|g| !g.is_nan()).all(|&g| g >= 0.0));
    }

    #[test]
    fn empty_grid_is_rejected() {
        assert!(singular_gap_map(&ChainParams::reference_chain(), &[], &[1.0], 10).is_err());
    }
}
