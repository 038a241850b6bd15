use thiserror::Error;

use crate::model::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid lattice specification:\n{0}")]
    InvalidSpec(ValidationReport),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("site index {site} out of range for a lattice of {n_sites} sites")]
    SiteOutOfRange { site: usize, n_sites: usize },

    #[error("near-singular matrix (condition estimate {condition:.3e}); exceptional or marginally stable point")]
    NearSingular { condition: f64 },

    #[error("unstable lattice: max Re(lambda) = {max_re:.6e} >= 0")]
    Unstable { max_re: f64 },

    #[error("ill-conditioned steady state: {0}")]
    IllConditioned(String),

    #[error("decomposition failed to converge: {0}")]
    NoConvergence(&'static str),

    #[error("quadrature did not converge: estimate {estimate:.6e}, error {error:.3e}")]
    Quadrature { estimate: f64, error: f64 },

    #[error("Bloch vector closes the gap at k = {k:.6} (|h| = {norm:.3e})")]
    Gapless { k: f64, norm: f64 },

    #[error("topologically trivial regime: r = {r:.6} >= 2 t_d = {limit:.6}")]
    TrivialPhase { r: f64, limit: f64 },

    #[error("gain at site {site} is zero; added noise undefined")]
    ZeroGain { site: usize },

    #[error("fit requires {0}")]
    Fit(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}
