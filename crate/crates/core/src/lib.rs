//! Input-output theory of driven-dissipative bosonic lattices used as
//! directional amplifiers.
//!
//! A lattice is described by a [`LatticeSpec`]; [`build_dynamical_matrix`]
//! turns it into the non-Hermitian drift `H`. From there:
//!
//! * [`response`] gives `Q(omega) = (H + i omega)^{-1}`, gains, amplifier
//!   noise, added noise and noise-to-signal ratios;
//! * [`topology`] maps the singular values of `H + i omega` to a chiral
//!   Hermitian problem, extracts edge modes, winding numbers and symmetry
//!   classes;
//! * [`steadystate`] solves for the stationary correlation matrix;
//! * [`chain1d`] holds the closed forms of the non-reciprocal reference chain;
//! * [`disorder`] averages gains over random on-site detunings.
//!
//! ```
//! use topamp_core::{build_chain_spec, gain, Boundary, ChainParams};
//!
//! let spec = build_chain_spec(&ChainParams::reference_chain(), Boundary::Open).unwrap();
//! let g = gain(&spec, 0.0, 0, 4).unwrap();
//! assert!((g / 9216.0 - 1.0).abs() < 0.05);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod chain1d;
pub mod disorder;
pub mod error;
pub mod model;
pub mod numerics;
pub mod response;
pub mod steadystate;
pub mod topology;

pub use chain1d::{ChainParams, SshAnalytics, StabilitySpectrum};
pub use disorder::{DisorderConfig, DisorderResult, ExponentFit};
pub use error::{Error, Result};
pub use model::{
    build_chain_spec, build_dynamical_matrix, validate_spec, Boundary, DynamicalMatrix, LatticeSpec, ValidationReport,
    Violation,
};
pub use num_complex::Complex64;
pub use numerics::{CMat, CVec, EigenSystem, SvdTriple};
pub use response::{gain, gain_db, total_gain, GainSpectrum, NoiseReport, ResponseMatrix};
pub use steadystate::CorrelationMatrix;
pub use topology::{svd_duality, BlochModel, EdgeMode, EffectiveHamiltonian, PhaseMap, SymmetryClass};
