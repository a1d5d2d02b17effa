//! Asymptotic secret key rates for PSK-modulated CV-QKD with heterodyne
//! detection and reverse reconciliation, with and without the classifier.
//!
//! The correlation term is computed from the truncated Fock-space mixture
//! `τ` of the constellation; the symplectic eigenvalues then follow from
//! closed forms in `A, B, C, D`.

mod fock;
mod rate;

pub use fock::{auto_cutoff, build_tau, coherent_state_fock, FockOperatorSet, PINV_THRESHOLD};
pub use rate::{
    correlation_z, g_entropy, holevo_bound, key_rate, mutual_information, symplectic_spectrum,
    Correlation, ExcessNoiseConvention, KeyRateInputs, KeyRateReport, Scheme, SpectrumResult,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SecrateError {
    #[error("invalid parameter: {0}")]
    BadInput(String),
    #[error("Fock cutoff {n_max} leaves a trace deficit of {deficit:e}")]
    Cutoff { n_max: usize, deficit: f64 },
    #[error("unphysical result: {0}")]
    Domain(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
}
