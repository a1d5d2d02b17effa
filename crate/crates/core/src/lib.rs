//! Simulation of a discretely modulated continuous-variable QKD link whose
//! receiver classifies incoming coherent states with a quantum k-nearest
//! neighbour classifier.
//!
//! - [`qsim`]: dense state-vector simulator.
//! - [`qknn`]: state encoding, swap-test similarity, amplitude estimation,
//!   Grover based k-maximal finding and voting, plus a classical kNN.
//! - [`optics`]: PSK constellation, lossy channel, heterodyne detection and
//!   distance features.
//! - [`metrics`]: confusion matrix, precision, macro ROC/AUC and cost models.
//! - [`secrate`]: asymptotic key rates from the Fock-space covariance terms.

pub mod metrics;
pub mod optics;
pub mod qknn;
pub mod qsim;
pub mod rng;
pub mod secrate;
