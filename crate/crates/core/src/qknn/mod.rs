//! Quantum k-nearest-neighbour classifier.
//!
//! A query is compared with every training vector through a swap test, the
//! overlap probabilities are written into an integer similarity register
//! by amplitude estimation, and the k most similar training points are
//! found with repeated Grover searches. Two engines run the same pipeline:
//! [`Mode::Gate`] simulates every circuit on a state vector, while
//! [`Mode::Analytic`] uses the closed forms those circuits are verified
//! against and scales to thousands of training points.

mod amplitude;
mod classify;
mod data;
mod encoding;
mod grover;
mod kmax;
mod similarity;

pub use amplitude::{amplitude_estimate, register_size, AmplitudeEstimate};
pub use classify::{
    classical_knn_predict, majority_vote, qknn_predict, vote_on_table, KnnPrediction, QknnConfig,
    QknnPrediction, SimilarityMetric, TableVote,
};
pub use data::{LabeledSample, Normalization, TrainingSet};
pub use encoding::{
    amplitude_encoded_state, prepare_query_state, prepare_training_state,
    prepare_uniform_superposition, EncodedState, UniformPreparation,
};
pub use grover::{
    grover_find_greater, grover_iteration, initial_state as grover_initial_state, iterations_for,
    marked_probability_closed_form, run_search, GroverEngine, GroverRunReport, MarkedSet, Schedule,
    SearchOutcome, SliceMarked,
};
pub use kmax::{k_maximal_find, KmaxReport, NeighborSet};
pub use similarity::{
    compute_similarity_table, pairwise_fidelity, similarity_superposition, GateCache, SimRow,
    SimilarityTable,
};

use crate::qsim::QsimError;
use thiserror::Error;

/// Execution engine for the quantum stages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Gate,
    Analytic,
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gate" => Ok(Mode::Gate),
            "analytic" => Ok(Mode::Analytic),
            other => Err(format!(
                "unknown mode `{other}` (expected gate or analytic)"
            )),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QknnError {
    #[error("training set is empty")]
    Empty,
    #[error("feature {feature} of sample {sample} is {value}, outside [0, 1]")]
    NotNormalized {
        sample: usize,
        feature: usize,
        value: f64,
    },
    #[error("feature vector has {got} entries, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("k = {k} exceeds the {m} training points")]
    KTooLarge { k: usize, m: usize },
    #[error("k must be at least 1")]
    ZeroK,
    #[error("label {label} is outside the {n_classes} classes")]
    BadLabel { label: usize, n_classes: usize },
    #[error("cannot vote over an empty neighbour set")]
    EmptyVote,
    #[error("amplitude {0} is outside [0, 1]")]
    BadAmplitude(f64),
    #[error("register size R must be at least 2, got {0}")]
    BadRegister(usize),
    #[error(transparent)]
    Qsim(#[from] QsimError),
}
