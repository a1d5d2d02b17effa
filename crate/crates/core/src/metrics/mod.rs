//! Classification scores and the cost models of the two classifiers.

mod classification;
mod complexity;

pub use classification::{
    confusion, precision_per_class, roc_macro, trapezoid, ConfusionMatrix, OneVsRest, Precision,
    RocCurve,
};
pub use complexity::{
    complexity_classical, complexity_quantum, oracle_budget_kmax, ClassicalCost, ComplexityReport,
    QuantumCost,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("{pred} predictions for {truth} ground-truth labels")]
    LengthMismatch { pred: usize, truth: usize },
    #[error("label {label} is outside the {n_classes} classes")]
    LabelOutOfRange { label: usize, n_classes: usize },
    #[error("ROC needs at least two classes in the ground truth")]
    SingleClass,
    #[error("score {value} of sample {sample} is not in [0, 1]")]
    BadScore { sample: usize, value: f64 },
    #[error("δ = {0} is outside (0, 1)")]
    BadDelta(f64),
    #[error("U, M and k must be positive")]
    NonPositive,
}
