//! Physical layer: PSK coherent states, a lossy noisy channel, heterodyne
//! detection, sector labels and distance features.
//!
//! Quadratures are in shot-noise units with vacuum variance 1, so a
//! coherent state `|α⟩` has quadrature means `(2 Re α, 2 Im α)`.

mod channel;
mod dataset;

pub use channel::{
    assign_label, extract_features, modulate, reference_points, transmit_and_detect, ChannelModel,
    Constellation, QuadratureSample,
};
pub use dataset::{
    generate_dataset, read_dataset_csv, read_sidecar, write_dataset_csv, write_sidecar, Dataset,
    DatasetSidecar, OpticsSample, CHUNK_SIZE,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OpticsError {
    #[error("symbol {k} is outside the {n}-point constellation")]
    SymbolOutOfRange { k: usize, n: usize },
    #[error("constellation needs at least 2 points and a positive finite V_m (got N = {n}, V_m = {v_m})")]
    BadConstellation { n: usize, v_m: f64 },
    #[error("invalid channel: {0}")]
    BadChannel(String),
    #[error("dataset must contain at least one sample")]
    Empty,
    #[error("CSV line {line}: {message}")]
    BadRow { line: usize, message: String },
    #[error("CSV: {0}")]
    Csv(String),
    #[error("sidecar: {0}")]
    Sidecar(String),
    #[error("I/O: {0}")]
    Io(String),
}
