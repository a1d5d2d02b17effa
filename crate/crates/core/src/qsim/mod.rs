//! Exact dense state-vector simulator.
//!
//! Every circuit in the classifier is built from the gates here: single
//! qubit rotations, (inverted) controlled NOTs, multi-controlled flips, the
//! register comparator, controlled swaps, quantum Fourier transforms and
//! Born-rule measurement. Amplitudes are `Complex64`; qubit `q` is bit `q`
//! of the basis index.

mod arith;
mod fourier;
mod gates;
mod layout;
mod measure;
mod state;

pub use gates::Gate2;
pub use layout::{RegisterLayout, Span};
pub use measure::MeasurementOutcome;
pub use state::{StateVector, DEFAULT_QUBIT_CAP, NORM_TOLERANCE};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QsimError {
    #[error(
        "{n_qubits} qubits exceed the cap of {cap}; the state vector would need {bytes} bytes"
    )]
    Resource {
        n_qubits: usize,
        cap: usize,
        bytes: u128,
    },
    #[error("a register needs at least one qubit")]
    Empty,
    #[error("qubit {qubit} is out of range for a {n_qubits}-qubit state")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },
    #[error("span {offset}..{} is out of range for a {n_qubits}-qubit state", offset + width)]
    SpanOutOfRange {
        offset: usize,
        width: usize,
        n_qubits: usize,
    },
    #[error("basis index {index} is out of range for dimension {dim}")]
    BasisOutOfRange { index: usize, dim: usize },
    #[error("control and target are both qubit {0}")]
    ControlIsTarget(usize),
    #[error("qubit {0} appears in more than one operand")]
    Overlap(usize),
    #[error("register widths differ: {0} vs {1}")]
    WidthMismatch(usize, usize),
    #[error("rotation angle is not finite")]
    NonFinite,
    #[error("state has zero norm; simulator state is corrupted")]
    Degenerate,
    #[error("amplitude vector of length {0} is not a power of two ≥ 2")]
    BadLength(usize),
    #[error("amplitude vector is not normalised (‖ψ‖² = {0})")]
    NotNormalized(f64),
    #[error("post-selection failed after {0} attempt(s)")]
    PostSelection(u32),
    #[error("modulus {modulus} does not fit a {width}-qubit register")]
    BadModulus { modulus: usize, width: usize },
}
