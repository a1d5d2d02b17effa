use rand::Rng;

use super::data::check_unit;
use super::QknnError;
use crate::qsim::{Gate2, QsimError, RegisterLayout, Span, StateVector};

/// Result of the probabilistic uniform-superposition circuit.
#[derive(Debug, Clone)]
pub struct UniformPreparation {
    /// `(1/√M) Σ_{j=1..M} |j⟩` on `width` qubits.
    pub state: StateVector,
    pub width: usize,
    /// Probability that one run of the circuit post-selects, `M / 2^m`.
    pub success_probability: f64,
    /// Runs needed before the flags read `00`.
    pub attempts: u32,
}

/// Qubits needed to hold the values `1..=count`.
pub fn index_width(count: usize) -> usize {
    (usize::BITS - count.leading_zeros()) as usize
}

/// Full register of the uniform-superposition circuit before post-selection:
/// `R1` index, `R2` holding `count`, `R3` comparator flag, `R4` zero flag.
fn uniform_circuit(count: usize) -> Result<(StateVector, RegisterLayout), QknnError> {
    if count == 0 {
        return Err(QknnError::Empty);
    }
    let m = index_width(count);
    let mut layout = RegisterLayout::new();
    let r1 = layout.push("R1", m);
    let r2 = layout.push("R2", m);
    let r3 = layout.push("R3", 1);
    let r4 = layout.push("R4", 1);
    let mut s = StateVector::new(layout.n_qubits())?;
    s.load_value(r2, count)?;
    s.apply_hadamard_all(r1)?;
    let zero_controls: Vec<(usize, bool)> = (0..m).map(|p| (r1.qubit(p), false)).collect();
    s.apply_multi_controlled(&zero_controls, r4.offset)?;
    s.apply_cmp(r1, r2, r3.offset)?;
    Ok((s, layout))
}

fn post_select(
    s: &StateVector,
    layout: &RegisterLayout,
    count: usize,
) -> Result<StateVector, QknnError> {
    let r1 = layout.get("R1").expect("R1");
    let flags = Span::new(r1.width * 2, 2);
    let (s, _) = s.project(flags, 0)?;
    let (s, _) = s.project(Span::new(r1.width, r1.width), count)?;
    Ok(s)
}

/// Runs the H / ICNOT / CMP circuit and repeats it until both flags read 0,
/// measuring with `rng`. Fails after `max_attempts` unsuccessful runs.
pub fn prepare_uniform_superposition<R: Rng + ?Sized>(
    count: usize,
    max_attempts: u32,
    rng: &mut R,
) -> Result<UniformPreparation, QknnError> {
    let (template, layout) = uniform_circuit(count)?;
    let r1 = layout.get("R1").expect("R1");
    let flags = Span::new(r1.width * 2, 2);
    let success_probability = template.probability_of(flags, 0)?;
    for attempt in 1..=max_attempts {
        let mut s = template.clone();
        if s.measure(flags, rng)?.bits == 0 {
            return Ok(UniformPreparation {
                state: post_select(&s, &layout, count)?,
                width: r1.width,
                success_probability,
                attempts: attempt,
            });
        }
    }
    Err(QsimError::PostSelection(max_attempts).into())
}

/// The post-selected output of the circuit, without sampling.
pub(crate) fn uniform_index_state(count: usize) -> Result<StateVector, QknnError> {
    let (s, layout) = uniform_circuit(count)?;
    post_select(&s, &layout, count)
}

/// Amplitude-encoded feature state.
///
/// Qubit layout from the least significant end: amplitude qubit, flag
/// qubit, feature index register `i` (values `1..=U`) and, for training
/// states, the sample index register `j` (values `1..=M`).
#[derive(Debug, Clone)]
pub struct EncodedState {
    pub state: StateVector,
    pub amp: usize,
    pub flag: usize,
    pub i: Span,
    pub j: Option<Span>,
    /// Purity of the value register just before it was discarded; 1 when
    /// the uncomputation left it in `|0⟩`.
    pub aux_purity: f64,
}

impl EncodedState {
    /// The register compared in the swap test (amplitude, flag and `i`).
    pub fn feature_span(&self) -> Span {
        Span::new(0, self.i.end())
    }
}

/// Builds `(1/√M) Σ_j |j⟩ (1/√U) Σ_i |i⟩ |1⟩ (√(1−v_ji²)|0⟩ + v_ji|1⟩)` by
/// loading a value register with the oracle `O`, rotating the amplitude
/// qubit by `R_y(2 asin v)` conditioned on it, and uncomputing with `O†`.
/// Without `index_register` exactly one row is encoded and `j` is omitted.
pub fn amplitude_encoded_state(
    rows: &[&[f64]],
    index_register: bool,
) -> Result<EncodedState, QknnError> {
    let first = rows.first().ok_or(QknnError::Empty)?;
    let u = first.len();
    if u == 0 {
        return Err(QknnError::Empty);
    }
    if !index_register && rows.len() != 1 {
        return Err(QknnError::DimensionMismatch {
            expected: 1,
            got: rows.len(),
        });
    }
    for (s, r) in rows.iter().enumerate() {
        if r.len() != u {
            return Err(QknnError::DimensionMismatch {
                expected: u,
                got: r.len(),
            });
        }
        check_unit(r).map_err(|(feature, value)| QknnError::NotNormalized {
            sample: s,
            feature,
            value,
        })?;
    }

    // distinct values get ids; the oracle writes the id of v_ji
    let mut values: Vec<f64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
    values.sort_by(|a, b| a.total_cmp(b));
    values.dedup();
    let id_of = |v: f64| {
        values
            .binary_search_by(|x| x.total_cmp(&v))
            .expect("value present")
    };
    let aux_width = index_width(values.len().saturating_sub(1)).max(1);

    let i_width = index_width(u);
    let amp = 0;
    let flag = 1;
    let aux = Span::new(2, aux_width);
    let i = Span::new(aux.end(), i_width);
    let mut state = StateVector::new(2 + aux_width)?.tensor(&uniform_index_state(u)?)?;
    let j = if index_register {
        let j_state = uniform_index_state(rows.len())?;
        let span = Span::new(i.end(), j_state.n_qubits());
        state = state.tensor(&j_state)?;
        Some(span)
    } else {
        None
    };

    let oracle = |b: usize| -> usize {
        let iv = i.extract(b);
        let jv = j.map_or(1, |s| s.extract(b));
        if iv == 0 || iv > u || jv == 0 || jv > rows.len() {
            return b;
        }
        let id = id_of(rows[jv - 1][iv - 1]);
        aux.deposit(b, aux.extract(b) ^ id)
    };

    state.apply_permutation(oracle)?;
    state.apply_x(flag)?;
    for (id, v) in values.iter().enumerate() {
        let controls: Vec<(usize, bool)> = (0..aux_width)
            .map(|p| (aux.qubit(p), id >> p & 1 == 1))
            .collect();
        state.apply_controlled(&controls, amp, &Gate2::ry(2.0 * v.asin()))?;
    }
    state.apply_permutation(oracle)?;

    let aux_purity = state.reduced_purity(aux)?;
    let (state, _) = state.project(aux, 0)?;
    let shift = |s: Span| Span::new(s.offset - aux_width, s.width);
    Ok(EncodedState {
        state,
        amp,
        flag,
        i: shift(i),
        j: j.map(shift),
        aux_purity,
    })
}

/// Training state over all samples, with the sample index register.
pub fn prepare_training_state(train: &super::TrainingSet) -> Result<EncodedState, QknnError> {
    let rows: Vec<&[f64]> = train
        .samples()
        .iter()
        .map(|s| s.features.as_slice())
        .collect();
    amplitude_encoded_state(&rows, true)
}

/// Query state `(1/√U) Σ_i |i⟩ |1⟩ (√(1−v_0i²)|0⟩ + v_0i|1⟩)`, laid out
/// like a single training row so the swap test compares matching qubits.
pub fn prepare_query_state(v0: &[f64]) -> Result<EncodedState, QknnError> {
    amplitude_encoded_state(&[v0], false)
}
