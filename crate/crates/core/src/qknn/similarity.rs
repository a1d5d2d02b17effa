use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::amplitude::amplitude_estimate;
use super::encoding::{
    amplitude_encoded_state, prepare_query_state, uniform_index_state, EncodedState,
};
use super::{Mode, QknnError, TrainingSet};
use crate::qsim::{Gate2, Span, StateVector};

/// `|⟨ρ|τ_j⟩|²` for amplitude-encoded vectors `a` and `b`:
/// `((1/U) Σ_i (√(1−a_i²)√(1−b_i²) + a_i b_i))²`.
pub fn fidelity(a: &[f64], b: &[f64]) -> f64 {
    let overlap: f64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| ((1.0 - x * x) * (1.0 - y * y)).max(0.0).sqrt() + x * y)
        .sum::<f64>()
        / a.len() as f64;
    overlap * overlap
}

/// Fidelity between the query and training point `j`.
pub fn pairwise_fidelity(train: &TrainingSet, v0: &[f64], j: usize) -> Result<f64, QknnError> {
    train.check_query(v0)?;
    Ok(fidelity(v0, train.features(j)))
}

/// One training point's entry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimRow {
    /// `|⟨ρ|τ_j⟩|²`.
    pub fidelity: f64,
    /// `P_j(0) = (1 + fidelity)/2`.
    pub p0: f64,
    /// Estimate of `P_j(0)` read back from the similarity register.
    pub estimate: f64,
    /// Integer similarity on the `R` grid.
    pub sim: u32,
}

/// Similarities of one query against every training point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityTable {
    /// Counting-register size `R`; `sim` lies in `0..=R/2`.
    pub r: usize,
    pub rows: Vec<SimRow>,
}

impl SimilarityTable {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn sims(&self) -> impl Iterator<Item = u32> + '_ {
        self.rows.iter().map(|r| r.sim)
    }

    /// Total order used for neighbour selection: larger `sim` first, then
    /// lower index.
    #[inline]
    pub fn beats(&self, a: usize, b: usize) -> bool {
        let (sa, sb) = (self.rows[a].sim, self.rows[b].sim);
        sa > sb || (sa == sb && a < b)
    }

    /// Indices sorted best first under [`beats`](Self::beats).
    pub fn ranking(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| self.rows[b].sim.cmp(&self.rows[a].sim).then(a.cmp(&b)));
        order
    }
}

/// `⌊(R/π)·asin(√p)⌋`.
pub fn sim_from_probability(p: f64, r: usize) -> u32 {
    let x = r as f64 / PI * p.clamp(0.0, 1.0).sqrt().asin();
    (x + 1e-9).floor() as u32
}

/// Gate-level swap-test states for a fixed training set.
#[derive(Debug, Clone)]
pub struct GateCache {
    taus: Vec<EncodedState>,
}

impl GateCache {
    pub fn new(train: &TrainingSet) -> Result<Self, QknnError> {
        let taus = train
            .samples()
            .iter()
            .map(|s| amplitude_encoded_state(&[&s.features], false))
            .collect::<Result<_, _>>()?;
        Ok(Self { taus })
    }

    /// `P_j(0)` read from the control qubit of a simulated swap test
    /// between `rho` and `|τ_j⟩`.
    pub fn swap_test_probability(&self, rho: &EncodedState, j: usize) -> Result<f64, QknnError> {
        let tau = &self.taus[j];
        let w = rho.feature_span().width;
        let mut s = StateVector::new(1)?
            .tensor(&rho.state)?
            .tensor(&tau.state)?;
        s.cswap_test(0, Span::new(1, w), Span::new(1 + w, w))?;
        Ok(s.probability_of(Span::single(0), 0)?)
    }

    pub fn len(&self) -> usize {
        self.taus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taus.is_empty()
    }
}

/// `(1/√M) Σ_j |j⟩ (√P_j(0)|0⟩ + √(1−P_j(0))|1⟩)` with the control qubit
/// at qubit 0 and the index register (values `1..=M`) above it. Each
/// `P_j(0)` comes from a simulated swap test and is loaded by a rotation
/// conditioned on the index register.
pub fn similarity_superposition(
    train: &TrainingSet,
    v0: &[f64],
) -> Result<(StateVector, Span), QknnError> {
    train.check_query(v0)?;
    let cache = GateCache::new(train)?;
    let rho = prepare_query_state(v0)?;
    let index = uniform_index_state(train.len())?;
    let span = Span::new(1, index.n_qubits());
    let mut s = StateVector::new(1)?.tensor(&index)?;
    for j in 0..train.len() {
        let p0 = cache.swap_test_probability(&rho, j)?;
        let controls: Vec<(usize, bool)> = (0..span.width)
            .map(|b| (span.qubit(b), (j + 1) >> b & 1 == 1))
            .collect();
        let angle = 2.0 * (1.0 - p0).max(0.0).sqrt().asin();
        s.apply_controlled(&controls, 0, &Gate2::ry(angle))?;
    }
    Ok((s, span))
}

/// Fills the similarity table for one query.
///
/// Analytic mode evaluates `P_j(0)` in closed form and floors
/// `(R/π)·asin(√P_j(0))` to the grid. Gate mode simulates the swap test
/// and the amplitude-estimation circuit and keeps the measured register
/// value, folded into `0..=R/2`.
pub fn compute_similarity_table(
    train: &TrainingSet,
    v0: &[f64],
    r: usize,
    mode: Mode,
    cache: Option<&GateCache>,
) -> Result<SimilarityTable, QknnError> {
    train.check_query(v0)?;
    if r < 2 {
        return Err(QknnError::BadRegister(r));
    }
    let rows = match mode {
        Mode::Analytic => train
            .samples()
            .iter()
            .map(|s| {
                let f = fidelity(v0, &s.features);
                let p0 = (1.0 + f) / 2.0;
                SimRow {
                    fidelity: f,
                    p0,
                    estimate: p0,
                    sim: sim_from_probability(p0, r),
                }
            })
            .collect(),
        Mode::Gate => {
            let owned;
            let cache = match cache {
                Some(c) => c,
                None => {
                    owned = GateCache::new(train)?;
                    &owned
                }
            };
            let rho = prepare_query_state(v0)?;
            (0..train.len())
                .map(|j| {
                    let f = fidelity(v0, train.features(j));
                    let measured = cache.swap_test_probability(&rho, j)?;
                    let ae = amplitude_estimate(measured.clamp(0.0, 1.0), r)?;
                    let sim = ae.sigma.min(r - ae.sigma) as u32;
                    Ok(SimRow {
                        fidelity: f,
                        p0: measured,
                        estimate: ae.estimate,
                        sim,
                    })
                })
                .collect::<Result<_, QknnError>>()?
        }
    };
    Ok(SimilarityTable { r, rows })
}
