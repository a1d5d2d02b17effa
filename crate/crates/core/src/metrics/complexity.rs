use serde::{Deserialize, Serialize};

use super::MetricsError;
use crate::qknn::register_size;

/// Stage costs of exhaustive kNN.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalCost {
    /// `U·M`.
    pub similarity: f64,
    /// `M·log2 M`.
    pub sort: f64,
    /// `k`.
    pub vote: f64,
}

impl ClassicalCost {
    pub fn total(&self) -> f64 {
        self.similarity + self.sort + self.vote
    }
}

/// Stage costs of the quantum classifier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantumCost {
    /// `M·(log2 U)²`.
    pub similarity: f64,
    /// `R`.
    pub estimation: f64,
    /// `√(kM)`.
    pub kmax: f64,
    /// `k`.
    pub vote: f64,
}

impl QuantumCost {
    pub fn total(&self) -> f64 {
        self.similarity + self.estimation + self.kmax + self.vote
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexityReport {
    pub u: usize,
    pub m: usize,
    pub k: usize,
    pub delta: f64,
    pub r: usize,
    pub classical: ClassicalCost,
    pub quantum: QuantumCost,
    pub classical_total: f64,
    pub quantum_total: f64,
}

fn classical_cost(u: usize, m: usize, k: usize) -> ClassicalCost {
    let mf = m as f64;
    ClassicalCost {
        similarity: (u * m) as f64,
        sort: mf * mf.log2(),
        vote: k as f64,
    }
}

/// `U·M + M·log2 M + k`.
pub fn complexity_classical(u: usize, m: usize, k: usize) -> f64 {
    classical_cost(u, m, k).total()
}

/// Both cost models at `(U, M, k, δ)`, with `R = ⌈π(π+1)/δ⌉`.
pub fn complexity_quantum(
    u: usize,
    m: usize,
    k: usize,
    delta: f64,
) -> Result<ComplexityReport, MetricsError> {
    if u == 0 || m == 0 || k == 0 {
        return Err(MetricsError::NonPositive);
    }
    let r = register_size(delta).ok_or(MetricsError::BadDelta(delta))?;
    let log_u = (u as f64).log2();
    let quantum = QuantumCost {
        similarity: m as f64 * log_u * log_u,
        estimation: r as f64,
        kmax: ((k * m) as f64).sqrt(),
        vote: k as f64,
    };
    let classical = classical_cost(u, m, k);
    Ok(ComplexityReport {
        u,
        m,
        k,
        delta,
        r,
        classical,
        quantum,
        classical_total: classical.total(),
        quantum_total: quantum.total(),
    })
}

/// Oracle calls needed to drive `t` improving indices to zero during
/// k-maximal finding.
///
/// For `t ≤ 2k` this is `Σ_{i=1}^{2k} √(M/i)`. For `t > 2k`, halving `t`
/// costs `k·√(M/t')` at each level, with `t' = 2^i k`, down to `2k`; the
/// `t ≤ 2k` sum is then added for the final stretch.
pub fn oracle_budget_kmax(m: usize, t: usize, k: usize) -> f64 {
    if t == 0 || k == 0 {
        return 0.0;
    }
    let mf = m as f64;
    let tail: f64 = (1..=2 * k).map(|i| (mf / i as f64).sqrt()).sum();
    if t <= 2 * k {
        return tail;
    }
    let levels = (t as f64 / (2 * k) as f64).log2().ceil() as i32;
    let halving: f64 = (1..=levels)
        .map(|i| k as f64 * (mf / (2f64.powi(i) * k as f64)).sqrt())
        .sum();
    halving + tail
}
