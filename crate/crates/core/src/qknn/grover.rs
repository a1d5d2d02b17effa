use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::encoding::index_width;
use super::{QknnError, SimilarityTable};
use crate::qsim::{Span, StateVector};

/// Predicate `F` over the indices `0..M`, with the counting and sampling
/// hooks the analytic engine needs.
pub trait MarkedSet {
    /// `M`.
    fn domain(&self) -> usize;
    /// `t`, the number of marked indices.
    fn count(&self) -> usize;
    fn is_marked(&self, j: usize) -> bool;
    /// Uniform marked index; only called when `count() > 0`.
    fn sample_marked<R: Rng + ?Sized>(&self, rng: &mut R) -> usize;
    /// Uniform unmarked index; only called when `count() < domain()`.
    fn sample_unmarked<R: Rng + ?Sized>(&self, rng: &mut R) -> usize;
}

/// Marked set given by an explicit flag per index.
#[derive(Debug, Clone)]
pub struct SliceMarked {
    flags: Vec<bool>,
    marked: Vec<usize>,
    unmarked: Vec<usize>,
}

impl SliceMarked {
    pub fn new(flags: Vec<bool>) -> Self {
        let (marked, unmarked) = (0..flags.len()).partition(|&j| flags[j]);
        Self {
            flags,
            marked,
            unmarked,
        }
    }
}

impl MarkedSet for SliceMarked {
    fn domain(&self) -> usize {
        self.flags.len()
    }
    fn count(&self) -> usize {
        self.marked.len()
    }
    fn is_marked(&self, j: usize) -> bool {
        self.flags[j]
    }
    fn sample_marked<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.marked[rng.random_range(0..self.marked.len())]
    }
    fn sample_unmarked<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.unmarked[rng.random_range(0..self.unmarked.len())]
    }
}

/// How a Grover round is executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroverEngine {
    /// Iterations applied to a simulated index register, then measured.
    Gate,
    /// Outcome sampled from the closed-form success probability.
    Analytic,
}

/// Iteration schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Schedule {
    /// `l = ⌊π/(4θ)⌋` with `t` known, repeated up to `max_rounds` times.
    KnownT { max_rounds: u32 },
    /// Unknown `t`: round `r` draws `l` uniformly below `m_r`, with
    /// `m_{r+1} = min(growth·m_r, √M)`. The search reports "none" once the
    /// oracle calls spent reach `give_up · √M`.
    Exponential { growth: f64, give_up: f64 },
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule::Exponential {
            growth: 1.2,
            give_up: 16.0,
        }
    }
}

/// Record of one search.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GroverRunReport {
    /// Grover iterations `l` of each round.
    pub iterations: Vec<u64>,
    /// Iterations plus one classical check of each measured index.
    pub oracle_calls: u64,
    pub success: bool,
    pub found: Option<usize>,
}

pub type SearchOutcome = GroverRunReport;

/// `θ = asin(√(t/M))`.
fn theta(m: usize, t: usize) -> f64 {
    (t as f64 / m as f64).sqrt().asin()
}

/// `⌊π/(4θ)⌋`; 0 when `t = 0`.
pub fn iterations_for(m: usize, t: usize) -> u64 {
    if t == 0 {
        return 0;
    }
    (PI / (4.0 * theta(m, t))).floor() as u64
}

/// `sin²((2l+1)θ)`.
pub fn marked_probability_closed_form(m: usize, t: usize, l: u64) -> f64 {
    ((2 * l + 1) as f64 * theta(m, t)).sin().powi(2)
}

fn uniform_target(m: usize, width: usize) -> Vec<Complex64> {
    let amp = Complex64::new(1.0 / (m as f64).sqrt(), 0.0);
    (0..1usize << width)
        .map(|v| {
            if (1..=m).contains(&v) {
                amp
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect()
}

/// One `G_F = W' S_0 W'† S_F` on `span`, which holds `j + 1` for index
/// `j`. `W'` maps `|0⟩` to the uniform superposition of `1..=M`.
pub fn grover_iteration(
    state: &mut StateVector,
    span: Span,
    m: usize,
    marked: &impl Fn(usize) -> bool,
) -> Result<(), QknnError> {
    let target = uniform_target(m, span.width);
    state.apply_phase_oracle(span, |v| (1..=m).contains(&v) && marked(v - 1))?;
    state.apply_state_preparation(span, &target)?;
    state.apply_zero_reflection(span)?;
    state.apply_state_preparation(span, &target)?;
    Ok(())
}

/// Uniform starting state `W'|0⟩` on a fresh index register.
pub fn initial_state(m: usize) -> Result<(StateVector, Span), QknnError> {
    let width = index_width(m);
    let span = Span::new(0, width);
    let mut s = StateVector::new(width)?;
    s.apply_state_preparation(span, &uniform_target(m, width))?;
    Ok((s, span))
}

fn round<S: MarkedSet, R: Rng + ?Sized>(
    marked: &S,
    engine: GroverEngine,
    l: u64,
    rng: &mut R,
) -> Result<usize, QknnError> {
    let m = marked.domain();
    match engine {
        GroverEngine::Gate => {
            let (mut s, span) = initial_state(m)?;
            let f = |j: usize| marked.is_marked(j);
            for _ in 0..l {
                grover_iteration(&mut s, span, m, &f)?;
            }
            Ok(s.measure(span, rng)?.bits - 1)
        }
        GroverEngine::Analytic => {
            let t = marked.count();
            let hit =
                t == m || (t > 0 && rng.random::<f64>() < marked_probability_closed_form(m, t, l));
            Ok(if hit {
                marked.sample_marked(rng)
            } else {
                marked.sample_unmarked(rng)
            })
        }
    }
}

/// Searches for one marked index.
pub fn run_search<S: MarkedSet, R: Rng + ?Sized>(
    marked: &S,
    engine: GroverEngine,
    schedule: Schedule,
    rng: &mut R,
) -> Result<GroverRunReport, QknnError> {
    let m = marked.domain();
    let mut report = GroverRunReport::default();
    if m == 0 {
        return Ok(report);
    }
    let attempt = |l: u64, report: &mut GroverRunReport, rng: &mut R| -> Result<bool, QknnError> {
        let j = round(marked, engine, l, rng)?;
        report.iterations.push(l);
        report.oracle_calls += l + 1;
        if marked.is_marked(j) {
            report.success = true;
            report.found = Some(j);
        }
        Ok(report.success)
    };
    match schedule {
        Schedule::KnownT { max_rounds } => {
            let t = marked.count();
            if t == 0 {
                return Ok(report);
            }
            let l = iterations_for(m, t);
            for _ in 0..max_rounds {
                if attempt(l, &mut report, rng)? {
                    break;
                }
            }
        }
        Schedule::Exponential { growth, give_up } => {
            let cap = give_up * (m as f64).sqrt();
            let ceiling = (m as f64).sqrt();
            let mut bound = 1.0f64;
            loop {
                let l = rng.random_range(0..bound.floor().max(1.0) as u64);
                if attempt(l, &mut report, rng)? {
                    break;
                }
                if report.oracle_calls as f64 >= cap {
                    break;
                }
                bound = (bound * growth).min(ceiling).max(1.0);
            }
        }
    }
    Ok(report)
}

/// Looks for an index whose similarity exceeds `threshold`.
pub fn grover_find_greater<R: Rng + ?Sized>(
    table: &SimilarityTable,
    threshold: u32,
    engine: GroverEngine,
    schedule: Schedule,
    rng: &mut R,
) -> Result<GroverRunReport, QknnError> {
    let flags = table.sims().map(|s| s > threshold).collect();
    run_search(&SliceMarked::new(flags), engine, schedule, rng)
}
