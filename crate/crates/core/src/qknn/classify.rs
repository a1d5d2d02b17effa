use rand::Rng;
use serde::{Deserialize, Serialize};

use super::grover::{GroverEngine, Schedule};
use super::kmax::{k_maximal_find, KmaxReport};
use super::similarity::{compute_similarity_table, fidelity, GateCache, SimilarityTable};
use super::{Mode, QknnError, TrainingSet};

/// Most frequent label; ties go to the lowest label.
pub fn majority_vote(labels: &[usize]) -> Result<usize, QknnError> {
    let top = labels.iter().copied().max().ok_or(QknnError::EmptyVote)?;
    let mut counts = vec![0usize; top + 1];
    for &l in labels {
        counts[l] += 1;
    }
    let best = counts.iter().copied().max().unwrap_or(0);
    Ok(counts.iter().position(|&c| c == best).unwrap_or(0))
}

fn vote_fractions(labels: &[usize], n_classes: usize) -> Vec<f64> {
    let mut scores = vec![0.0; n_classes];
    for &l in labels {
        scores[l] += 1.0;
    }
    let k = labels.len() as f64;
    scores.iter_mut().for_each(|s| *s /= k);
    scores
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SimilarityMetric {
    Euclidean,
    Cosine,
    Fidelity,
}

impl SimilarityMetric {
    /// Larger is closer.
    fn score(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            SimilarityMetric::Euclidean => -a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y).powi(2))
                .sum::<f64>()
                .sqrt(),
            SimilarityMetric::Cosine => {
                let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
                let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
                let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
                if na == 0.0 || nb == 0.0 {
                    0.0
                } else {
                    dot / (na * nb)
                }
            }
            SimilarityMetric::Fidelity => fidelity(a, b),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnPrediction {
    pub label: usize,
    /// Fraction of the `k` neighbours in each class.
    pub scores: Vec<f64>,
    /// Neighbour indices, closest first.
    pub neighbors: Vec<usize>,
}

/// Exhaustive kNN. Equal scores are ordered by index.
pub fn classical_knn_predict(
    train: &TrainingSet,
    v0: &[f64],
    k: usize,
    metric: SimilarityMetric,
) -> Result<KnnPrediction, QknnError> {
    train.check_query(v0)?;
    check_k(k, train.len())?;
    let scores: Vec<f64> = train
        .samples()
        .iter()
        .map(|s| metric.score(v0, &s.features))
        .collect();
    let mut order: Vec<usize> = (0..train.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    order.truncate(k);
    let labels: Vec<usize> = order.iter().map(|&j| train.label(j)).collect();
    Ok(KnnPrediction {
        label: majority_vote(&labels)?,
        scores: vote_fractions(&labels, train.n_classes()),
        neighbors: order,
    })
}

fn check_k(k: usize, m: usize) -> Result<(), QknnError> {
    if k == 0 {
        Err(QknnError::ZeroK)
    } else if k > m {
        Err(QknnError::KTooLarge { k, m })
    } else {
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QknnConfig {
    pub mode: Mode,
    /// Amplitude-estimation register size `R`.
    pub r: usize,
    pub schedule: Schedule,
}

impl Default for QknnConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Analytic,
            r: 131,
            schedule: Schedule::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QknnPrediction {
    pub label: usize,
    pub scores: Vec<f64>,
    /// Neighbour indices, most similar first.
    pub neighbors: Vec<usize>,
    pub table: SimilarityTable,
    pub report: KmaxReport,
}

/// Similarity table, Grover k-maximal finding, then a majority vote.
pub fn qknn_predict<R: Rng + ?Sized>(
    train: &TrainingSet,
    v0: &[f64],
    k: usize,
    cfg: &QknnConfig,
    cache: Option<&GateCache>,
    rng: &mut R,
) -> Result<QknnPrediction, QknnError> {
    check_k(k, train.len())?;
    let table = compute_similarity_table(train, v0, cfg.r, cfg.mode, cache)?;
    let vote = vote_on_table(train, &table, k, cfg, rng)?;
    Ok(QknnPrediction {
        label: vote.label,
        scores: vote.scores,
        neighbors: vote.neighbors,
        table,
        report: vote.report,
    })
}

/// Outcome of k-maximal finding and voting on a fixed similarity table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableVote {
    pub label: usize,
    pub scores: Vec<f64>,
    pub neighbors: Vec<usize>,
    pub report: KmaxReport,
}

/// The part of [`qknn_predict`] after the similarity table, so several `k`
/// can share one table.
pub fn vote_on_table<R: Rng + ?Sized>(
    train: &TrainingSet,
    table: &SimilarityTable,
    k: usize,
    cfg: &QknnConfig,
    rng: &mut R,
) -> Result<TableVote, QknnError> {
    check_k(k, train.len())?;
    let engine = match cfg.mode {
        Mode::Gate => GroverEngine::Gate,
        Mode::Analytic => GroverEngine::Analytic,
    };
    let (set, report) = k_maximal_find(table, k, engine, cfg.schedule, rng)?;
    let labels: Vec<usize> = set.members.iter().map(|&j| train.label(j)).collect();
    Ok(TableVote {
        label: majority_vote(&labels)?,
        scores: vote_fractions(&labels, train.n_classes()),
        neighbors: set.members,
        report,
    })
}
