use serde::{Deserialize, Serialize};

use super::MetricsError;

/// Counts indexed by (actual, predicted).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    n_classes: usize,
    counts: Vec<u64>,
}

/// One-vs-rest reduction of a [`ConfusionMatrix`] for a single class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OneVsRest {
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
    pub tn: u64,
}

impl ConfusionMatrix {
    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn get(&self, actual: usize, predicted: usize) -> u64 {
        self.counts[actual * self.n_classes + predicted]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Rows of the matrix, actual class first.
    pub fn rows(&self) -> impl Iterator<Item = &[u64]> {
        self.counts.chunks(self.n_classes.max(1))
    }

    pub fn one_vs_rest(&self, class: usize) -> OneVsRest {
        let n = self.n_classes;
        let tp = self.get(class, class);
        let support: u64 = (0..n).map(|p| self.get(class, p)).sum();
        let predicted: u64 = (0..n).map(|a| self.get(a, class)).sum();
        OneVsRest {
            tp,
            fp: predicted - tp,
            fn_: support - tp,
            tn: self.total() + tp - support - predicted,
        }
    }
}

pub fn confusion(
    pred: &[usize],
    truth: &[usize],
    n_classes: usize,
) -> Result<ConfusionMatrix, MetricsError> {
    if pred.len() != truth.len() {
        return Err(MetricsError::LengthMismatch {
            pred: pred.len(),
            truth: truth.len(),
        });
    }
    let mut counts = vec![0; n_classes * n_classes];
    for (&p, &a) in pred.iter().zip(truth) {
        for label in [p, a] {
            if label >= n_classes {
                return Err(MetricsError::LabelOutOfRange { label, n_classes });
            }
        }
        counts[a * n_classes + p] += 1;
    }
    Ok(ConfusionMatrix { n_classes, counts })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Precision {
    pub per_class: Vec<f64>,
    pub average: f64,
}

/// `TP/(TP+FP)` per class, 0 for a class that is never predicted, and
/// the plain mean over all classes.
pub fn precision_per_class(cm: &ConfusionMatrix) -> Precision {
    let per_class: Vec<f64> = (0..cm.n_classes())
        .map(|c| {
            let r = cm.one_vs_rest(c);
            if r.tp + r.fp == 0 {
                0.0
            } else {
                r.tp as f64 / (r.tp + r.fp) as f64
            }
        })
        .collect();
    let average = if per_class.is_empty() {
        0.0
    } else {
        per_class.iter().sum::<f64>() / per_class.len() as f64
    };
    Precision { per_class, average }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    /// `(FPR, TPR)` from `(0, 0)` to `(1, 1)`.
    pub points: Vec<(f64, f64)>,
    pub auc: f64,
}

/// Area under a polyline by the trapezoid rule.
pub fn trapezoid(points: &[(f64, f64)]) -> f64 {
    points
        .windows(2)
        .map(|w| (w[1].0 - w[0].0) * (w[1].1 + w[0].1) / 2.0)
        .sum()
}

/// One-vs-rest ROC of a single class: thresholds at every distinct score,
/// highest first.
fn roc_one(scores: &[f64], positive: &[bool]) -> Vec<(f64, f64)> {
    let n_pos = positive.iter().filter(|&&p| p).count() as f64;
    let n_neg = positive.len() as f64 - n_pos;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let mut points = vec![(0.0, 0.0)];
    let (mut tp, mut fp) = (0.0, 0.0);
    for (i, &s) in order.iter().enumerate() {
        if positive[s] {
            tp += 1.0;
        } else {
            fp += 1.0;
        }
        let last_of_tie = order.get(i + 1).is_none_or(|&n| scores[n] != scores[s]);
        if last_of_tie {
            points.push((fp / n_neg, tp / n_pos));
        }
    }
    points
}

/// Lowest and highest TPR of a monotone polyline at `x`.
fn tpr_range(curve: &[(f64, f64)], x: f64) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for w in curve.windows(2) {
        let ((x0, y0), (x1, y1)) = (w[0], w[1]);
        if x < x0 || x > x1 {
            continue;
        }
        let y = if x1 == x0 {
            if x == x0 {
                lo = lo.min(y0.min(y1));
                hi = hi.max(y0.max(y1));
            }
            continue;
        } else {
            y0 + (y1 - y0) * (x - x0) / (x1 - x0)
        };
        lo = lo.min(y);
        hi = hi.max(y);
    }
    (lo, hi)
}

/// Macro-averaged one-vs-rest ROC.
///
/// `scores[s][c]` is the score of sample `s` for class `c`. Each class with
/// at least one positive and one negative sample contributes a curve;
/// the curves are averaged on the union of their FPR breakpoints, keeping
/// both ends of vertical steps, so the area equals the mean per-class AUC.
pub fn roc_macro(scores: &[Vec<f64>], truth: &[usize]) -> Result<RocCurve, MetricsError> {
    if scores.len() != truth.len() {
        return Err(MetricsError::LengthMismatch {
            pred: scores.len(),
            truth: truth.len(),
        });
    }
    let n_classes = scores.first().map_or(0, |s| s.len());
    for (i, (row, &t)) in scores.iter().zip(truth).enumerate() {
        if row.len() != n_classes {
            return Err(MetricsError::LengthMismatch {
                pred: row.len(),
                truth: n_classes,
            });
        }
        if t >= n_classes {
            return Err(MetricsError::LabelOutOfRange {
                label: t,
                n_classes,
            });
        }
        if let Some(&value) = row.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(MetricsError::BadScore { sample: i, value });
        }
    }
    let mut curves = Vec::new();
    for c in 0..n_classes {
        let positive: Vec<bool> = truth.iter().map(|&t| t == c).collect();
        let n_pos = positive.iter().filter(|&&p| p).count();
        if n_pos == 0 || n_pos == truth.len() {
            continue;
        }
        let col: Vec<f64> = scores.iter().map(|r| r[c]).collect();
        curves.push(roc_one(&col, &positive));
    }
    if curves.is_empty() {
        return Err(MetricsError::SingleClass);
    }
    let mut grid: Vec<f64> = curves.iter().flatten().map(|p| p.0).collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let n = curves.len() as f64;
    let mut points = Vec::with_capacity(2 * grid.len());
    for &x in &grid {
        let (lo, hi) = curves
            .iter()
            .map(|c| tpr_range(c, x))
            .fold((0.0, 0.0), |(a, b), (l, h)| (a + l, b + h));
        points.push((x, lo / n));
        if hi > lo {
            points.push((x, hi / n));
        }
    }
    let auc = trapezoid(&points);
    Ok(RocCurve { points, auc })
}
