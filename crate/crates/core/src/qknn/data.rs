use serde::{Deserialize, Serialize};

use super::QknnError;

/// Feature vector with its class. Labels are zero based: label `c` is the
/// sector `L_{c+1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledSample {
    pub features: Vec<f64>,
    pub label: usize,
}

/// Per-feature min-max scaling fitted on training data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl Normalization {
    /// Fits the column-wise range of `rows`. Returns `None` for no rows.
    pub fn fit<'a>(rows: impl IntoIterator<Item = &'a [f64]>) -> Option<Self> {
        let mut it = rows.into_iter();
        let first = it.next()?;
        let mut min = first.to_vec();
        let mut max = first.to_vec();
        for r in it {
            for (c, v) in r.iter().enumerate() {
                min[c] = min[c].min(*v);
                max[c] = max[c].max(*v);
            }
        }
        Some(Self { min, max })
    }

    /// Scales into `[0, 1]`, clamping values outside the fitted range. A
    /// constant column maps to 0.
    pub fn apply(&self, raw: &[f64]) -> Vec<f64> {
        raw.iter()
            .enumerate()
            .map(|(c, v)| {
                let span = self.max[c] - self.min[c];
                if span > 0.0 {
                    ((v - self.min[c]) / span).clamp(0.0, 1.0)
                } else {
                    0.0
                }
            })
            .collect()
    }

    pub fn dim(&self) -> usize {
        self.min.len()
    }
}

/// Labelled, normalised training vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingSet {
    samples: Vec<LabeledSample>,
    n_classes: usize,
    normalization: Option<Normalization>,
}

impl TrainingSet {
    /// Wraps already normalised samples.
    pub fn new(samples: Vec<LabeledSample>, n_classes: usize) -> Result<Self, QknnError> {
        let dim = samples.first().ok_or(QknnError::Empty)?.features.len();
        for (s, sample) in samples.iter().enumerate() {
            if sample.features.len() != dim {
                return Err(QknnError::DimensionMismatch {
                    expected: dim,
                    got: sample.features.len(),
                });
            }
            if sample.label >= n_classes {
                return Err(QknnError::BadLabel {
                    label: sample.label,
                    n_classes,
                });
            }
            check_unit(&sample.features).map_err(|(feature, value)| QknnError::NotNormalized {
                sample: s,
                feature,
                value,
            })?;
        }
        Ok(Self {
            samples,
            n_classes,
            normalization: None,
        })
    }

    /// Fits min-max scaling on raw features and normalises them.
    pub fn fit(raw: Vec<LabeledSample>, n_classes: usize) -> Result<Self, QknnError> {
        let norm = Normalization::fit(raw.iter().map(|s| s.features.as_slice()))
            .ok_or(QknnError::Empty)?;
        let samples = raw
            .into_iter()
            .map(|s| LabeledSample {
                features: norm.apply(&s.features),
                label: s.label,
            })
            .collect();
        let mut set = Self::new(samples, n_classes)?;
        set.normalization = Some(norm);
        Ok(set)
    }

    /// Normalises a raw query with the training scaling (identity when the
    /// set was built from normalised data).
    pub fn normalize_query(&self, raw: &[f64]) -> Vec<f64> {
        match &self.normalization {
            Some(n) => n.apply(raw),
            None => raw.iter().map(|v| v.clamp(0.0, 1.0)).collect(),
        }
    }

    pub fn samples(&self) -> &[LabeledSample] {
        &self.samples
    }

    pub fn features(&self, j: usize) -> &[f64] {
        &self.samples[j].features
    }

    pub fn label(&self, j: usize) -> usize {
        self.samples[j].label
    }

    /// Number of training points `M`.
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Feature dimension `U`.
    pub fn dim(&self) -> usize {
        self.samples[0].features.len()
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn normalization(&self) -> Option<&Normalization> {
        self.normalization.as_ref()
    }

    pub(crate) fn check_query(&self, v0: &[f64]) -> Result<(), QknnError> {
        if v0.len() != self.dim() {
            return Err(QknnError::DimensionMismatch {
                expected: self.dim(),
                got: v0.len(),
            });
        }
        check_unit(v0).map_err(|(feature, value)| QknnError::NotNormalized {
            sample: usize::MAX,
            feature,
            value,
        })
    }
}

pub(crate) fn check_unit(v: &[f64]) -> Result<(), (usize, f64)> {
    match v.iter().position(|x| !(0.0..=1.0).contains(x)) {
        Some(i) => Err((i, v[i])),
        None => Ok(()),
    }
}
