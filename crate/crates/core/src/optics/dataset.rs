use std::io::{Read, Write};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::channel::{
    assign_label, extract_features, modulate, reference_points, transmit_and_detect, ChannelModel,
    Constellation,
};
use super::OpticsError;
use crate::qknn::{LabeledSample, Normalization, TrainingSet};
use crate::rng::{stage_stream, stream};

/// Samples per RNG stream when generating in parallel.
pub const CHUNK_SIZE: usize = 256;

/// One detected pulse.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpticsSample {
    pub x: f64,
    pub p: f64,
    /// Unnormalised distances to the reference points.
    pub distances: Vec<f64>,
    /// Sent symbol, 0-based.
    pub label: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub constellation: Constellation,
    pub channel: ChannelModel,
    pub samples: Vec<OpticsSample>,
}

impl Dataset {
    fn labeled(&self) -> Vec<LabeledSample> {
        self.samples
            .iter()
            .map(|s| LabeledSample {
                features: s.distances.clone(),
                label: s.label,
            })
            .collect()
    }

    /// Training set with min-max scaling fitted on these samples.
    pub fn to_training_set(&self) -> Result<TrainingSet, crate::qknn::QknnError> {
        TrainingSet::fit(self.labeled(), self.constellation.n)
    }

    /// Query vectors scaled with a training set's normalisation.
    pub fn normalized_queries(&self, norm: &Normalization) -> Vec<LabeledSample> {
        self.samples
            .iter()
            .map(|s| LabeledSample {
                features: norm.apply(&s.distances),
                label: s.label,
            })
            .collect()
    }

    /// Fraction of samples whose detected phase sector matches the sent
    /// symbol.
    pub fn sector_accuracy(&self) -> f64 {
        let n = self.constellation.n;
        let hits = self
            .samples
            .iter()
            .filter(|s| assign_label(s.x, s.p, n) == s.label)
            .count();
        hits as f64 / self.samples.len().max(1) as f64
    }
}

fn sample_one<R: Rng + ?Sized>(
    c: &Constellation,
    channel: &ChannelModel,
    refs: &[(f64, f64)],
    rng: &mut R,
) -> OpticsSample {
    let k = rng.random_range(0..c.n);
    let q = transmit_and_detect(modulate(k, c).expect("k < N"), channel, rng);
    OpticsSample {
        x: q.x,
        p: q.p,
        distances: extract_features(&q, refs),
        label: k,
    }
}

/// `n` i.i.d. pulses with uniformly random symbols.
///
/// Chunk `i` of [`CHUNK_SIZE`] samples draws from stream
/// `stage_stream(stage, i)` of `seed`, so the output is the same for any
/// thread count.
pub fn generate_dataset(
    n: usize,
    channel: &ChannelModel,
    constellation: &Constellation,
    seed: u64,
    stage: u16,
) -> Result<Dataset, OpticsError> {
    if n == 0 {
        return Err(OpticsError::Empty);
    }
    channel.validate()?;
    let refs = reference_points(constellation, channel);
    let chunks = n.div_ceil(CHUNK_SIZE);
    let samples = (0..chunks)
        .into_par_iter()
        .flat_map_iter(|i| {
            let mut rng = stream(seed, stage_stream(stage, i as u64));
            let len = CHUNK_SIZE.min(n - i * CHUNK_SIZE);
            let refs = &refs;
            (0..len)
                .map(move |_| sample_one(constellation, channel, refs, &mut rng))
                .collect::<Vec<_>>()
        })
        .collect();
    Ok(Dataset {
        constellation: *constellation,
        channel: *channel,
        samples,
    })
}

/// Writes `x,p,d0..d{N-1},label` rows; labels are written 1-based.
pub fn write_dataset_csv<W: Write>(samples: &[OpticsSample], out: W) -> Result<(), OpticsError> {
    let mut w = csv::Writer::from_writer(out);
    let dim = samples.first().map_or(0, |s| s.distances.len());
    let mut header = vec!["x".to_string(), "p".to_string()];
    header.extend((0..dim).map(|i| format!("d{i}")));
    header.push("label".into());
    w.write_record(&header)
        .map_err(|e| OpticsError::Csv(e.to_string()))?;
    for s in samples {
        let mut row = vec![s.x.to_string(), s.p.to_string()];
        row.extend(s.distances.iter().map(f64::to_string));
        row.push((s.label + 1).to_string());
        w.write_record(&row)
            .map_err(|e| OpticsError::Csv(e.to_string()))?;
    }
    w.flush().map_err(|e| OpticsError::Io(e.to_string()))
}

/// Parses the format of [`write_dataset_csv`].
pub fn read_dataset_csv<R: Read>(input: R) -> Result<Vec<OpticsSample>, OpticsError> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(input);
    let header = r
        .headers()
        .map_err(|e| OpticsError::Csv(e.to_string()))?
        .clone();
    let cols: Vec<&str> = header.iter().collect();
    let dim = cols.len().saturating_sub(3);
    let expected: Vec<String> = ["x".to_string(), "p".to_string()]
        .into_iter()
        .chain((0..dim).map(|i| format!("d{i}")))
        .chain(["label".to_string()])
        .collect();
    if cols.len() < 4 || cols != expected {
        return Err(OpticsError::BadRow {
            line: 1,
            message: format!("expected header {}", expected.join(",")),
        });
    }
    let mut samples = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| OpticsError::BadRow {
            line,
            message: e.to_string(),
        })?;
        let bad = |message: String| OpticsError::BadRow { line, message };
        let num = |j: usize| -> Result<f64, OpticsError> {
            let v: f64 = rec[j]
                .trim()
                .parse()
                .map_err(|_| bad(format!("`{}` is not a number", &rec[j])))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(bad(format!("`{}` is not finite", &rec[j])))
            }
        };
        let label: usize = rec[dim + 2]
            .trim()
            .parse()
            .map_err(|_| bad(format!("label `{}` is not an integer", &rec[dim + 2])))?;
        if label == 0 || label > dim {
            return Err(bad(format!("label {label} is outside 1..={dim}")));
        }
        let distances = (0..dim)
            .map(|j| num(j + 2))
            .collect::<Result<Vec<_>, _>>()?;
        if distances.iter().any(|d| *d < 0.0) {
            return Err(bad("distances must be non-negative".into()));
        }
        samples.push(OpticsSample {
            x: num(0)?,
            p: num(1)?,
            distances,
            label: label - 1,
        });
    }
    Ok(samples)
}

/// JSON metadata written next to a dataset CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSidecar {
    pub constellation: Constellation,
    pub channel: ChannelModel,
    pub n_samples: usize,
    pub seed: u64,
    pub stage: u16,
    pub normalization: Option<Normalization>,
}

impl DatasetSidecar {
    fn check(&self) -> Result<(), OpticsError> {
        Constellation::new(self.constellation.n, self.constellation.v_m)?;
        self.channel.validate()?;
        if let Some(n) = &self.normalization {
            let ok = n.min.len() == self.constellation.n
                && n.max.len() == self.constellation.n
                && n.min
                    .iter()
                    .zip(&n.max)
                    .all(|(a, b)| a.is_finite() && b.is_finite() && a <= b);
            if !ok {
                return Err(OpticsError::Sidecar(
                    "normalisation does not match the constellation".into(),
                ));
            }
        }
        Ok(())
    }
}

pub fn write_sidecar<W: Write>(sidecar: &DatasetSidecar, mut out: W) -> Result<(), OpticsError> {
    let s =
        serde_json::to_string_pretty(sidecar).map_err(|e| OpticsError::Sidecar(e.to_string()))?;
    writeln!(out, "{s}").map_err(|e| OpticsError::Io(e.to_string()))
}

/// Parses and validates a sidecar.
pub fn read_sidecar(text: &str) -> Result<DatasetSidecar, OpticsError> {
    let s: DatasetSidecar =
        serde_json::from_str(text).map_err(|e| OpticsError::Sidecar(e.to_string()))?;
    s.check()?;
    Ok(s)
}
