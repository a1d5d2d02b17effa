//! The `run` pipeline: datasets, predictions, metrics, key rates and cost
//! tables for one configuration.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use cvqkd_core::metrics::{
    complexity_quantum, confusion, precision_per_class, roc_macro, ConfusionMatrix, Precision,
    RocCurve,
};
use cvqkd_core::optics::{
    generate_dataset, write_dataset_csv, write_sidecar, Dataset, DatasetSidecar,
};
use cvqkd_core::qknn::{
    compute_similarity_table, register_size, vote_on_table, GateCache, Mode, Normalization,
    QknnConfig,
};
use cvqkd_core::rng::{stage_stream, stream};
use cvqkd_core::secrate::{key_rate, KeyRateInputs, Scheme};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ClassificationConfig, ExperimentConfig, LambdaSource};
use crate::error::{CliError, Result};
use crate::output::{num, OutputDir, PlotSpec, RunManifest, StageTiming, Table};
use crate::validate::{validate, FindingKind};

pub const TRAIN_STAGE: u16 = 1;
pub const TEST_STAGE: u16 = 2;
pub const QUERY_STAGE: u16 = 3;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the datasets and queries at one distance. It depends only on
/// the experiment seed and the distance, so a distance gives the same data
/// wherever it appears in a list or sweep.
pub fn distance_seed(seed: u64, distance_km: f64) -> u64 {
    splitmix64(seed ^ splitmix64((distance_km + 0.0).to_bits()))
}

/// Scores for one `k` at one distance.
#[derive(Debug, Clone)]
pub struct KResult {
    pub k: usize,
    pub predicted: Vec<usize>,
    pub scores: Vec<Vec<f64>>,
    pub oracle_calls: Vec<u64>,
    pub confusion: ConfusionMatrix,
    pub precision: Precision,
    pub roc: RocCurve,
}

impl KResult {
    pub fn mean_oracle_calls(&self) -> f64 {
        self.oracle_calls.iter().sum::<u64>() as f64 / self.oracle_calls.len().max(1) as f64
    }
}

#[derive(Debug, Clone)]
pub struct DistanceResult {
    pub distance_km: f64,
    pub seed: u64,
    pub train: Dataset,
    pub test: Dataset,
    pub normalization: Normalization,
    pub truth: Vec<usize>,
    pub per_k: Vec<KResult>,
}

/// Generates the training and test sets at `distance_km` and classifies
/// every test sample for each `k`. One similarity table per query is shared
/// by all `k`; query `q` with neighbourhood size `k` draws from its own
/// random stream.
pub fn classify_at(
    cfg: &ExperimentConfig,
    cl: &ClassificationConfig,
    distance_km: f64,
    ks: &[usize],
) -> Result<DistanceResult> {
    let c = cfg.constellation()?;
    let channel = cfg.channel.at(distance_km);
    let seed = distance_seed(cfg.seed, distance_km);
    let train = generate_dataset(cl.train_size, &channel, &c, seed, TRAIN_STAGE)?;
    let test = generate_dataset(cl.test_size, &channel, &c, seed, TEST_STAGE)?;
    let ts = train.to_training_set()?;
    let normalization = ts.normalization().cloned().expect("fitted training set");
    let queries = test.normalized_queries(&normalization);
    let r = register_size(cl.delta).ok_or_else(|| {
        CliError::Config(format!(
            "classification.delta = {} is outside (0, 1)",
            cl.delta
        ))
    })?;
    let qcfg = QknnConfig {
        mode: cfg.mode,
        r,
        schedule: cl.schedule,
    };
    let cache = match cfg.mode {
        Mode::Gate => Some(GateCache::new(&ts)?),
        Mode::Analytic => None,
    };

    type Vote = (usize, Vec<f64>, u64);
    let votes: Vec<Vec<Vote>> = queries
        .par_iter()
        .enumerate()
        .map(|(q, s)| {
            let table = compute_similarity_table(&ts, &s.features, r, cfg.mode, cache.as_ref())?;
            ks.iter()
                .map(|&k| {
                    let mut rng =
                        stream(seed, stage_stream(QUERY_STAGE, (k as u64) << 32 | q as u64));
                    let v = vote_on_table(&ts, &table, k, &qcfg, &mut rng)?;
                    Ok((v.label, v.scores, v.report.oracle_calls))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let truth: Vec<usize> = queries.iter().map(|s| s.label).collect();
    let per_k = ks
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            let predicted: Vec<usize> = votes.iter().map(|v| v[i].0).collect();
            let scores: Vec<Vec<f64>> = votes.iter().map(|v| v[i].1.clone()).collect();
            let oracle_calls = votes.iter().map(|v| v[i].2).collect();
            let cm = confusion(&predicted, &truth, c.n)?;
            Ok(KResult {
                k,
                precision: precision_per_class(&cm),
                roc: roc_macro(&scores, &truth)?,
                confusion: cm,
                predicted,
                scores,
                oracle_calls,
            })
        })
        .collect::<Result<_>>()?;
    Ok(DistanceResult {
        distance_km,
        seed,
        train,
        test,
        normalization,
        truth,
        per_k,
    })
}

#[derive(Debug, Clone, Serialize)]
struct MetricsSummary {
    distance_km: f64,
    k: usize,
    precision_average: f64,
    precision_per_class: Vec<f64>,
    auc: f64,
    mean_oracle_calls: f64,
    sector_accuracy: f64,
    confusion: Vec<Vec<u64>>,
}

/// Everything a run produced, in memory.
#[derive(Debug, Clone)]
pub struct RunResult {
    /// Main tables by name (`metrics`, `roc`, `keyrate`, `complexity`).
    pub tables: BTreeMap<String, Table>,
    pub manifest: RunManifest,
}

/// Turns validation findings into the matching error.
pub fn check(cfg: &ExperimentConfig) -> Result<()> {
    let findings = validate(cfg);
    if let Some(f) = findings.iter().find(|f| f.kind == FindingKind::Budget) {
        return Err(CliError::Resource(f.to_string()));
    }
    if !findings.is_empty() {
        let list: Vec<String> = findings.iter().map(|f| f.to_string()).collect();
        return Err(CliError::Config(list.join("; ")));
    }
    Ok(())
}

fn dataset_files(
    out: &mut OutputDir,
    prefix: &str,
    data: &Dataset,
    seed: u64,
    stage: u16,
    normalization: &Normalization,
) -> Result<()> {
    let mut csv = Vec::new();
    write_dataset_csv(&data.samples, &mut csv)?;
    out.write(&format!("{prefix}.csv"), &csv)?;
    let sidecar = DatasetSidecar {
        constellation: data.constellation,
        channel: data.channel,
        n_samples: data.samples.len(),
        seed,
        stage,
        normalization: Some(normalization.clone()),
    };
    let mut json = Vec::new();
    write_sidecar(&sidecar, &mut json)?;
    out.write(&format!("{prefix}.json"), &json)
}

fn timed<T>(stages: &mut Vec<StageTiming>, name: &str, f: impl FnOnce() -> Result<T>) -> Result<T> {
    let t = Instant::now();
    let v = f()?;
    stages.push(StageTiming {
        stage: name.into(),
        seconds: t.elapsed().as_secs_f64(),
    });
    Ok(v)
}

/// Runs every configured stage and writes its artifacts under `out_root`.
pub fn run(cfg: &ExperimentConfig, out_root: &Path) -> Result<RunResult> {
    check(cfg)?;
    let mut out = OutputDir::create(out_root)?;
    let config_text = cfg.to_toml();
    out.write("config.toml", config_text.as_bytes())?;
    let mut stages = Vec::new();
    let mut tables = BTreeMap::new();
    // (distance bits, k) -> AUC, shared with the measured Λ_Q of the key rate
    let mut auc_cache: BTreeMap<(u64, usize), f64> = BTreeMap::new();

    if let Some(cl) = &cfg.classification {
        let results = timed(&mut stages, "classification", || {
            cl.distances_km
                .iter()
                .map(|&d| classify_at(cfg, cl, d, &cl.k))
                .collect::<Result<Vec<_>>>()
        })?;
        let n = cfg.constellation.n;
        let mut metrics = Table::new(&[
            "distance_km",
            "k",
            "precision",
            "auc",
            "mean_oracle_calls",
            "sector_accuracy",
        ]);
        let mut roc = Table::new(&["distance_km", "k", "fpr", "tpr"]);
        let mut header = vec![
            "distance_km",
            "k",
            "query",
            "truth",
            "predicted",
            "oracle_calls",
        ];
        let score_cols: Vec<String> = (1..=n).map(|c| format!("score_{c}")).collect();
        header.extend(score_cols.iter().map(String::as_str));
        let mut predictions = Table::new(&header);
        let mut summary = Vec::new();
        for d in &results {
            let sector = d.test.sector_accuracy();
            for kr in &d.per_k {
                auc_cache.insert((d.distance_km.to_bits(), kr.k), kr.roc.auc);
                metrics.push(vec![
                    num(d.distance_km),
                    kr.k.to_string(),
                    num(kr.precision.average),
                    num(kr.roc.auc),
                    num(kr.mean_oracle_calls()),
                    num(sector),
                ]);
                for &(x, y) in &kr.roc.points {
                    roc.push(vec![num(d.distance_km), kr.k.to_string(), num(x), num(y)]);
                }
                if cl.write_predictions {
                    for q in 0..d.truth.len() {
                        let mut row = vec![
                            num(d.distance_km),
                            kr.k.to_string(),
                            q.to_string(),
                            (d.truth[q] + 1).to_string(),
                            (kr.predicted[q] + 1).to_string(),
                            kr.oracle_calls[q].to_string(),
                        ];
                        row.extend(kr.scores[q].iter().map(|&s| num(s)));
                        predictions.push(row);
                    }
                }
                summary.push(MetricsSummary {
                    distance_km: d.distance_km,
                    k: kr.k,
                    precision_average: kr.precision.average,
                    precision_per_class: kr.precision.per_class.clone(),
                    auc: kr.roc.auc,
                    mean_oracle_calls: kr.mean_oracle_calls(),
                    sector_accuracy: sector,
                    confusion: kr.confusion.rows().map(<[u64]>::to_vec).collect(),
                });
            }
            if cl.write_datasets {
                let tag = format!("datasets/{}km", num(d.distance_km));
                dataset_files(
                    &mut out,
                    &format!("{tag}_train"),
                    &d.train,
                    d.seed,
                    TRAIN_STAGE,
                    &d.normalization,
                )?;
                dataset_files(
                    &mut out,
                    &format!("{tag}_test"),
                    &d.test,
                    d.seed,
                    TEST_STAGE,
                    &d.normalization,
                )?;
            }
        }
        out.write_table("metrics.csv", &metrics)?;
        out.write_json("metrics.json", &summary)?;
        out.write_table("roc.csv", &roc)?;
        if cl.write_predictions {
            out.write_table("predictions.csv", &predictions)?;
        }
        out.write_plot(&PlotSpec {
            data: "metrics.csv".into(),
            kind: "line".into(),
            title: "Average precision against k".into(),
            x: "k".into(),
            y: "precision".into(),
            series: vec!["distance_km".into()],
            facet: None,
        })?;
        out.write_plot(&PlotSpec {
            data: "roc.csv".into(),
            kind: "line".into(),
            title: "Macro-averaged ROC".into(),
            x: "fpr".into(),
            y: "tpr".into(),
            series: vec!["distance_km".into()],
            facet: Some("k".into()),
        })?;
        tables.insert("metrics".to_string(), metrics);
        tables.insert("roc".to_string(), roc);
    }

    if let Some(kr) = &cfg.keyrate {
        let table = timed(&mut stages, "keyrate", || {
            keyrate_table(cfg, kr, &mut auc_cache)
        })?;
        out.write_table("keyrate.csv", &table)?;
        out.write_plot(&PlotSpec {
            data: "keyrate.csv".into(),
            kind: "line".into(),
            title: "Secret key rate against channel loss".into(),
            x: "loss_db".into(),
            y: "key_rate".into(),
            series: vec!["scheme".into(), "n".into(), "v_m".into()],
            facet: None,
        })?;
        tables.insert("keyrate".to_string(), table);
    }

    if let Some(cx) = &cfg.complexity {
        let table = timed(&mut stages, "complexity", || {
            let mut t = Table::new(&["panel", "u", "m", "k", "delta", "r", "classical", "quantum"]);
            let mut points = vec![("point", cx.u, cx.m, cx.k)];
            points.extend(cx.u_values.iter().map(|&u| ("u", u, cx.m, cx.k)));
            points.extend(cx.m_values.iter().map(|&m| ("m", cx.u, m, cx.k)));
            points.extend(cx.k_values.iter().map(|&k| ("k", cx.u, cx.m, k)));
            for (panel, u, m, k) in points {
                let r = complexity_quantum(u, m, k, cx.delta)?;
                t.push(vec![
                    panel.into(),
                    u.to_string(),
                    m.to_string(),
                    k.to_string(),
                    num(cx.delta),
                    r.r.to_string(),
                    num(r.classical_total),
                    num(r.quantum_total),
                ]);
            }
            Ok(t)
        })?;
        out.write_table("complexity.csv", &table)?;
        out.write_plot(&PlotSpec {
            data: "complexity.csv".into(),
            kind: "bar".into(),
            title: "Classical and quantum cost".into(),
            x: "panel".into(),
            y: "classical,quantum".into(),
            series: vec![],
            facet: Some("panel".into()),
        })?;
        tables.insert("complexity".to_string(), table);
    }

    let manifest = out.finish(RunManifest {
        tool: "cvqkd".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: "run".into(),
        config_sha256: crate::output::sha256_hex(config_text.as_bytes()),
        seed: cfg.seed,
        stages,
        outputs: Vec::new(),
    })?;
    Ok(RunResult { tables, manifest })
}

fn keyrate_table(
    cfg: &ExperimentConfig,
    kr: &crate::config::KeyRateConfig,
    auc_cache: &mut BTreeMap<(u64, usize), f64>,
) -> Result<Table> {
    let needs_lambda = kr.curves.iter().any(|c| c.scheme == Scheme::Qknn);
    let lambdas: Vec<f64> = match kr.lambda_q {
        LambdaSource::Fixed { value } => vec![value; kr.losses_db.len()],
        LambdaSource::Measured { .. } if !needs_lambda => vec![f64::NAN; kr.losses_db.len()],
        LambdaSource::Measured { k } => {
            let cl = cfg.classification.as_ref().expect("checked by validate");
            let k = k.unwrap_or(cl.k[0]);
            kr.losses_db
                .iter()
                .map(|&loss| {
                    let d = loss / cfg.channel.loss_db_per_km;
                    if let Some(&auc) = auc_cache.get(&(d.to_bits(), k)) {
                        return Ok(auc);
                    }
                    let auc = classify_at(cfg, cl, d, &[k])?.per_k[0].roc.auc;
                    auc_cache.insert((d.to_bits(), k), auc);
                    Ok(auc)
                })
                .collect::<Result<_>>()?
        }
    };
    let xi = kr.excess_noise_convention.xi(cfg.channel.excess_noise);
    let jobs: Vec<(usize, usize)> = (0..kr.losses_db.len())
        .flat_map(|l| (0..kr.curves.len()).map(move |c| (l, c)))
        .collect();
    let rows = jobs
        .par_iter()
        .map(|&(l, c)| {
            let curve = kr.curves[c];
            let loss = kr.losses_db[l];
            let lambda = lambdas[l];
            let inputs = KeyRateInputs {
                v_m: curve.v_m,
                transmittance: 1.0,
                xi,
                efficiency: cfg.channel.efficiency,
                electronic_noise: cfg.channel.electronic_noise,
                beta: kr.beta,
                n: curve.n,
                lambda_q: if curve.scheme == Scheme::Qknn {
                    lambda
                } else {
                    1.0
                },
                fock_cutoff: kr.fock_cutoff,
            }
            .at_loss_db(loss);
            let r = key_rate(&inputs, curve.scheme)?;
            Ok(vec![
                num(loss),
                curve.scheme.to_string(),
                curve.n.to_string(),
                num(curve.v_m),
                if curve.scheme == Scheme::Qknn {
                    num(lambda)
                } else {
                    String::new()
                },
                num(r.i_ab),
                num(r.chi_be),
                num(r.chi_be / curve.n as f64),
                num(r.k),
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    let mut t = Table::new(&[
        "loss_db",
        "scheme",
        "n",
        "v_m",
        "lambda_q",
        "i_ab",
        "chi_be",
        "chi_be_per_symbol",
        "key_rate",
    ]);
    rows.into_iter().for_each(|r| t.push(r));
    Ok(t)
}
