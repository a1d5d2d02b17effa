//! One-parameter sweeps over a base configuration.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};
use crate::output::{num, sha256_hex, OutputDir, RunManifest, StageTiming, Table};
use crate::pipeline::run;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    LossDb,
    Vm,
    K,
    M,
    Delta,
}

impl FromStr for SweepParam {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "loss_db" | "loss" => Ok(SweepParam::LossDb),
            "v_m" | "vm" => Ok(SweepParam::Vm),
            "k" => Ok(SweepParam::K),
            "m" => Ok(SweepParam::M),
            "delta" => Ok(SweepParam::Delta),
            _ => Err(CliError::Config(format!(
                "`{s}` is not sweepable (expected loss_db, v_m, k, m or delta)"
            ))),
        }
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepParam::LossDb => "loss_db",
            SweepParam::Vm => "v_m",
            SweepParam::K => "k",
            SweepParam::M => "m",
            SweepParam::Delta => "delta",
        })
    }
}

fn whole(param: SweepParam, v: f64) -> Result<usize> {
    if v >= 1.0 && v.fract() == 0.0 && v < u32::MAX as f64 {
        Ok(v as usize)
    } else {
        Err(CliError::Config(format!(
            "{param} = {v} must be a positive integer"
        )))
    }
}

/// Copy of `base` with `param` set to `value` in every stage it affects.
pub fn apply(base: &ExperimentConfig, param: SweepParam, value: f64) -> Result<ExperimentConfig> {
    let mut cfg = base.clone();
    let mut touched = false;
    match param {
        SweepParam::LossDb => {
            if let Some(kr) = &mut cfg.keyrate {
                kr.losses_db = vec![value];
                touched = true;
            }
            if let Some(cl) = &mut cfg.classification {
                if cfg.channel.loss_db_per_km > 0.0 {
                    cl.distances_km = vec![value / cfg.channel.loss_db_per_km];
                    touched = true;
                }
            }
        }
        SweepParam::Vm => {
            cfg.constellation.v_m = value;
            touched = cfg.classification.is_some();
            if let Some(kr) = &mut cfg.keyrate {
                kr.curves.iter_mut().for_each(|c| c.v_m = value);
                touched = true;
            }
        }
        SweepParam::K => {
            let k = whole(param, value)?;
            if let Some(cl) = &mut cfg.classification {
                cl.k = vec![k];
                touched = true;
            }
            if let Some(cx) = &mut cfg.complexity {
                cx.k = k;
                touched = true;
            }
        }
        SweepParam::M => {
            let m = whole(param, value)?;
            if let Some(cl) = &mut cfg.classification {
                cl.train_size = m;
                touched = true;
            }
            if let Some(cx) = &mut cfg.complexity {
                cx.m = m;
                touched = true;
            }
        }
        SweepParam::Delta => {
            if let Some(cl) = &mut cfg.classification {
                cl.delta = value;
                touched = true;
            }
            if let Some(cx) = &mut cfg.complexity {
                cx.delta = value;
                touched = true;
            }
        }
    }
    if !touched {
        return Err(CliError::Config(format!(
            "{param} does not affect any configured stage"
        )));
    }
    Ok(cfg)
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    /// Merged tables by name, each row prefixed with the swept value.
    pub tables: BTreeMap<String, Table>,
    pub manifest: RunManifest,
}

/// Runs one full pipeline per value into `point_NNNN/` and merges the
/// tables into `sweep_<table>.csv`, ordered by point index.
pub fn sweep(
    base: &ExperimentConfig,
    param: SweepParam,
    values: &[f64],
    out_root: &Path,
) -> Result<SweepResult> {
    if values.is_empty() {
        return Err(CliError::Config("sweep range is empty".into()));
    }
    let configs = values
        .iter()
        .map(|&v| apply(base, param, v))
        .collect::<Result<Vec<_>>>()?;
    let mut out = OutputDir::create(out_root)?;
    let mut merged: BTreeMap<String, Table> = BTreeMap::new();
    let mut stages = Vec::new();
    for (i, (cfg, &v)) in configs.iter().zip(values).enumerate() {
        let t = Instant::now();
        let point = run(cfg, &out_root.join(format!("point_{i:04}")))?;
        stages.push(StageTiming {
            stage: format!("point_{i:04}"),
            seconds: t.elapsed().as_secs_f64(),
        });
        for (name, table) in point.tables {
            let m = merged.entry(name).or_insert_with(|| {
                let mut h = vec!["param".to_string(), "value".to_string()];
                h.extend(table.header.iter().cloned());
                Table {
                    header: h,
                    rows: Vec::new(),
                }
            });
            for row in table.rows {
                let mut r = vec![param.to_string(), num(v)];
                r.extend(row);
                m.rows.push(r);
            }
        }
    }
    for (name, table) in &merged {
        out.write_table(&format!("sweep_{name}.csv"), table)?;
    }
    let base_text = base.to_toml();
    out.write("base_config.toml", base_text.as_bytes())?;
    let manifest = out.finish(RunManifest {
        tool: "cvqkd".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: format!("sweep {param}"),
        config_sha256: sha256_hex(base_text.as_bytes()),
        seed: base.seed,
        stages,
        outputs: Vec::new(),
    })?;
    Ok(SweepResult {
        tables: merged,
        manifest,
    })
}
