//! Experiment configuration file (TOML).
//!
//! ```toml
//! seed = 7
//! mode = "analytic"
//! output_dir = "out/fig9"
//!
//! [constellation]
//! n = 8
//! v_m = 29.0
//!
//! [channel]
//! loss_db_per_km = 0.2
//! excess_noise = 0.01
//! efficiency = 0.6
//! electronic_noise = 0.05
//!
//! [classification]
//! train_size = 4000
//! test_size = 2000
//! k = [15]
//! distances_km = [5, 10, 15]
//! delta = 0.1
//!
//! [keyrate]
//! beta = 0.98
//! losses_db = [0, 5, 10]
//! lambda_q = { source = "fixed", value = 0.9 }
//! curves = [{ scheme = "qknn", n = 8, v_m = 0.38 }]
//!
//! [complexity]
//! u = 8
//! m = 128
//! k = 15
//! delta = 0.1
//! ```
//!
//! Every section except `constellation` has defaults or is optional; a
//! missing section skips its stage. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use cvqkd_core::optics::{ChannelModel, Constellation};
use cvqkd_core::qknn::{Mode, Schedule};
use cvqkd_core::secrate::{ExcessNoiseConvention, Scheme};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    #[serde(default = "default_mode")]
    pub mode: Mode,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    pub constellation: Constellation,
    #[serde(default)]
    pub channel: ChannelConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classification: Option<ClassificationConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub keyrate: Option<KeyRateConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complexity: Option<ComplexityConfig>,
}

fn default_mode() -> Mode {
    Mode::Analytic
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_delta() -> f64 {
    0.1
}

fn default_true() -> bool {
    true
}

/// Fibre and detector parameters shared by the dataset and key-rate stages.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChannelConfig {
    pub loss_db_per_km: f64,
    pub excess_noise: f64,
    pub efficiency: f64,
    pub electronic_noise: f64,
    pub phase_offset: f64,
    pub phase_jitter_std: f64,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        let c = ChannelModel::default();
        Self {
            loss_db_per_km: c.loss_db_per_km,
            excess_noise: c.excess_noise,
            efficiency: c.efficiency,
            electronic_noise: c.electronic_noise,
            phase_offset: c.phase_offset,
            phase_jitter_std: c.phase_jitter_std,
        }
    }
}

impl ChannelConfig {
    pub fn at(&self, length_km: f64) -> ChannelModel {
        ChannelModel {
            length_km,
            loss_db_per_km: self.loss_db_per_km,
            excess_noise: self.excess_noise,
            efficiency: self.efficiency,
            electronic_noise: self.electronic_noise,
            phase_offset: self.phase_offset,
            phase_jitter_std: self.phase_jitter_std,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassificationConfig {
    /// Training-set size `M`.
    pub train_size: usize,
    /// Test-set size `Q`.
    pub test_size: usize,
    pub k: Vec<usize>,
    pub distances_km: Vec<f64>,
    /// Amplitude-estimation error; sets `R`.
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default)]
    pub schedule: Schedule,
    #[serde(default = "default_true")]
    pub write_datasets: bool,
    #[serde(default = "default_true")]
    pub write_predictions: bool,
}

/// Where the classifier AUC `Λ_Q` of the key-rate formula comes from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum LambdaSource {
    Fixed {
        value: f64,
    },
    /// Macro AUC of the classification stage at distance
    /// `loss / loss_db_per_km`, using `k` (first configured `k` if unset).
    Measured {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        k: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveConfig {
    pub scheme: Scheme,
    pub n: usize,
    pub v_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KeyRateConfig {
    pub beta: f64,
    pub losses_db: Vec<f64>,
    pub lambda_q: LambdaSource,
    pub curves: Vec<CurveConfig>,
    #[serde(default)]
    pub excess_noise_convention: ExcessNoiseConvention,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fock_cutoff: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexityConfig {
    pub u: usize,
    pub m: usize,
    pub k: usize,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default)]
    pub u_values: Vec<usize>,
    #[serde(default)]
    pub m_values: Vec<usize>,
    #[serde(default)]
    pub k_values: Vec<usize>,
}

impl ExperimentConfig {
    /// Parses TOML text; schema errors name the offending key.
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string().trim_end().to_owned()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    pub fn constellation(&self) -> Result<Constellation> {
        Ok(Constellation::new(
            self.constellation.n,
            self.constellation.v_m,
        )?)
    }
}
