use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::OpticsError;

/// `N` coherent states `α e^{2πik/N}` with `α = √(V_m/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Constellation {
    pub n: usize,
    /// Modulation variance in shot-noise units.
    pub v_m: f64,
}

impl Constellation {
    pub fn new(n: usize, v_m: f64) -> Result<Self, OpticsError> {
        if n < 2 || !v_m.is_finite() || v_m <= 0.0 {
            return Err(OpticsError::BadConstellation { n, v_m });
        }
        Ok(Self { n, v_m })
    }

    pub fn alpha(&self) -> f64 {
        (self.v_m / 2.0).sqrt()
    }

    pub fn points(&self) -> Vec<Complex64> {
        (0..self.n).map(|k| self.point(k)).collect()
    }

    fn point(&self, k: usize) -> Complex64 {
        Complex64::from_polar(self.alpha(), 2.0 * PI * k as f64 / self.n as f64)
    }
}

/// `α e^{2πik/N}`.
pub fn modulate(k: usize, c: &Constellation) -> Result<Complex64, OpticsError> {
    if k >= c.n {
        return Err(OpticsError::SymbolOutOfRange { k, n: c.n });
    }
    Ok(c.point(k))
}

/// Fibre link followed by a trusted heterodyne detector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelModel {
    pub length_km: f64,
    pub loss_db_per_km: f64,
    /// Excess noise ε referred to the channel input (SNU).
    pub excess_noise: f64,
    /// Detector efficiency η.
    pub efficiency: f64,
    /// Electronic noise v_el (SNU).
    pub electronic_noise: f64,
    pub phase_offset: f64,
    pub phase_jitter_std: f64,
}

impl Default for ChannelModel {
    fn default() -> Self {
        Self {
            length_km: 0.0,
            loss_db_per_km: 0.2,
            excess_noise: 0.01,
            efficiency: 0.6,
            electronic_noise: 0.05,
            phase_offset: 0.0,
            phase_jitter_std: 0.0,
        }
    }
}

impl ChannelModel {
    /// Default parameters at `length_km`.
    pub fn at(length_km: f64) -> Self {
        Self {
            length_km,
            ..Self::default()
        }
    }

    /// Lossless, noiseless link with a perfect detector.
    pub fn ideal() -> Self {
        Self {
            length_km: 0.0,
            loss_db_per_km: 0.0,
            excess_noise: 0.0,
            efficiency: 1.0,
            electronic_noise: 0.0,
            phase_offset: 0.0,
            phase_jitter_std: 0.0,
        }
    }

    /// `T = 10^{−loss·L/10}`.
    pub fn transmittance(&self) -> f64 {
        10f64.powf(-self.loss_db_per_km * self.length_km / 10.0)
    }

    /// Mean quadrature scale `√(ηT)`.
    pub fn amplitude_gain(&self) -> f64 {
        (self.efficiency * self.transmittance()).sqrt()
    }

    /// `(2 + ηTε + 2 v_el)/2`.
    pub fn quadrature_variance(&self) -> f64 {
        (2.0 + self.efficiency * self.transmittance() * self.excess_noise
            + 2.0 * self.electronic_noise)
            / 2.0
    }

    pub fn validate(&self) -> Result<(), OpticsError> {
        let finite = [
            self.length_km,
            self.loss_db_per_km,
            self.excess_noise,
            self.efficiency,
            self.electronic_noise,
            self.phase_offset,
            self.phase_jitter_std,
        ]
        .iter()
        .all(|v| v.is_finite());
        let bad = |m: &str| Err(OpticsError::BadChannel(m.into()));
        if !finite {
            return bad("parameters must be finite");
        }
        if self.length_km < 0.0 || self.loss_db_per_km < 0.0 {
            return bad("length and loss must be non-negative");
        }
        if self.transmittance().is_nan() || self.transmittance() <= 0.0 {
            return bad("transmittance underflows to 0");
        }
        if self.excess_noise < 0.0 || self.electronic_noise < 0.0 || self.phase_jitter_std < 0.0 {
            return bad("noise terms must be non-negative");
        }
        if !(self.efficiency > 0.0 && self.efficiency <= 1.0) {
            return bad("efficiency must lie in (0, 1]");
        }
        Ok(())
    }
}

/// Heterodyne outcome `(x', p')` in shot-noise units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSample {
    pub x: f64,
    pub p: f64,
}

/// Sends `amplitude` through `channel` and samples the heterodyne outcome.
pub fn transmit_and_detect<R: Rng + ?Sized>(
    amplitude: Complex64,
    channel: &ChannelModel,
    rng: &mut R,
) -> QuadratureSample {
    let mut phase = channel.phase_offset;
    if channel.phase_jitter_std > 0.0 {
        phase += Normal::new(0.0, channel.phase_jitter_std)
            .expect("finite σ")
            .sample(rng);
    }
    let mean = 2.0 * channel.amplitude_gain() * amplitude * Complex64::from_polar(1.0, phase);
    let noise = Normal::new(0.0, channel.quadrature_variance().sqrt()).expect("finite σ");
    QuadratureSample {
        x: mean.re + noise.sample(rng),
        p: mean.im + noise.sample(rng),
    }
}

/// Sector of the phase of `(x, p)`, 0-based, sectors of width `2π/N`
/// centred on the constellation points. A point on a boundary goes to the
/// lower index, so the boundary below sector 0 belongs to sector 0; the
/// origin is sector 0.
pub fn assign_label(x: f64, p: f64, n: usize) -> usize {
    if x == 0.0 && p == 0.0 {
        return 0;
    }
    let s = p.atan2(x) / (2.0 * PI / n as f64);
    if s == -0.5 {
        return 0;
    }
    let k = (s - 0.5).ceil() as i64;
    k.rem_euclid(n as i64) as usize
}

/// Noiseless detected means `√(ηT)(2 Re α_i, 2 Im α_i)`.
pub fn reference_points(c: &Constellation, channel: &ChannelModel) -> Vec<(f64, f64)> {
    let g = 2.0 * channel.amplitude_gain();
    c.points().iter().map(|a| (g * a.re, g * a.im)).collect()
}

/// Distances from the sample to each reference point.
pub fn extract_features(sample: &QuadratureSample, references: &[(f64, f64)]) -> Vec<f64> {
    references
        .iter()
        .map(|&(rx, ry)| (sample.x - rx).hypot(sample.p - ry))
        .collect()
}
