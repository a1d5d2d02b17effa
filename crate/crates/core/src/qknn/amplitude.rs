use std::f64::consts::PI;

use num_complex::Complex64;

use super::encoding::index_width;
use super::QknnError;
use crate::qsim::{Gate2, Span, StateVector};

/// Outcome of one amplitude-estimation circuit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeEstimate {
    /// Most probable value of the counting register, in `0..R`.
    pub sigma: usize,
    /// `sin²(π σ / R)`.
    pub estimate: f64,
    /// Born probability of `sigma`.
    pub probability: f64,
}

/// Smallest counting-register size with error at most `delta`:
/// `R = ⌈π(π+1)/δ⌉`.
pub fn register_size(delta: f64) -> Option<usize> {
    (delta > 0.0 && delta < 1.0).then(|| (PI * (PI + 1.0) / delta).ceil() as usize)
}

/// `Q = −A S_0 A† S_χ` for the one-qubit preparation
/// `A|0⟩ = √(1−a)|0⟩ + √a|1⟩` whose good state is `|1⟩`.
pub(crate) fn grover_operator(a: f64) -> Gate2 {
    let prep = Gate2::ry(2.0 * a.sqrt().asin());
    let s0 = Gate2::real([[-1.0, 0.0], [0.0, 1.0]]);
    let s_chi = Gate2::real([[1.0, 0.0], [0.0, -1.0]]);
    prep.mul(&s0)
        .mul(&prep.adjoint())
        .mul(&s_chi)
        .scale(Complex64::new(-1.0, 0.0))
}

/// Phase estimation of `Q` with a counting register of dimension `R`.
///
/// The register spans `⌈log2 R⌉` qubits with only the values `0..R`
/// populated; after the controlled powers `Q^{2^b}` the inverse Fourier
/// transform over `Z_R` is applied (the gate-level transform when `R` is a
/// power of two). The returned `σ` is the most probable outcome, lowest
/// value first on ties, so the result is deterministic and within
/// `π/R + π²/R²` of `a`.
pub fn amplitude_estimate(a: f64, r: usize) -> Result<AmplitudeEstimate, QknnError> {
    if !(0.0..=1.0).contains(&a) {
        return Err(QknnError::BadAmplitude(a));
    }
    if r < 2 {
        return Err(QknnError::BadRegister(r));
    }
    let width = index_width(r - 1);
    let counting = Span::new(1, width);
    let mut s = StateVector::new(1 + width)?;
    s.apply_ry(0, 2.0 * a.sqrt().asin())?;
    let power_of_two = r == 1 << width;
    if power_of_two {
        s.apply_hadamard_all(counting)?;
    } else {
        let amp = Complex64::new(1.0 / (r as f64).sqrt(), 0.0);
        let target: Vec<Complex64> = (0..1usize << width)
            .map(|v| if v < r { amp } else { Complex64::new(0.0, 0.0) })
            .collect();
        s.apply_state_preparation(counting, &target)?;
    }
    let q = grover_operator(a);
    for b in 0..width {
        s.apply_controlled(&[(counting.qubit(b), true)], 0, &q.pow(1 << b))?;
    }
    if power_of_two {
        s.apply_iqft(counting)?;
    } else {
        s.apply_dft_mod(counting, r, true)?;
    }
    let probs = s.born_probabilities(counting)?;
    let (sigma, probability) =
        probs[..r]
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (v, p)| {
                if p > best.1 + 1e-13 {
                    (v, p)
                } else {
                    best
                }
            });
    let estimate = (PI * sigma as f64 / r as f64).sin().powi(2);
    Ok(AmplitudeEstimate {
        sigma,
        estimate,
        probability,
    })
}
