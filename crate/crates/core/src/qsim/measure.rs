use rand::Rng;

use super::{QsimError, Span, StateVector};

/// Result of a projective measurement of one register.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementOutcome {
    /// Integer read from the measured span.
    pub bits: usize,
    /// Born probability of `bits` before the collapse.
    pub probability: f64,
}

impl StateVector {
    /// Samples `span` with Born probabilities, collapses the state onto the
    /// outcome and renormalises it. This is the only place the simulator
    /// renormalises.
    pub fn measure<R: Rng + ?Sized>(
        &mut self,
        span: Span,
        rng: &mut R,
    ) -> Result<MeasurementOutcome, QsimError> {
        let probs = self.born_probabilities(span)?;
        let total: f64 = probs.iter().sum();
        if !total.is_finite() || total <= 1e-300 {
            return Err(QsimError::Degenerate);
        }
        let u: f64 = rng.random::<f64>() * total;
        let mut acc = 0.0;
        let mut bits = probs.len() - 1;
        for (v, p) in probs.iter().enumerate() {
            acc += p;
            if u < acc && *p > 0.0 {
                bits = v;
                break;
            }
        }
        // guard against landing on a zero-probability tail value through rounding
        while probs[bits] == 0.0 {
            bits -= 1;
        }
        let probability = probs[bits] / total;
        let scale = probs[bits].sqrt();
        for (i, a) in self.amps_mut().iter_mut().enumerate() {
            if span.extract(i) == bits {
                *a /= scale;
            } else {
                *a = num_complex::Complex64::new(0.0, 0.0);
            }
        }
        Ok(MeasurementOutcome { bits, probability })
    }
}
