use num_complex::Complex64;
use std::f64::consts::TAU;

use super::{QsimError, Span, StateVector};

impl StateVector {
    /// `|x⟩ → 2^{-w/2} Σ_y e^{+2πixy/2^w} |y⟩` on `span`, as Hadamards,
    /// controlled phases and a final bit reversal.
    pub fn apply_qft(&mut self, span: Span) -> Result<(), QsimError> {
        self.check_span(span)?;
        let w = span.width;
        for a in (0..w).rev() {
            self.apply_hadamard(span.qubit(a))?;
            for b in (0..a).rev() {
                let phi = TAU / (1u64 << (a - b + 1)) as f64;
                self.apply_cphase(span.qubit(b), span.qubit(a), phi)?;
            }
        }
        for p in 0..w / 2 {
            self.apply_swap(span.qubit(p), span.qubit(w - 1 - p))?;
        }
        Ok(())
    }

    /// Inverse transform `|x⟩ → 2^{-w/2} Σ_y e^{−2πixy/2^w} |y⟩`; the exact
    /// adjoint of [`apply_qft`](Self::apply_qft).
    pub fn apply_iqft(&mut self, span: Span) -> Result<(), QsimError> {
        self.check_span(span)?;
        let w = span.width;
        for p in 0..w / 2 {
            self.apply_swap(span.qubit(p), span.qubit(w - 1 - p))?;
        }
        for a in 0..w {
            for b in 0..a {
                let phi = -TAU / (1u64 << (a - b + 1)) as f64;
                self.apply_cphase(span.qubit(b), span.qubit(a), phi)?;
            }
            self.apply_hadamard(span.qubit(a))?;
        }
        Ok(())
    }

    /// Discrete Fourier transform over `Z_modulus` acting on the first
    /// `modulus` basis values of `span` (identity on the rest). With
    /// `inverse` the kernel is `e^{−2πixy/modulus}`. For
    /// `modulus = 2^width` this equals [`apply_qft`](Self::apply_qft) /
    /// [`apply_iqft`](Self::apply_iqft).
    pub fn apply_dft_mod(
        &mut self,
        span: Span,
        modulus: usize,
        inverse: bool,
    ) -> Result<(), QsimError> {
        self.check_span(span)?;
        if modulus == 0 || modulus > 1 << span.width {
            return Err(QsimError::BadModulus {
                modulus,
                width: span.width,
            });
        }
        let sign = if inverse { -1.0 } else { 1.0 };
        let scale = 1.0 / (modulus as f64).sqrt();
        // twiddle table indexed by (x·y) mod modulus
        let twiddle: Vec<Complex64> = (0..modulus)
            .map(|k| Complex64::from_polar(scale, sign * TAU * k as f64 / modulus as f64))
            .collect();
        let mut out = vec![Complex64::new(0.0, 0.0); modulus];
        self.apply_on_span(span, |block| {
            for (y, o) in out.iter_mut().enumerate() {
                *o = (0..modulus)
                    .map(|x| twiddle[(x * y) % modulus] * block[x])
                    .sum();
            }
            block[..modulus].copy_from_slice(&out);
        })
    }
}
