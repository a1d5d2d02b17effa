use num_complex::Complex64;

use super::{QsimError, Span};

/// Largest register a [`StateVector`] may allocate unless a caller asks for more.
pub const DEFAULT_QUBIT_CAP: usize = 24;

/// Tolerance on `|‖ψ‖² − 1|` accepted when importing amplitudes.
pub const NORM_TOLERANCE: f64 = 1e-10;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Dense state vector over `n_qubits` qubits.
///
/// Qubit ordering is little-endian: qubit `q` is bit `q` of the basis
/// index, so a register spanning qubits `offset..offset + width` holds the
/// integer `(index >> offset) & (2^width - 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩` on `n_qubits` qubits, bounded by [`DEFAULT_QUBIT_CAP`].
    pub fn new(n_qubits: usize) -> Result<Self, QsimError> {
        Self::with_cap(n_qubits, DEFAULT_QUBIT_CAP)
    }

    pub fn with_cap(n_qubits: usize, cap: usize) -> Result<Self, QsimError> {
        if n_qubits == 0 {
            return Err(QsimError::Empty);
        }
        if n_qubits > cap || n_qubits >= usize::BITS as usize - 5 {
            return Err(QsimError::Resource {
                n_qubits,
                cap,
                bytes: required_bytes(n_qubits),
            });
        }
        let mut amps = vec![ZERO; 1 << n_qubits];
        amps[0] = ONE;
        Ok(Self { n_qubits, amps })
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self, QsimError> {
        let mut s = Self::new(n_qubits)?;
        if index >= s.amps.len() {
            return Err(QsimError::BasisOutOfRange {
                index,
                dim: s.amps.len(),
            });
        }
        s.amps[0] = ZERO;
        s.amps[index] = ONE;
        Ok(s)
    }

    /// Wraps an amplitude vector. The length must be a power of two (at
    /// least 2) and the vector normalised within [`NORM_TOLERANCE`].
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self, QsimError> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(QsimError::BadLength(len));
        }
        let n_qubits = len.trailing_zeros() as usize;
        if n_qubits > DEFAULT_QUBIT_CAP {
            return Err(QsimError::Resource {
                n_qubits,
                cap: DEFAULT_QUBIT_CAP,
                bytes: required_bytes(n_qubits),
            });
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(QsimError::NotNormalized(norm));
        }
        Ok(Self { n_qubits, amps })
    }

    /// Normalises `amps` before wrapping them.
    pub fn from_unnormalized(mut amps: Vec<Complex64>) -> Result<Self, QsimError> {
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || norm <= 0.0 {
            return Err(QsimError::Degenerate);
        }
        amps.iter_mut().for_each(|a| *a /= norm);
        Self::from_amplitudes(amps)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    pub(crate) fn amps_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64, QsimError> {
        if self.n_qubits != other.n_qubits {
            return Err(QsimError::WidthMismatch(self.n_qubits, other.n_qubits));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64, QsimError> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Tensor product with `self` on the low qubits and `high` above it.
    pub fn tensor(&self, high: &StateVector) -> Result<StateVector, QsimError> {
        let n = self.n_qubits + high.n_qubits;
        if n > DEFAULT_QUBIT_CAP {
            return Err(QsimError::Resource {
                n_qubits: n,
                cap: DEFAULT_QUBIT_CAP,
                bytes: required_bytes(n),
            });
        }
        let mut amps = Vec::with_capacity(1 << n);
        for h in &high.amps {
            amps.extend(self.amps.iter().map(|l| l * h));
        }
        Ok(StateVector { n_qubits: n, amps })
    }

    pub(crate) fn check_qubit(&self, qubit: usize) -> Result<(), QsimError> {
        if qubit >= self.n_qubits {
            Err(QsimError::QubitOutOfRange {
                qubit,
                n_qubits: self.n_qubits,
            })
        } else {
            Ok(())
        }
    }

    pub(crate) fn check_span(&self, span: Span) -> Result<(), QsimError> {
        if span.width == 0 || span.offset + span.width > self.n_qubits {
            Err(QsimError::SpanOutOfRange {
                offset: span.offset,
                width: span.width,
                n_qubits: self.n_qubits,
            })
        } else {
            Ok(())
        }
    }

    /// Born distribution of the integer held by `span`, indexed by value.
    pub fn born_probabilities(&self, span: Span) -> Result<Vec<f64>, QsimError> {
        self.check_span(span)?;
        let mut probs = vec![0.0; 1 << span.width];
        for (i, a) in self.amps.iter().enumerate() {
            probs[span.extract(i)] += a.norm_sqr();
        }
        Ok(probs)
    }

    /// Probability that `span` reads `value`.
    pub fn probability_of(&self, span: Span, value: usize) -> Result<f64, QsimError> {
        self.check_span(span)?;
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| span.extract(*i) == value)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Post-selects `span == value`, removes the span's qubits and
    /// renormalises. Returns the reduced state and the selection probability.
    pub fn project(&self, span: Span, value: usize) -> Result<(StateVector, f64), QsimError> {
        self.check_span(span)?;
        if span.width == self.n_qubits {
            return Err(QsimError::Empty);
        }
        let n = self.n_qubits - span.width;
        let mut amps = vec![ZERO; 1 << n];
        let low_mask = (1usize << span.offset) - 1;
        let mut p = 0.0;
        for (i, a) in self.amps.iter().enumerate() {
            if span.extract(i) != value {
                continue;
            }
            let reduced = (i & low_mask) | ((i >> (span.offset + span.width)) << span.offset);
            amps[reduced] = *a;
            p += a.norm_sqr();
        }
        if p <= f64::MIN_POSITIVE {
            return Err(QsimError::PostSelection(1));
        }
        let scale = p.sqrt();
        amps.iter_mut().for_each(|a| *a /= scale);
        Ok((StateVector { n_qubits: n, amps }, p))
    }

    /// `Tr(ρ²)` of the reduced density matrix on `span`.
    pub fn reduced_purity(&self, span: Span) -> Result<f64, QsimError> {
        self.check_span(span)?;
        let d = 1usize << span.width;
        let mut rho = vec![ZERO; d * d];
        // Group amplitudes by the complementary qubits.
        let rest = self.n_qubits - span.width;
        let low_mask = (1usize << span.offset) - 1;
        for r in 0..(1usize << rest) {
            let base = (r & low_mask) | ((r >> span.offset) << (span.offset + span.width));
            for a in 0..d {
                let ia = span.deposit(base, a);
                let va = self.amps[ia];
                if va == ZERO {
                    continue;
                }
                for b in 0..d {
                    let ib = span.deposit(base, b);
                    rho[a * d + b] += va * self.amps[ib].conj();
                }
            }
        }
        let mut purity = 0.0;
        for a in 0..d {
            for b in 0..d {
                purity += (rho[a * d + b] * rho[b * d + a]).re;
            }
        }
        Ok(purity)
    }

    #[inline]
    pub(crate) fn debug_check_norm(&self) {
        debug_assert!(
            (self.norm_sqr() - 1.0).abs() < NORM_TOLERANCE,
            "gate broke normalisation: {}",
            self.norm_sqr()
        );
    }
}

fn required_bytes(n_qubits: usize) -> u128 {
    (std::mem::size_of::<Complex64>() as u128) << n_qubits.min(120)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fresh_register_is_all_zeros() {
        let s = StateVector::new(1).unwrap();
        assert_eq!(s.amplitudes(), &[ONE, ZERO]);
        let s = StateVector::new(3).unwrap();
        assert_eq!(s.dim(), 8);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cap_is_enforced_with_memory_figure() {
        let err = StateVector::new(25).unwrap_err();
        match err {
            QsimError::Resource {
                n_qubits,
                cap,
                bytes,
            } => {
                assert_eq!((n_qubits, cap), (25, 24));
                assert_eq!(bytes, 16u128 << 25);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(err.to_string().contains("bytes"));
        assert!(StateVector::new(0).is_err());
    }

    #[test]
    fn projection_drops_qubits() {
        // (|00⟩ + |11⟩)/√2, keep qubit 1 == 1 → |1⟩ on the remaining qubit.
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let s = StateVector::from_amplitudes(vec![
            Complex64::new(h, 0.0),
            ZERO,
            ZERO,
            Complex64::new(h, 0.0),
        ])
        .unwrap();
        let (r, p) = s.project(Span::new(1, 1), 1).unwrap();
        assert!((p - 0.5).abs() < 1e-15);
        assert_eq!(r.amplitudes(), &[ZERO, ONE]);
        assert!((s.reduced_purity(Span::new(0, 1)).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn tensor_places_self_low() {
        let a = StateVector::basis(1, 1).unwrap();
        let b = StateVector::basis(2, 2).unwrap();
        let t = a.tensor(&b).unwrap();
        assert_eq!(t.n_qubits(), 3);
        assert_eq!(t.amplitude(0b101), ONE);
    }
}
