use num_complex::Complex64;
use std::f64::consts::FRAC_1_SQRT_2;

use super::{QsimError, Span, StateVector};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// 2×2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gate2(pub [[Complex64; 2]; 2]);

impl Gate2 {
    pub const IDENTITY: Gate2 = Gate2([[ONE, ZERO], [ZERO, ONE]]);
    pub const X: Gate2 = Gate2([[ZERO, ONE], [ONE, ZERO]]);
    pub const Z: Gate2 = Gate2([[ONE, ZERO], [ZERO, Complex64 { re: -1.0, im: 0.0 }]]);

    pub fn hadamard() -> Self {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        Gate2([[h, h], [h, -h]])
    }

    /// `[[cos θ/2, −sin θ/2], [sin θ/2, cos θ/2]]`; with `θ = 2·asin v` this
    /// maps `|0⟩ → √(1−v²)|0⟩ + v|1⟩`.
    pub fn ry(angle: f64) -> Self {
        let (s, c) = (angle / 2.0).sin_cos();
        Gate2([
            [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
            [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
        ])
    }

    /// `diag(1, e^{iφ})`.
    pub fn phase(phi: f64) -> Self {
        Gate2([[ONE, ZERO], [ZERO, Complex64::from_polar(1.0, phi)]])
    }

    pub fn real(m: [[f64; 2]; 2]) -> Self {
        Gate2(m.map(|r| r.map(|x| Complex64::new(x, 0.0))))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Gate2(self.0.map(|r| r.map(|x| x * s)))
    }

    pub fn mul(&self, rhs: &Gate2) -> Gate2 {
        let a = &self.0;
        let b = &rhs.0;
        let mut out = [[ZERO; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Gate2(out)
    }

    pub fn adjoint(&self) -> Gate2 {
        let a = &self.0;
        Gate2([
            [a[0][0].conj(), a[1][0].conj()],
            [a[0][1].conj(), a[1][1].conj()],
        ])
    }

    /// Integer power by repeated squaring.
    pub fn pow(&self, mut e: u64) -> Gate2 {
        let mut base = *self;
        let mut acc = Gate2::IDENTITY;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        [
            self.0[0][0] * v[0] + self.0[0][1] * v[1],
            self.0[1][0] * v[0] + self.0[1][1] * v[1],
        ]
    }
}

fn control_mask(controls: &[(usize, bool)]) -> (usize, usize) {
    controls.iter().fold((0, 0), |(m, v), &(q, bit)| {
        (m | 1 << q, if bit { v | 1 << q } else { v })
    })
}

impl StateVector {
    fn check_controls(&self, controls: &[(usize, bool)], target: usize) -> Result<(), QsimError> {
        self.check_qubit(target)?;
        let mut seen = 1usize << target;
        for &(q, _) in controls {
            self.check_qubit(q)?;
            if q == target {
                return Err(QsimError::ControlIsTarget(q));
            }
            if seen & (1 << q) != 0 {
                return Err(QsimError::Overlap(q));
            }
            seen |= 1 << q;
        }
        Ok(())
    }

    /// Applies `gate` to `target` on the subspace where every control qubit
    /// holds its required bit.
    pub fn apply_controlled(
        &mut self,
        controls: &[(usize, bool)],
        target: usize,
        gate: &Gate2,
    ) -> Result<(), QsimError> {
        self.check_controls(controls, target)?;
        let (mask, want) = control_mask(controls);
        let bit = 1usize << target;
        let g = &gate.0;
        let amps = self.amps_mut();
        let dim = amps.len();
        let mut base = 0;
        while base < dim {
            for i in base..base + bit {
                if i & mask != want {
                    continue;
                }
                let j = i | bit;
                let (a0, a1) = (amps[i], amps[j]);
                amps[i] = g[0][0] * a0 + g[0][1] * a1;
                amps[j] = g[1][0] * a0 + g[1][1] * a1;
            }
            base += 2 * bit;
        }
        self.debug_check_norm();
        Ok(())
    }

    pub fn apply_gate(&mut self, target: usize, gate: &Gate2) -> Result<(), QsimError> {
        self.apply_controlled(&[], target, gate)
    }

    pub fn apply_hadamard(&mut self, target: usize) -> Result<(), QsimError> {
        self.apply_gate(target, &Gate2::hadamard())
    }

    pub fn apply_x(&mut self, target: usize) -> Result<(), QsimError> {
        self.apply_gate(target, &Gate2::X)
    }

    pub fn apply_ry(&mut self, target: usize, angle: f64) -> Result<(), QsimError> {
        if !angle.is_finite() {
            return Err(QsimError::NonFinite);
        }
        self.apply_gate(target, &Gate2::ry(angle))
    }

    /// Hadamard on every qubit of `span`.
    pub fn apply_hadamard_all(&mut self, span: Span) -> Result<(), QsimError> {
        self.check_span(span)?;
        (0..span.width).try_for_each(|p| self.apply_hadamard(span.qubit(p)))
    }

    /// Writes the classical value `value` into a span assumed to hold `|0⟩`
    /// by flipping the set bits.
    pub fn load_value(&mut self, span: Span, value: usize) -> Result<(), QsimError> {
        self.check_span(span)?;
        (0..span.width)
            .filter(|p| value >> p & 1 == 1)
            .try_for_each(|p| self.apply_x(span.qubit(p)))
    }

    /// CNOT, or ICNOT (flip when the control is `|0⟩`) when `inverted`.
    pub fn apply_controlled_not(
        &mut self,
        control: usize,
        target: usize,
        inverted: bool,
    ) -> Result<(), QsimError> {
        if control == target {
            return Err(QsimError::ControlIsTarget(control));
        }
        self.apply_controlled(&[(control, !inverted)], target, &Gate2::X)
    }

    /// Flips `target` only on the control pattern `controls = [(qubit, bit)]`.
    pub fn apply_multi_controlled(
        &mut self,
        controls: &[(usize, bool)],
        target: usize,
    ) -> Result<(), QsimError> {
        self.check_controls(controls, target)?;
        let (mask, want) = control_mask(controls);
        let bit = 1usize << target;
        let amps = self.amps_mut();
        for i in 0..amps.len() {
            if i & bit == 0 && i & mask == want {
                amps.swap(i, i | bit);
            }
        }
        Ok(())
    }

    /// Controlled phase `e^{iφ}` on `|11⟩` of qubits `a`, `b`.
    pub fn apply_cphase(&mut self, a: usize, b: usize, phi: f64) -> Result<(), QsimError> {
        if !phi.is_finite() {
            return Err(QsimError::NonFinite);
        }
        self.apply_controlled(&[(a, true)], b, &Gate2::phase(phi))
    }

    pub fn apply_swap(&mut self, a: usize, b: usize) -> Result<(), QsimError> {
        self.apply_controlled_swap(&[], a, b)
    }

    /// Swaps qubits `a` and `b` where the controls match.
    pub fn apply_controlled_swap(
        &mut self,
        controls: &[(usize, bool)],
        a: usize,
        b: usize,
    ) -> Result<(), QsimError> {
        self.check_qubit(a)?;
        self.check_qubit(b)?;
        if a == b {
            return Err(QsimError::Overlap(a));
        }
        self.check_controls(controls, a)?;
        self.check_controls(controls, b)?;
        let (mask, want) = control_mask(controls);
        let (ba, bb) = (1usize << a, 1usize << b);
        let amps = self.amps_mut();
        for i in 0..amps.len() {
            // visit each |..1_a..0_b..⟩ ↔ |..0_a..1_b..⟩ pair once
            if i & ba != 0 && i & bb == 0 && i & mask == want {
                amps.swap(i, (i & !ba) | bb);
            }
        }
        Ok(())
    }

    /// Swap test: `H(control)`, register-wise controlled swap of `a` and `b`,
    /// `H(control)`. Starting from control `|0⟩`, the probability of reading
    /// 0 afterwards is `(1 + |⟨a|b⟩|²)/2`.
    pub fn cswap_test(&mut self, control: usize, a: Span, b: Span) -> Result<(), QsimError> {
        self.check_qubit(control)?;
        self.check_span(a)?;
        self.check_span(b)?;
        if a.width != b.width {
            return Err(QsimError::WidthMismatch(a.width, b.width));
        }
        if a.overlaps(&b) {
            return Err(QsimError::Overlap(a.offset.max(b.offset)));
        }
        if a.contains(control) || b.contains(control) {
            return Err(QsimError::Overlap(control));
        }
        self.apply_hadamard(control)?;
        for p in 0..a.width {
            self.apply_controlled_swap(&[(control, true)], a.qubit(p), b.qubit(p))?;
        }
        self.apply_hadamard(control)
    }

    /// Multiplies by −1 every basis state whose `span` value satisfies
    /// `marked`. This is the diagonal form of a phase oracle.
    pub fn apply_phase_oracle(
        &mut self,
        span: Span,
        marked: impl Fn(usize) -> bool,
    ) -> Result<(), QsimError> {
        self.check_span(span)?;
        for (i, a) in self.amps_mut().iter_mut().enumerate() {
            if marked(span.extract(i)) {
                *a = -*a;
            }
        }
        Ok(())
    }

    /// `S_0 = 2|0⟩⟨0| − I` on `span`.
    pub fn apply_zero_reflection(&mut self, span: Span) -> Result<(), QsimError> {
        self.check_span(span)?;
        for (i, a) in self.amps_mut().iter_mut().enumerate() {
            if span.extract(i) != 0 {
                *a = -*a;
            }
        }
        Ok(())
    }

    /// Applies a bijection on basis indices (e.g. a reversible classical
    /// oracle). The caller guarantees `f` is a permutation of `0..dim`.
    pub fn apply_permutation(&mut self, f: impl Fn(usize) -> usize) -> Result<(), QsimError> {
        let dim = self.dim();
        let mut out = vec![ZERO; dim];
        let mut hit = vec![false; dim];
        for (i, a) in self.amplitudes().iter().enumerate() {
            let j = f(i);
            if j >= dim || hit[j] {
                return Err(QsimError::BasisOutOfRange { index: j, dim });
            }
            hit[j] = true;
            out[j] = *a;
        }
        self.amps_mut().copy_from_slice(&out);
        Ok(())
    }

    /// Applies `op` to the `2^width` amplitude block of `span` for every
    /// assignment of the other qubits. `op` must act unitarily.
    pub fn apply_on_span(
        &mut self,
        span: Span,
        mut op: impl FnMut(&mut [Complex64]),
    ) -> Result<(), QsimError> {
        self.check_span(span)?;
        let d = 1usize << span.width;
        let rest = self.n_qubits() - span.width;
        let low_mask = (1usize << span.offset) - 1;
        let mut block = vec![ZERO; d];
        let amps = self.amps_mut();
        for r in 0..(1usize << rest) {
            let base = (r & low_mask) | ((r >> span.offset) << span.end());
            for (v, slot) in block.iter_mut().enumerate() {
                *slot = amps[span.deposit(base, v)];
            }
            op(&mut block);
            for (v, slot) in block.iter().enumerate() {
                amps[span.deposit(base, v)] = *slot;
            }
        }
        self.debug_check_norm();
        Ok(())
    }

    /// Householder reflection `I − 2|w⟩⟨w|/⟨w|w⟩` with `w = |0⟩ − |target⟩`
    /// on `span`. It maps `|0⟩ ↔ |target⟩`, is Hermitian and self-inverse,
    /// and so serves as an exact state-preparation unitary. `target` must be
    /// normalised with a real, non-negative amplitude on `|0⟩`.
    pub fn apply_state_preparation(
        &mut self,
        span: Span,
        target: &[Complex64],
    ) -> Result<(), QsimError> {
        self.check_span(span)?;
        let d = 1usize << span.width;
        if target.len() != d {
            return Err(QsimError::BadLength(target.len()));
        }
        let norm: f64 = target.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > super::NORM_TOLERANCE {
            return Err(QsimError::NotNormalized(norm));
        }
        let mut w: Vec<Complex64> = target.iter().map(|a| -a).collect();
        w[0] += ONE;
        let w_norm: f64 = w.iter().map(|a| a.norm_sqr()).sum();
        if w_norm < 1e-24 {
            return Ok(()); // target is |0⟩
        }
        self.apply_on_span(span, |block| {
            let proj: Complex64 = w
                .iter()
                .zip(block.iter())
                .map(|(wi, b)| wi.conj() * b)
                .sum();
            let coef = proj * (2.0 / w_norm);
            for (b, wi) in block.iter_mut().zip(&w) {
                *b -= coef * wi;
            }
        })
    }
}
