use super::{QsimError, Span, StateVector};

impl StateVector {
    fn check_comparator(&self, i: Span, m: Span, flag: usize) -> Result<(), QsimError> {
        self.check_span(i)?;
        self.check_span(m)?;
        self.check_qubit(flag)?;
        if i.width != m.width {
            return Err(QsimError::WidthMismatch(i.width, m.width));
        }
        if i.overlaps(&m) {
            return Err(QsimError::Overlap(i.offset.max(m.offset)));
        }
        if i.contains(flag) || m.contains(flag) {
            return Err(QsimError::Overlap(flag));
        }
        Ok(())
    }

    /// Comparator `|i⟩|M⟩|f⟩ → |i⟩|M⟩|f ⊕ [i > M]⟩`, applied directly as a
    /// basis permutation.
    pub fn apply_cmp(&mut self, i: Span, m: Span, flag: usize) -> Result<(), QsimError> {
        self.check_comparator(i, m, flag)?;
        let bit = 1usize << flag;
        let amps = self.amps_mut();
        for b in 0..amps.len() {
            if b & bit == 0 && i.extract(b) > m.extract(b) {
                amps.swap(b, b | bit);
            }
        }
        Ok(())
    }

    /// The same comparator built from (inverted-)controlled NOT gates.
    ///
    /// Bits are scanned from the most significant down. For bit `p` the
    /// flag is flipped on the pattern `(equal-above, i_p, M_p) = (1, 1, 0)`,
    /// and an ancilla records whether `i_p == M_p` as well. The ancillas
    /// (`width − 1` qubits, starting in `|0⟩`) are uncomputed at the end.
    pub fn apply_cmp_cascade(
        &mut self,
        i: Span,
        m: Span,
        flag: usize,
        ancilla: Span,
    ) -> Result<(), QsimError> {
        self.check_comparator(i, m, flag)?;
        let w = i.width;
        if w > 1 {
            self.check_span(ancilla)?;
            if ancilla.width < w - 1 {
                return Err(QsimError::WidthMismatch(ancilla.width, w - 1));
            }
            if ancilla.overlaps(&i) || ancilla.overlaps(&m) {
                return Err(QsimError::Overlap(ancilla.offset));
            }
            if ancilla.contains(flag) {
                return Err(QsimError::Overlap(flag));
            }
        }
        let prefix = |t: usize| -> Vec<(usize, bool)> {
            if t == 0 {
                Vec::new()
            } else {
                vec![(ancilla.qubit(t - 1), true)]
            }
        };
        let equality = |s: &mut StateVector, t: usize| -> Result<(), QsimError> {
            let p = w - 1 - t;
            for bit in [true, false] {
                let mut c = prefix(t);
                c.push((i.qubit(p), bit));
                c.push((m.qubit(p), bit));
                s.apply_multi_controlled(&c, ancilla.qubit(t))?;
            }
            Ok(())
        };
        for t in 0..w {
            let p = w - 1 - t;
            let mut c = prefix(t);
            c.push((i.qubit(p), true));
            c.push((m.qubit(p), false));
            self.apply_multi_controlled(&c, flag)?;
            if t + 1 < w {
                equality(self, t)?;
            }
        }
        for t in (0..w.saturating_sub(1)).rev() {
            equality(self, t)?;
        }
        Ok(())
    }
}
