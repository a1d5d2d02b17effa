use super::QsimError;

/// Contiguous run of qubits `offset..offset + width` read as a little-endian
/// integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Span {
    pub offset: usize,
    pub width: usize,
}

impl Span {
    pub const fn new(offset: usize, width: usize) -> Self {
        Self { offset, width }
    }

    pub const fn single(qubit: usize) -> Self {
        Self {
            offset: qubit,
            width: 1,
        }
    }

    pub const fn end(&self) -> usize {
        self.offset + self.width
    }

    /// Global qubit index of bit `p` of the register.
    pub const fn qubit(&self, p: usize) -> usize {
        self.offset + p
    }

    pub const fn value_mask(&self) -> usize {
        (1usize << self.width) - 1
    }

    pub const fn mask(&self) -> usize {
        self.value_mask() << self.offset
    }

    #[inline]
    pub const fn extract(&self, basis: usize) -> usize {
        (basis >> self.offset) & self.value_mask()
    }

    /// `basis` with the span overwritten by `value`.
    #[inline]
    pub const fn deposit(&self, basis: usize, value: usize) -> usize {
        (basis & !self.mask()) | ((value & self.value_mask()) << self.offset)
    }

    pub const fn contains(&self, qubit: usize) -> bool {
        qubit >= self.offset && qubit < self.end()
    }

    pub const fn overlaps(&self, other: &Span) -> bool {
        self.offset < other.end() && other.offset < self.end()
    }
}

/// Named, disjoint registers over one state vector.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RegisterLayout {
    spans: Vec<(String, Span)>,
    n_qubits: usize,
}

impl RegisterLayout {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a register of `width` qubits above everything allocated so far.
    pub fn push(&mut self, name: impl Into<String>, width: usize) -> Span {
        let span = Span::new(self.n_qubits, width);
        self.n_qubits += width;
        self.spans.push((name.into(), span));
        span
    }

    /// Builds a layout from explicit spans, rejecting overlaps and spans
    /// beyond `n_qubits`.
    pub fn from_spans(n_qubits: usize, spans: &[(&str, Span)]) -> Result<Self, QsimError> {
        for (i, (_, a)) in spans.iter().enumerate() {
            if a.width == 0 || a.end() > n_qubits {
                return Err(QsimError::SpanOutOfRange {
                    offset: a.offset,
                    width: a.width,
                    n_qubits,
                });
            }
            for (_, b) in &spans[i + 1..] {
                if a.overlaps(b) {
                    return Err(QsimError::Overlap(a.offset.max(b.offset)));
                }
            }
        }
        Ok(Self {
            spans: spans.iter().map(|(n, s)| (n.to_string(), *s)).collect(),
            n_qubits,
        })
    }

    pub fn get(&self, name: &str) -> Option<Span> {
        self.spans.iter().find(|(n, _)| n == name).map(|(_, s)| *s)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn spans(&self) -> impl Iterator<Item = (&str, Span)> {
        self.spans.iter().map(|(n, s)| (n.as_str(), *s))
    }
}
