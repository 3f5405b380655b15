use num_complex::Complex64;

use super::{Basis2, Gate2, Label};
use crate::error::{Error, Result};
use crate::linalg::ZERO;

/// Normalization tolerance for state vectors.
pub const NORM_TOL: f64 = 1e-10;

/// Pure state of a labeled qubit register.
///
/// The leftmost label is the most significant bit of the amplitude index,
/// so on `(a, A, B, C)` the ket `|0001⟩` is index 1 and `|1000⟩` is index 8.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    labels: Vec<Label>,
    amps: Vec<Complex64>,
}

pub(crate) fn check_distinct(labels: &[Label]) -> Result<()> {
    for (i, l) in labels.iter().enumerate() {
        if labels[..i].contains(l) {
            return Err(Error::DuplicateLabel(*l));
        }
    }
    Ok(())
}

impl StateVector {
    pub fn new(labels: &[Label], amps: Vec<Complex64>) -> Result<Self> {
        check_distinct(labels)?;
        let expected = 1usize << labels.len();
        if amps.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: amps.len(),
            });
        }
        let s = Self {
            labels: labels.to_vec(),
            amps,
        };
        let norm = s.norm();
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(s)
    }

    /// Computational basis state; `bits[k]` is the value of `labels[k]`.
    pub fn ket(bits: &str, labels: &[Label]) -> Result<Self> {
        check_distinct(labels)?;
        if bits.len() != labels.len() || !bits.chars().all(|c| c == '0' || c == '1') {
            return Err(Error::InvalidBits(bits.to_string()));
        }
        let index = bits
            .chars()
            .fold(0usize, |acc, c| (acc << 1) | usize::from(c == '1'));
        let mut amps = vec![ZERO; 1 << labels.len()];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self {
            labels: labels.to_vec(),
            amps,
        })
    }

    /// `Σ c_k |s_k⟩`; all terms must share a register and the sum must be
    /// normalized.
    pub fn combine(terms: &[(Complex64, &StateVector)]) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| Error::Domain("empty superposition".into()))?
            .1;
        let mut amps = vec![ZERO; first.amps.len()];
        for (c, s) in terms {
            first.check_same_register(s)?;
            for (acc, a) in amps.iter_mut().zip(&s.amps) {
                *acc += c * a;
            }
        }
        Self::new(&first.labels, amps)
    }

    pub(crate) fn from_parts_unchecked(labels: Vec<Label>, amps: Vec<Complex64>) -> Self {
        Self { labels, amps }
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn num_qubits(&self) -> usize {
        self.labels.len()
    }

    /// Amplitude of the basis ket written as a bitstring in label order.
    pub fn amplitude(&self, bits: &str) -> Result<Complex64> {
        if bits.len() != self.labels.len() || !bits.chars().all(|c| c == '0' || c == '1') {
            return Err(Error::InvalidBits(bits.to_string()));
        }
        let index = bits
            .chars()
            .fold(0usize, |acc, c| (acc << 1) | usize::from(c == '1'));
        Ok(self.amps[index])
    }

    pub fn position(&self, label: Label) -> Result<usize> {
        self.labels
            .iter()
            .position(|&l| l == label)
            .ok_or(Error::UnknownLabel(label))
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    fn bit_of(&self, pos: usize) -> usize {
        self.labels.len() - 1 - pos
    }

    fn check_same_register(&self, other: &StateVector) -> Result<()> {
        if self.labels != other.labels {
            return Err(Error::DimensionMismatch {
                expected: self.amps.len(),
                found: other.amps.len(),
            });
        }
        Ok(())
    }

    /// `|self⟩ ⊗ |other⟩` on the concatenated register.
    pub fn tensor(&self, other: &StateVector) -> Result<Self> {
        let mut labels = self.labels.clone();
        labels.extend_from_slice(&other.labels);
        check_distinct(&labels)?;
        let amps = crate::linalg::kron_vec(&self.amps, &other.amps);
        Ok(Self { labels, amps })
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            labels: self.labels.clone(),
            amps: self.amps.iter().map(|a| a * c).collect(),
        }
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        self.check_same_register(other)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|⟨self|other⟩|`, insensitive to global phase.
    pub fn overlap(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm())
    }

    pub fn apply_single_qubit(&self, gate: &Gate2, label: Label) -> Result<Self> {
        gate.check_unitary()?;
        let pos = self.position(label)?;
        Ok(self.apply_unchecked(gate, pos))
    }

    pub(crate) fn apply_unchecked(&self, gate: &Gate2, pos: usize) -> Self {
        let stride = 1usize << self.bit_of(pos);
        let g = gate.matrix();
        let mut amps = self.amps.clone();
        for i in 0..amps.len() {
            if i & stride == 0 {
                let (a0, a1) = (self.amps[i], self.amps[i | stride]);
                amps[i] = g[0][0] * a0 + g[0][1] * a1;
                amps[i | stride] = g[1][0] * a0 + g[1][1] * a1;
            }
        }
        Self {
            labels: self.labels.clone(),
            amps,
        }
    }

    /// Projects `label` onto both vectors of `basis` and returns both branches.
    pub fn measure_in_basis(&self, label: Label, basis: &Basis2) -> Result<MeasurementResolution> {
        let pos = self.position(label)?;
        let bit = self.bit_of(pos);
        let rest: Vec<Label> = self
            .labels
            .iter()
            .copied()
            .filter(|&l| l != label)
            .collect();
        let low_mask = (1usize << bit) - 1;
        let branches = basis.vectors().map(|e| {
            let mut amps = vec![ZERO; 1 << rest.len()];
            for (r, amp) in amps.iter_mut().enumerate() {
                let hi = (r & !low_mask) << 1;
                let lo = r & low_mask;
                let i0 = hi | lo;
                let i1 = i0 | (1 << bit);
                *amp = e[0].conj() * self.amps[i0] + e[1].conj() * self.amps[i1];
            }
            let probability: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
            let state = (probability > 0.0).then(|| {
                let s = 1.0 / probability.sqrt();
                Self {
                    labels: rest.clone(),
                    amps: amps.iter().map(|a| a * s).collect(),
                }
            });
            Branch { probability, state }
        });
        Ok(MeasurementResolution { branches })
    }
}

#[derive(Clone, Debug)]
pub struct Branch {
    pub probability: f64,
    /// `None` only for a zero-probability branch.
    pub state: Option<StateVector>,
}

/// Both outcomes of a projective single-qubit measurement. Outcome `k`
/// corresponds to basis vector `k`.
#[derive(Clone, Debug)]
pub struct MeasurementResolution {
    pub branches: [Branch; 2],
}

impl MeasurementResolution {
    pub fn probability(&self, outcome: usize) -> f64 {
        self.branches[outcome].probability
    }

    pub fn state(&self, outcome: usize) -> Option<&StateVector> {
        self.branches[outcome].state.as_ref()
    }
}
