use std::f64::consts::LN_2;

use super::state::check_distinct;
use super::{Label, StateVector};
use crate::error::{Error, Result};
use crate::linalg::{herm_eig, ComplexMatrix, HERMITIAN_TOL, PSD_CLAMP, SUPPORT_EPS};

pub const TRACE_TOL: f64 = 1e-10;

/// Hermitian, PSD, unit-trace operator on a labeled register.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    labels: Vec<Label>,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates every invariant: dimension `2^n`, Hermitian, unit trace,
    /// spectrum bounded below by `−1e-10`.
    pub fn new(labels: &[Label], matrix: ComplexMatrix) -> Result<Self> {
        check_distinct(labels)?;
        let expected = 1usize << labels.len();
        if matrix.dim() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: matrix.dim(),
            });
        }
        if !matrix.is_finite() {
            return Err(Error::NonFinite);
        }
        let herm = matrix.hermiticity_error();
        if herm > HERMITIAN_TOL {
            return Err(Error::NotHermitian(herm));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::TraceNotOne(tr.re));
        }
        let min = herm_eig(&matrix)?.values[0];
        if min < -PSD_CLAMP {
            return Err(Error::NotPsd(min));
        }
        Ok(Self {
            labels: labels.to_vec(),
            matrix,
        })
    }

    pub(crate) fn from_parts_unchecked(labels: Vec<Label>, matrix: ComplexMatrix) -> Self {
        Self { labels, matrix }
    }

    /// `|ψ⟩⟨ψ|`
    pub fn from_state(state: &StateVector) -> Self {
        Self {
            labels: state.labels().to_vec(),
            matrix: ComplexMatrix::outer(state.amplitudes()),
        }
    }

    pub fn maximally_mixed(labels: &[Label]) -> Result<Self> {
        check_distinct(labels)?;
        let d = 1usize << labels.len();
        Ok(Self {
            labels: labels.to_vec(),
            matrix: ComplexMatrix::identity(d).scale_real(1.0 / d as f64),
        })
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        herm_eig(&self.matrix)
            .expect("density matrix is Hermitian by construction")
            .values
    }

    /// Reduced state on `keep`; the result lists the kept labels in
    /// register order.
    pub fn partial_trace(&self, keep: &[Label]) -> Result<DensityMatrix> {
        if keep.is_empty() {
            return Err(Error::EmptyKeepSet);
        }
        check_distinct(keep)?;
        for &l in keep {
            if !self.labels.contains(&l) {
                return Err(Error::UnknownLabel(l));
            }
        }
        let n = self.labels.len();
        // Bit masks in the full index for kept positions, MSB first.
        let kept_bits: Vec<usize> = self
            .labels
            .iter()
            .enumerate()
            .filter(|(_, l)| keep.contains(l))
            .map(|(p, _)| n - 1 - p)
            .collect();
        let traced_mask: usize = (0..n)
            .filter(|p| !keep.contains(&self.labels[*p]))
            .map(|p| 1usize << (n - 1 - p))
            .sum();
        let reduce = |full: usize| -> usize {
            kept_bits
                .iter()
                .fold(0usize, |acc, &b| (acc << 1) | ((full >> b) & 1))
        };
        let kd = 1usize << kept_bits.len();
        let mut out = ComplexMatrix::zeros(kd);
        let d = self.dim();
        for i in 0..d {
            for j in 0..d {
                if i & traced_mask == j & traced_mask {
                    out[(reduce(i), reduce(j))] += self.matrix[(i, j)];
                }
            }
        }
        let labels = self
            .labels
            .iter()
            .copied()
            .filter(|l| keep.contains(l))
            .collect();
        Ok(DensityMatrix {
            labels,
            matrix: out,
        })
    }

    /// `⟨target|ρ|target⟩`
    pub fn fidelity_with_pure(&self, target: &StateVector) -> Result<f64> {
        if target.labels().len() != self.labels.len() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: target.amplitudes().len(),
            });
        }
        Ok(self.matrix.expectation(target.amplitudes()).re)
    }

    /// Von Neumann entropy in bits.
    pub fn von_neumann_entropy(&self) -> f64 {
        entropy_bits(&self.eigenvalues())
    }
}

pub(crate) fn entropy_bits(values: &[f64]) -> f64 {
    let s: f64 = values
        .iter()
        .filter(|&&v| v > SUPPORT_EPS)
        .map(|&v| -v * v.ln())
        .sum();
    s / LN_2
}

/// Relative entropy value; `Infinite` when the support condition fails.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RelEntropy {
    Finite(f64),
    Infinite,
}

impl RelEntropy {
    pub fn finite(self) -> Option<f64> {
        match self {
            RelEntropy::Finite(v) => Some(v),
            RelEntropy::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, RelEntropy::Infinite)
    }

    /// Total order with `Infinite` above every finite value.
    pub fn less_than(self, other: RelEntropy) -> bool {
        match (self, other) {
            (RelEntropy::Finite(a), RelEntropy::Finite(b)) => a < b,
            (RelEntropy::Finite(_), RelEntropy::Infinite) => true,
            _ => false,
        }
    }
}

/// `−Tr ρ ln σ` in nats, or `None` if ρ has weight outside σ's support.
pub(crate) fn cross_entropy_nats(
    rho: &ComplexMatrix,
    sigma: &ComplexMatrix,
) -> Result<Option<f64>> {
    let eig = herm_eig(sigma)?;
    let mut acc = 0.0;
    for (k, &lambda) in eig.values.iter().enumerate() {
        let v = eig.vector(k);
        let weight = rho.expectation(&v).re;
        if lambda > SUPPORT_EPS {
            acc -= weight * lambda.ln();
        } else if weight > SUPPORT_EPS {
            return Ok(None);
        }
    }
    Ok(Some(acc))
}

/// `S(ρ‖σ) = Tr ρ(log₂ρ − log₂σ)`.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<RelEntropy> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: sigma.dim(),
        });
    }
    let neg_entropy_nats = -entropy_bits(&rho.eigenvalues()) * LN_2;
    Ok(match cross_entropy_nats(&rho.matrix, &sigma.matrix)? {
        Some(cross) => RelEntropy::Finite((neg_entropy_nats + cross) / LN_2),
        None => RelEntropy::Infinite,
    })
}

impl From<DensityMatrix> for ComplexMatrix {
    fn from(d: DensityMatrix) -> Self {
        d.matrix
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::kron;
    use num_complex::Complex64;
    use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn diag(labels: &[Label], d: &[f64]) -> DensityMatrix {
        DensityMatrix::new(labels, ComplexMatrix::from_real_diagonal(d)).unwrap()
    }

    #[test]
    fn density_of_basis_and_plus_states() {
        let d = DensityMatrix::from_state(&StateVector::ket("0", &['B']).unwrap());
        assert_eq!(d.matrix(), &ComplexMatrix::from_real_diagonal(&[1.0, 0.0]));
        let plus = StateVector::new(&['B'], vec![c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2)]).unwrap();
        let d = DensityMatrix::from_state(&plus);
        for z in d.matrix().as_slice() {
            assert!((z - c(0.5)).norm() < 1e-15);
        }
    }

    #[test]
    fn validation_names_the_violated_invariant() {
        let labels = ['B'];
        assert!(matches!(
            DensityMatrix::new(&labels, ComplexMatrix::from_real_diagonal(&[0.6, 0.6])),
            Err(Error::TraceNotOne(_))
        ));
        assert!(matches!(
            DensityMatrix::new(&labels, ComplexMatrix::from_real_diagonal(&[1.5, -0.5])),
            Err(Error::NotPsd(_))
        ));
        let m = ComplexMatrix::from_row_major(2, vec![c(0.5), c(0.2), c(0.1), c(0.5)]).unwrap();
        assert!(matches!(
            DensityMatrix::new(&labels, m),
            Err(Error::NotHermitian(_))
        ));
        assert!(matches!(
            DensityMatrix::new(&['A', 'B'], ComplexMatrix::identity(2)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn partial_trace_of_product_state() {
        let rho = ComplexMatrix::from_row_major(
            2,
            vec![
                c(0.7),
                Complex64::new(0.1, 0.2),
                Complex64::new(0.1, -0.2),
                c(0.3),
            ],
        )
        .unwrap();
        let tau = ComplexMatrix::from_real_diagonal(&[0.25, 0.75]);
        let joint = DensityMatrix::new(&['A', 'B'], kron(&rho, &tau)).unwrap();
        let left = joint.partial_trace(&['A']).unwrap();
        assert!(left.matrix().max_abs_diff(&rho) < 1e-15);
        let right = joint.partial_trace(&['B']).unwrap();
        assert!(right.matrix().max_abs_diff(&tau) < 1e-15);
    }

    #[test]
    fn partial_trace_of_ghz_is_maximally_mixed() {
        let labels = ['A', 'B', 'C'];
        let a = StateVector::ket("000", &labels).unwrap();
        let b = StateVector::ket("111", &labels).unwrap();
        let ghz = StateVector::combine(&[(c(FRAC_1_SQRT_2), &a), (c(FRAC_1_SQRT_2), &b)]).unwrap();
        let rb = DensityMatrix::from_state(&ghz)
            .partial_trace(&['B'])
            .unwrap();
        assert!(
            rb.matrix()
                .max_abs_diff(&ComplexMatrix::from_real_diagonal(&[0.5, 0.5]))
                < 1e-15
        );
        assert_eq!(rb.labels(), &['B']);
    }

    #[test]
    fn partial_trace_errors() {
        let d = diag(&['A', 'B'], &[0.25; 4]);
        assert_eq!(d.partial_trace(&[]), Err(Error::EmptyKeepSet));
        assert_eq!(d.partial_trace(&['C']), Err(Error::UnknownLabel('C')));
    }

    #[test]
    fn partial_trace_keeps_register_order() {
        // |0⟩_A |1⟩_B |0⟩_C, keep {C, A} → labels (A, C), state |00⟩
        let s = StateVector::ket("010", &['A', 'B', 'C']).unwrap();
        let r = DensityMatrix::from_state(&s)
            .partial_trace(&['C', 'A'])
            .unwrap();
        assert_eq!(r.labels(), &['A', 'C']);
        assert_eq!(r.matrix()[(0, 0)], c(1.0));
    }

    #[test]
    fn fidelity_cases() {
        let plus = StateVector::new(&['B'], vec![c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2)]).unwrap();
        let d = DensityMatrix::from_state(&plus);
        assert!((d.fidelity_with_pure(&plus).unwrap() - 1.0).abs() < 1e-15);
        let two = StateVector::ket("00", &['A', 'B']).unwrap();
        assert!(matches!(
            d.fidelity_with_pure(&two),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn entropy_cases() {
        let pure = DensityMatrix::from_state(&StateVector::ket("01", &['A', 'B']).unwrap());
        assert!(pure.von_neumann_entropy().abs() < 1e-12);
        let mixed = diag(&['B'], &[0.5, 0.5]);
        assert!((mixed.von_neumann_entropy() - 1.0).abs() < 1e-12);
        // binary entropy of the receiver-marginal spectrum
        let p = 0.5 + 1.0 / (2.0 * SQRT_2);
        let h = -p * p.log2() - (1.0 - p) * (1.0 - p).log2();
        assert!((diag(&['B'], &[p, 1.0 - p]).von_neumann_entropy() - h).abs() < 1e-12);
        assert!((h - 0.600876).abs() < 1e-6);
    }

    #[test]
    fn relative_entropy_cases() {
        let zero = diag(&['B'], &[1.0, 0.0]);
        let one = diag(&['B'], &[0.0, 1.0]);
        let mixed = diag(&['B'], &[0.5, 0.5]);
        assert_eq!(
            relative_entropy(&mixed, &mixed).unwrap(),
            RelEntropy::Finite(0.0)
        );
        let s = relative_entropy(&zero, &mixed).unwrap().finite().unwrap();
        assert!((s - 1.0).abs() < 1e-12);
        assert_eq!(relative_entropy(&zero, &one).unwrap(), RelEntropy::Infinite);
        let two = diag(&['A', 'B'], &[0.25; 4]);
        assert!(matches!(
            relative_entropy(&zero, &two),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn rel_entropy_ordering() {
        assert!(RelEntropy::Finite(1.0).less_than(RelEntropy::Infinite));
        assert!(!RelEntropy::Infinite.less_than(RelEntropy::Finite(1.0)));
        assert!(RelEntropy::Finite(0.5).less_than(RelEntropy::Finite(1.0)));
    }
}
