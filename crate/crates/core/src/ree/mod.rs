//! Relative entropy of entanglement for two-qubit states.
//!
//! `E_r(ρ) = min_{σ separable} S(ρ‖σ)` is computed by Frank–Wolfe over
//! convex combinations of product pure states ([`ree_frank_wolfe`]). The
//! solver carries a duality-gap certificate; the independent oracles in
//! [`oracles`] bound the same minimum from other directions.

mod frank_wolfe;
mod gradient;
mod lmo;
pub mod oracles;

pub use frank_wolfe::{ree_frank_wolfe, EreResult, FwOptions, StepRule};
pub use gradient::log_gradient;
pub use lmo::{product_state_lmo, ProductState, LMO_RESTARTS};
pub use oracles::{
    concurrence, eof, is_ppt, partial_transpose, pure_state_ree_oracle, ree_random_search,
};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{kron_vec, ComplexMatrix, ONE, ZERO};
use crate::quantum::{DensityMatrix, Label};

/// One term `w·|l⟩⟨l| ⊗ |r⟩⟨r|` of a separable decomposition.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Atom {
    pub weight: f64,
    pub left: [Complex64; 2],
    pub right: [Complex64; 2],
}

impl Atom {
    pub fn product_vector(&self) -> Vec<Complex64> {
        kron_vec(&self.left, &self.right)
    }
}

/// Separable two-qubit state as a weighted list of product pure states.
#[derive(Clone, Debug, PartialEq)]
pub struct SeparableEnsemble {
    atoms: Vec<Atom>,
}

const WEIGHT_TOL: f64 = 1e-10;
const UNIT_TOL: f64 = 1e-12;

impl SeparableEnsemble {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::Domain(
                "separable ensemble needs at least one atom".into(),
            ));
        }
        let total: f64 = atoms.iter().map(|a| a.weight).sum();
        if (total - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::Domain(format!("ensemble weights sum to {total}")));
        }
        for a in &atoms {
            if a.weight.is_nan() || a.weight <= 0.0 {
                return Err(Error::Domain(format!(
                    "non-positive atom weight {}",
                    a.weight
                )));
            }
            for v in [&a.left, &a.right] {
                let n = v[0].norm_sqr() + v[1].norm_sqr();
                if (n.sqrt() - 1.0).abs() > UNIT_TOL {
                    return Err(Error::NotNormalized(n.sqrt()));
                }
            }
        }
        Ok(Self { atoms })
    }

    /// `I/4` as the four computational product states with weight 1/4.
    pub fn maximally_mixed() -> Self {
        let basis = [[ONE, ZERO], [ZERO, ONE]];
        let atoms = basis
            .iter()
            .flat_map(|l| {
                basis.iter().map(move |r| Atom {
                    weight: 0.25,
                    left: *l,
                    right: *r,
                })
            })
            .collect();
        Self { atoms }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn matrix(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(4);
        for a in &self.atoms {
            let v = a.product_vector();
            for i in 0..4 {
                for j in 0..4 {
                    m[(i, j)] += v[i] * v[j].conj() * a.weight;
                }
            }
        }
        m
    }

    pub fn density(&self, labels: &[Label]) -> Result<DensityMatrix> {
        DensityMatrix::new(labels, self.matrix())
    }

    pub(crate) fn from_atoms_unchecked(atoms: Vec<Atom>) -> Self {
        Self { atoms }
    }
}

pub(crate) fn require_two_qubits(rho: &DensityMatrix) -> Result<()> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: rho.dim(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn maximally_mixed_ensemble() {
        let e = SeparableEnsemble::maximally_mixed();
        let m = e.matrix();
        assert!(m.max_abs_diff(&ComplexMatrix::identity(4).scale_real(0.25)) < 1e-15);
        assert!(SeparableEnsemble::new(e.atoms().to_vec()).is_ok());
    }

    #[test]
    fn ensemble_validation() {
        let base = SeparableEnsemble::maximally_mixed().atoms()[0];
        let half = Atom {
            weight: 0.5,
            ..base
        };
        assert!(SeparableEnsemble::new(vec![half]).is_err());
        let bad = Atom {
            weight: 1.0,
            left: [ONE, ONE],
            right: base.right,
        };
        assert!(matches!(
            SeparableEnsemble::new(vec![bad]),
            Err(Error::NotNormalized(_))
        ));
        assert!(SeparableEnsemble::new(vec![]).is_err());
    }
}
