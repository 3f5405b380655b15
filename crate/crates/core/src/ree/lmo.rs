use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{kron_vec, top_eig_2x2, ComplexMatrix, HERMITIAN_TOL};
use crate::random::{random_qubit, seeded};

pub const LMO_RESTARTS: usize = 16;
const LMO_SEED: u64 = 0x4c4d_4f00;
const MAX_SWEEPS: usize = 500;
const SWEEP_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProductState {
    pub left: [Complex64; 2],
    pub right: [Complex64; 2],
    /// `⟨l⊗r|G|l⊗r⟩`
    pub value: f64,
}

impl ProductState {
    pub fn vector(&self) -> Vec<Complex64> {
        kron_vec(&self.left, &self.right)
    }
}

/// `(I ⊗ ⟨r|) G (I ⊗ |r⟩)` as `(a, b, d)` for `[[a, b], [b*, d]]`.
fn contract_right(g: &ComplexMatrix, r: &[Complex64; 2]) -> (f64, Complex64, f64) {
    let entry = |i: usize, k: usize| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..2 {
            for l in 0..2 {
                acc += r[j].conj() * g[(2 * i + j, 2 * k + l)] * r[l];
            }
        }
        acc
    };
    (entry(0, 0).re, entry(0, 1), entry(1, 1).re)
}

/// `(⟨l| ⊗ I) G (|l⟩ ⊗ I)`
fn contract_left(g: &ComplexMatrix, l: &[Complex64; 2]) -> (f64, Complex64, f64) {
    let entry = |j: usize, m: usize| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..2 {
            for k in 0..2 {
                acc += l[i].conj() * g[(2 * i + j, 2 * k + m)] * l[k];
            }
        }
        acc
    };
    (entry(0, 0).re, entry(0, 1), entry(1, 1).re)
}

fn alternate(g: &ComplexMatrix, start_right: [Complex64; 2]) -> ProductState {
    let mut right = start_right;
    let (a, b, d) = contract_right(g, &right);
    let (mut value, mut left) = top_eig_2x2(a, b, d);
    for _ in 0..MAX_SWEEPS {
        let (a, b, d) = contract_left(g, &left);
        let (_, r) = top_eig_2x2(a, b, d);
        right = r;
        let (a, b, d) = contract_right(g, &right);
        let (v, l) = top_eig_2x2(a, b, d);
        left = l;
        let change = v - value;
        value = v;
        if change.abs() < SWEEP_TOL {
            break;
        }
    }
    ProductState { left, right, value }
}

/// Approximately maximizes `⟨l⊗r|G|l⊗r⟩` over product pure states.
///
/// Alternates exact 2×2 eigen-solves from [`LMO_RESTARTS`] seeded starting
/// points and keeps the best; ties go to the earliest restart.
pub fn product_state_lmo(g: &ComplexMatrix) -> Result<ProductState> {
    if g.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: g.dim(),
        });
    }
    let err = g.hermiticity_error();
    if err > HERMITIAN_TOL {
        return Err(Error::NotHermitian(err));
    }
    let mut rng = seeded(LMO_SEED);
    let mut best: Option<ProductState> = None;
    for _ in 0..LMO_RESTARTS {
        let candidate = alternate(g, random_qubit(&mut rng));
        if best.is_none_or(|b| candidate.value > b.value) {
            best = Some(candidate);
        }
    }
    Ok(best.expect("at least one restart"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{kron, ONE, ZERO};
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    #[test]
    fn diagonal_projector() {
        let g = ComplexMatrix::from_real_diagonal(&[1.0, 0.0, 0.0, 0.0]);
        let p = product_state_lmo(&g).unwrap();
        assert!((p.value - 1.0).abs() < 1e-12);
        assert!(p.left[0].norm() > 1.0 - 1e-9 && p.right[0].norm() > 1.0 - 1e-9);
    }

    #[test]
    fn zz_coupling() {
        let z = ComplexMatrix::from_real_diagonal(&[1.0, -1.0]);
        let p = product_state_lmo(&kron(&z, &z)).unwrap();
        assert!((p.value - 1.0).abs() < 1e-12);
        let v = p.vector();
        assert!(v[1].norm() < 1e-6 && v[2].norm() < 1e-6);
    }

    /// Brute-force maximum of `|⟨a⊗b|Ψ−⟩|²` over a Bloch-angle grid.
    fn singlet_grid_max() -> f64 {
        let singlet = [
            ZERO,
            Complex64::new(FRAC_1_SQRT_2, 0.0),
            Complex64::new(-FRAC_1_SQRT_2, 0.0),
            ZERO,
        ];
        let steps = 24;
        let qubit = |t: f64, p: f64| {
            [
                Complex64::new((t / 2.0).cos(), 0.0),
                Complex64::from_polar((t / 2.0).sin(), p),
            ]
        };
        let mut best: f64 = 0.0;
        for i in 0..=steps {
            for j in 0..steps {
                for k in 0..=steps {
                    for l in 0..steps {
                        let a = qubit(
                            PI * i as f64 / steps as f64,
                            2.0 * PI * j as f64 / steps as f64,
                        );
                        let b = qubit(
                            PI * k as f64 / steps as f64,
                            2.0 * PI * l as f64 / steps as f64,
                        );
                        let v = kron_vec(&a, &b);
                        let amp: Complex64 =
                            v.iter().zip(&singlet).map(|(x, y)| x.conj() * y).sum();
                        best = best.max(amp.norm_sqr());
                    }
                }
            }
        }
        best
    }

    #[test]
    fn singlet_projector_max_is_one_half() {
        let oracle = singlet_grid_max();
        assert!((oracle - 0.5).abs() < 1e-12);
        let singlet = [
            ZERO,
            Complex64::new(FRAC_1_SQRT_2, 0.0),
            Complex64::new(-FRAC_1_SQRT_2, 0.0),
            ZERO,
        ];
        let p = product_state_lmo(&ComplexMatrix::outer(&singlet)).unwrap();
        assert!((p.value - oracle).abs() < 1e-10);
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut g = ComplexMatrix::identity(4);
        g[(0, 1)] = ONE;
        assert!(matches!(product_state_lmo(&g), Err(Error::NotHermitian(_))));
    }
}
