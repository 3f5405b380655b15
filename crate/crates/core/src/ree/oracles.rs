//! Independent checks on the solver: closed-form values and bounds that do
//! not go through Frank–Wolfe.

use super::{require_two_qubits, Atom, SeparableEnsemble};
use crate::error::{Error, Result};
use crate::linalg::{herm_eig, kron, sqrtm_psd, ComplexMatrix};
use crate::par::Execution;
use crate::quantum::{relative_entropy, DensityMatrix, Gate2, RelEntropy, StateVector};
use crate::random::{derive_seed, random_qubit, random_simplex, seeded};

/// Atoms per random separable ensemble in [`ree_random_search`].
pub const RANDOM_SEARCH_ATOMS: usize = 16;

/// For a pure two-qubit state the relative entropy of entanglement equals
/// the entropy of either reduced state.
pub fn pure_state_ree_oracle(psi: &StateVector) -> Result<f64> {
    if psi.num_qubits() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: psi.amplitudes().len(),
        });
    }
    let left = psi.labels()[0];
    Ok(DensityMatrix::from_state(psi)
        .partial_trace(&[left])?
        .von_neumann_entropy())
}

fn binary_entropy(p: f64) -> f64 {
    [p, 1.0 - p]
        .into_iter()
        .filter(|&x| x > 0.0)
        .fold(0.0, |acc, x| acc - x * x.log2())
}

/// Wootters concurrence `max(0, √μ₁ − √μ₂ − √μ₃ − √μ₄)`, with `μ` the
/// descending eigenvalues of `ρ(σy⊗σy)ρ*(σy⊗σy)`.
///
/// The `μ` are computed as eigenvalues of the Hermitian
/// `√ρ (σy⊗σy)ρ*(σy⊗σy) √ρ`, which has the same spectrum.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    require_two_qubits(rho)?;
    let yy = {
        let y = Gate2::sigma_y().to_matrix();
        kron(&y, &y)
    };
    let rho_tilde = &(&yy * &rho.matrix().conj()) * &yy;
    let root = sqrtm_psd(rho.matrix())?;
    let r = (&(&root * &rho_tilde) * &root).hermitian_part();
    let mut s: Vec<f64> = herm_eig(&r)?
        .values
        .into_iter()
        .map(|m| m.max(0.0).sqrt())
        .collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok((s[0] - s[1] - s[2] - s[3]).max(0.0))
}

/// Entanglement of formation `h((1 + √(1 − C²))/2)` in bits.
pub fn eof(rho: &DensityMatrix) -> Result<f64> {
    let c = concurrence(rho)?;
    Ok(binary_entropy((1.0 + (1.0 - c * c).max(0.0).sqrt()) / 2.0))
}

/// Partial transpose on the second qubit.
pub fn partial_transpose(rho: &ComplexMatrix) -> ComplexMatrix {
    assert_eq!(rho.dim(), 4);
    ComplexMatrix::from_fn(4, |r, c| {
        let (i, j) = (r / 2, r % 2);
        let (k, l) = (c / 2, c % 2);
        rho[(2 * i + l, 2 * k + j)]
    })
}

/// Positive partial transpose, eigenvalues `≥ −1e-10`.
pub fn is_ppt(rho: &DensityMatrix) -> Result<bool> {
    require_two_qubits(rho)?;
    Ok(herm_eig(&partial_transpose(rho.matrix()))?.values[0] >= -1e-10)
}

fn random_ensemble(seed: u64) -> SeparableEnsemble {
    let mut rng = seeded(seed);
    let weights = random_simplex(&mut rng, RANDOM_SEARCH_ATOMS);
    let atoms = weights
        .into_iter()
        .map(|weight| Atom {
            weight,
            left: random_qubit(&mut rng),
            right: random_qubit(&mut rng),
        })
        .collect();
    SeparableEnsemble::from_atoms_unchecked(atoms)
}

/// Best `S(ρ‖σ)` in bits over `samples` random separable ensembles.
///
/// Each sample draws [`RANDOM_SEARCH_ATOMS`] Haar-random product states
/// with uniform simplex weights from its own derived seed, so the result
/// does not depend on `exec`.
pub fn ree_random_search(
    rho: &DensityMatrix,
    samples: usize,
    seed: u64,
    exec: Execution,
) -> Result<f64> {
    require_two_qubits(rho)?;
    if samples == 0 {
        return Err(Error::Domain(
            "random search needs at least one sample".into(),
        ));
    }
    let values = exec.map_range(samples, |i| {
        let sigma = random_ensemble(derive_seed(seed, i as u64)).matrix();
        relative_entropy(
            rho,
            &DensityMatrix::from_parts_unchecked(rho.labels().to_vec(), sigma),
        )
    });
    let mut best = RelEntropy::Infinite;
    for v in values {
        let v = v?;
        if v.less_than(best) {
            best = v;
        }
    }
    Ok(best.finite().unwrap_or(f64::INFINITY))
}
