//! Seeded sampling of states, unitaries and weights.
//!
//! Every random quantity in the crate comes from [`SeededRng`]
//! (ChaCha20 as implemented by `rand_chacha` 0.9), so results are
//! reproducible across runs and platforms for a given seed.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::linalg::ComplexMatrix;
use crate::quantum::Gate2;

pub type SeededRng = ChaCha20Rng;

/// Name and version of the generator, recorded in transcripts.
pub const GENERATOR: &str = "chacha20-rand_chacha0.9";

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Derives an independent stream for item `index` of a batch seeded by `seed`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    // splitmix64 finalizer over the pair
    let mut z = seed
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(index.wrapping_add(1).wrapping_mul(0xBF58_476D_1CE4_E5B9));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn gaussian(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random unit vector of length `dim`.
pub fn random_pure(rng: &mut impl Rng, dim: usize) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..dim).map(|_| gaussian(rng)).collect();
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-12 {
            return v.into_iter().map(|z| z / n).collect();
        }
    }
}

pub fn random_qubit(rng: &mut impl Rng) -> [Complex64; 2] {
    let v = random_pure(rng, 2);
    [v[0], v[1]]
}

/// Haar-random single-qubit unitary.
pub fn random_unitary2(rng: &mut impl Rng) -> Gate2 {
    let [a, b] = random_qubit(rng);
    let phase = Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
    Gate2::new([
        [a * phase, -b.conj() * phase],
        [b * phase, a.conj() * phase],
    ])
}

/// `A A† / Tr(A A†)` with `A` a `dim × rank` complex Ginibre matrix.
pub fn random_density(rng: &mut impl Rng, dim: usize, rank: usize) -> ComplexMatrix {
    let cols: Vec<Vec<Complex64>> = (0..rank)
        .map(|_| (0..dim).map(|_| gaussian(rng)).collect())
        .collect();
    let mut m = ComplexMatrix::zeros(dim);
    for col in &cols {
        m = &m + &ComplexMatrix::outer(col);
    }
    let tr = m.trace().re;
    m.scale_real(1.0 / tr)
}

pub fn random_hermitian(rng: &mut impl Rng, dim: usize) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(dim, |_, _| gaussian(rng));
    g.hermitian_part()
}

/// Uniform point on the probability simplex.
pub fn random_simplex(rng: &mut impl Rng, k: usize) -> Vec<f64> {
    let e: Vec<f64> = (0..k).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|x| x / s).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let a = random_pure(&mut seeded(5), 4);
        let b = random_pure(&mut seeded(5), 4);
        assert_eq!(a, b);
        assert_ne!(derive_seed(1, 0), derive_seed(1, 1));
        assert_ne!(derive_seed(0, 1), derive_seed(1, 0));
    }

    #[test]
    fn samples_satisfy_their_invariants() {
        let mut rng = seeded(11);
        for _ in 0..20 {
            assert!(random_unitary2(&mut rng).unitarity_error() < 1e-12);
            let rho = random_density(&mut rng, 4, 2);
            assert!((rho.trace().re - 1.0).abs() < 1e-12);
            assert!(rho.hermiticity_error() < 1e-15);
            let w = random_simplex(&mut rng, 7);
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(w.iter().all(|&x| x > 0.0));
        }
    }
}
