//! Qubit registers: pure states, single-qubit gates, projective
//! measurement, reduced states and entropies.

mod density;
mod state;

pub(crate) use density::{cross_entropy_nats, entropy_bits};
pub use density::{relative_entropy, DensityMatrix, RelEntropy};
pub use state::{Branch, MeasurementResolution, StateVector, NORM_TOL};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, ONE, ZERO};

/// Qubit label, e.g. `'a'`, `'A'`, `'B'`, `'C'`.
pub type Label = char;

pub const UNITARY_TOL: f64 = 1e-10;

/// Single-qubit operator as a 2×2 matrix (row-major).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Gate2([[Complex64; 2]; 2]);

impl Gate2 {
    pub const fn new(m: [[Complex64; 2]; 2]) -> Self {
        Self(m)
    }

    pub fn identity() -> Self {
        Self([[ONE, ZERO], [ZERO, ONE]])
    }

    pub fn sigma_x() -> Self {
        Self([[ZERO, ONE], [ONE, ZERO]])
    }

    pub fn sigma_y() -> Self {
        let i = Complex64::new(0.0, 1.0);
        Self([[ZERO, -i], [i, ZERO]])
    }

    pub fn sigma_z() -> Self {
        Self([[ONE, ZERO], [ZERO, -ONE]])
    }

    /// `−iσy`, rows `(0, −1)` and `(1, 0)`.
    pub fn minus_i_sigma_y() -> Self {
        Self([[ZERO, -ONE], [ONE, ZERO]])
    }

    pub fn matrix(&self) -> &[[Complex64; 2]; 2] {
        &self.0
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(2, |i, j| self.0[i][j])
    }

    /// `‖G†G − I‖_max`
    pub fn unitarity_error(&self) -> f64 {
        let m = self.to_matrix();
        (&(&m.adjoint() * &m) - &ComplexMatrix::identity(2)).max_abs()
    }

    pub fn check_unitary(&self) -> Result<()> {
        let err = self.unitarity_error();
        if err > UNITARY_TOL || !err.is_finite() {
            return Err(Error::NotUnitary(err));
        }
        Ok(())
    }
}

/// Orthonormal single-qubit basis; outcome `k` of a measurement is vector `k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Basis2([[Complex64; 2]; 2]);

impl Basis2 {
    pub const ORTHO_TOL: f64 = 1e-12;

    pub fn new(first: [Complex64; 2], second: [Complex64; 2]) -> Result<Self> {
        let b = Self([first, second]);
        let err = b.orthonormality_error();
        if err > Self::ORTHO_TOL || !err.is_finite() {
            return Err(Error::BasisNotOrthonormal(err));
        }
        Ok(b)
    }

    pub fn computational() -> Self {
        Self([[ONE, ZERO], [ZERO, ONE]])
    }

    pub fn vectors(&self) -> [[Complex64; 2]; 2] {
        self.0
    }

    pub fn vector(&self, k: usize) -> [Complex64; 2] {
        self.0[k]
    }

    pub fn orthonormality_error(&self) -> f64 {
        let dot = |u: &[Complex64; 2], v: &[Complex64; 2]| u[0].conj() * v[0] + u[1].conj() * v[1];
        let [u, v] = &self.0;
        [
            (dot(u, u) - ONE).norm(),
            (dot(v, v) - ONE).norm(),
            dot(u, v).norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}
