//! Dense complex matrices for registers of at most four qubits.
//!
//! Storage is row-major. Eigendecompositions are restricted to Hermitian
//! input; everything that needs a matrix function (log, square root,
//! entropy) goes through [`herm_eig`].

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Hermiticity tolerance used by every precondition check.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Eigenvalues in `[-PSD_CLAMP, 0)` are treated as zero.
pub const PSD_CLAMP: f64 = 1e-10;
/// Default support cutoff for matrix logarithms.
pub const SUPPORT_EPS: f64 = 1e-12;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Builds a matrix from row-major entries, rejecting non-square or
    /// non-finite input.
    pub fn from_row_major(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if dim == 0 || data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { dim, data })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        m
    }

    /// `|v⟩⟨v|`
    pub fn outer(v: &[Complex64]) -> Self {
        Self::from_fn(v.len(), |i, j| v[i] * v[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn conj(&self) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)])
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    pub fn scale_real(&self, c: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// Real part of `Tr(self · other)`, without forming the product.
    pub fn trace_product_re(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        let d = self.dim;
        let mut acc = 0.0;
        for i in 0..d {
            for k in 0..d {
                acc += (self.data[i * d + k] * other.data[k * d + i]).re;
            }
        }
        acc
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `‖H − H†‖_max`
    pub fn hermiticity_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `(H + H†)/2`
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.dim, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// `⟨v|M|v⟩`
    pub fn expectation(&self, v: &[Complex64]) -> Complex64 {
        let mv = self.mul_vec(v);
        v.iter().zip(&mv).map(|(a, b)| a.conj() * b).sum()
    }

    fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.dim, self.dim, |i, j| self[(i, j)])
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim);
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim);
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim);
        let d = self.dim;
        let mut out = ComplexMatrix::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self.data[i * d + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..d {
                    out.data[i * d + j] += a * rhs.data[k * d + j];
                }
            }
        }
        out
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for j in 0..self.dim {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Kronecker product: entry `(i·db + k, j·db + l)` is `a(i,j)·b(k,l)`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let db = b.dim;
    ComplexMatrix::from_fn(a.dim * db, |r, c| a[(r / db, c / db)] * b[(r % db, c % db)])
}

/// Kronecker product of two vectors.
pub fn kron_vec(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter()
        .flat_map(|x| b.iter().map(move |y| x * y))
        .collect()
}

#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector for `values[k]`.
    pub vectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        (0..self.dim()).map(|i| self.vectors[(i, k)]).collect()
    }

    /// `U f(Λ) U†`
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let d = self.dim();
        let fv: Vec<f64> = self.values.iter().map(|&v| f(v)).collect();
        ComplexMatrix::from_fn(d, |i, j| {
            (0..d)
                .filter(|&k| fv[k] != 0.0)
                .map(|k| self.vectors[(i, k)] * self.vectors[(j, k)].conj() * fv[k])
                .sum()
        })
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map(|v| v)
    }
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
pub fn herm_eig(h: &ComplexMatrix) -> Result<EigenDecomposition> {
    let err = h.hermiticity_error();
    if err > HERMITIAN_TOL {
        return Err(Error::NotHermitian(err));
    }
    if !h.is_finite() {
        return Err(Error::NonFinite);
    }
    let d = h.dim;
    if d == 1 {
        return Ok(EigenDecomposition {
            values: vec![h[(0, 0)].re],
            vectors: ComplexMatrix::identity(1),
        });
    }
    let eig = SymmetricEigen::new(h.hermitian_part().to_nalgebra());
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = ComplexMatrix::from_fn(d, |i, c| eig.eigenvectors[(i, order[c])]);
    Ok(EigenDecomposition { values, vectors })
}

fn check_psd(eig: &EigenDecomposition) -> Result<()> {
    let min = eig.values[0];
    if min < -PSD_CLAMP {
        return Err(Error::NotPsd(min));
    }
    Ok(())
}

/// Natural-log matrix function on the support of a PSD matrix.
///
/// Eigenvalues `≤ eps` contribute zero on their eigenspace; callers are
/// responsible for any support condition.
pub fn logm_on_support(h: &ComplexMatrix, eps: f64) -> Result<ComplexMatrix> {
    let eig = herm_eig(h)?;
    check_psd(&eig)?;
    Ok(eig.map(|v| if v > eps { v.ln() } else { 0.0 }))
}

/// Principal square root of a PSD matrix, negative rounding clamped to zero.
pub fn sqrtm_psd(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = herm_eig(h)?;
    check_psd(&eig)?;
    Ok(eig.map(|v| v.max(0.0).sqrt()))
}

/// Exponential of a Hermitian matrix.
pub fn expm_hermitian(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(herm_eig(h)?.map(f64::exp))
}

/// Leading eigenpair of a 2×2 Hermitian matrix `[[a, b], [b*, d]]`.
pub(crate) fn top_eig_2x2(a: f64, b: Complex64, d: f64) -> (f64, [Complex64; 2]) {
    let mean = 0.5 * (a + d);
    let half = 0.5 * (a - d);
    let r = (half * half + b.norm_sqr()).sqrt();
    let top = mean + r;
    if b.norm() <= 1e-300 {
        return if a >= d {
            (a, [ONE, ZERO])
        } else {
            (d, [ZERO, ONE])
        };
    }
    // (M - top) v = 0 using whichever row is better conditioned.
    let v = if half >= 0.0 {
        [Complex64::new(half + r, 0.0), b.conj()]
    } else {
        [b, Complex64::new(r - half, 0.0)]
    };
    let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    (top, [v[0] / n, v[1] / n])
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sigma_z() -> ComplexMatrix {
        ComplexMatrix::from_real_diagonal(&[1.0, -1.0])
    }

    fn sigma_x() -> ComplexMatrix {
        ComplexMatrix::from_row_major(2, vec![ZERO, ONE, ONE, ZERO]).unwrap()
    }

    #[test]
    fn kron_identity() {
        let k = kron(&ComplexMatrix::identity(2), &ComplexMatrix::identity(2));
        assert_eq!(k, ComplexMatrix::identity(4));
    }

    #[test]
    fn kron_basis_projectors() {
        let p0 = ComplexMatrix::from_real_diagonal(&[1.0, 0.0]);
        let p1 = ComplexMatrix::from_real_diagonal(&[0.0, 1.0]);
        let k = kron(&p0, &p1);
        for i in 0..4 {
            for j in 0..4 {
                let expected = if (i, j) == (1, 1) { ONE } else { ZERO };
                assert_eq!(k[(i, j)], expected);
            }
        }
    }

    #[test]
    fn kron_matches_index_formula() {
        let (a, b) = (sigma_z(), sigma_x());
        let k = kron(&a, &b);
        for i in 0..2 {
            for j in 0..2 {
                for p in 0..2 {
                    for q in 0..2 {
                        assert_eq!(k[(i * 2 + p, j * 2 + q)], a[(i, j)] * b[(p, q)]);
                    }
                }
            }
        }
    }

    #[test]
    fn eig_of_simple_matrices() {
        let e = herm_eig(&ComplexMatrix::identity(2)).unwrap();
        assert_eq!(e.values, vec![1.0, 1.0]);
        let e = herm_eig(&sigma_z()).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14 && (e.values[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eig_of_receiver_marginal() {
        // diag 1/2, off-diagonal 1/(2√2) e^{∓iφ}
        let phi: f64 = 0.37;
        let off = 1.0 / (2.0 * SQRT_2);
        let rho = ComplexMatrix::from_row_major(
            2,
            vec![
                c(0.5, 0.0),
                Complex64::from_polar(off, -phi),
                Complex64::from_polar(off, phi),
                c(0.5, 0.0),
            ],
        )
        .unwrap();
        let e = herm_eig(&rho).unwrap();
        assert!((e.values[0] - (0.5 - off)).abs() < 1e-12);
        assert!((e.values[1] - (0.5 + off)).abs() < 1e-12);
        assert!((e.values[0] - 0.146447).abs() < 1e-6);

        let log = logm_on_support(&rho, SUPPORT_EPS).unwrap();
        for k in 0..2 {
            let v = e.vector(k);
            let lv = log.mul_vec(&v);
            for i in 0..2 {
                assert!((lv[i] - v[i] * e.values[k].ln()).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = ComplexMatrix::from_row_major(2, vec![ZERO, ONE, ZERO, ZERO]).unwrap();
        assert!(matches!(herm_eig(&m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn logm_scalar_cases() {
        let z = logm_on_support(&ComplexMatrix::identity(4), SUPPORT_EPS).unwrap();
        assert!(z.max_abs() < 1e-15);
        let half = ComplexMatrix::from_real_diagonal(&[0.5, 0.5]);
        let l = logm_on_support(&half, SUPPORT_EPS).unwrap();
        let expected = ComplexMatrix::identity(2).scale_real(-std::f64::consts::LN_2);
        assert!(l.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn logm_rejects_negative_spectrum() {
        let m = ComplexMatrix::from_real_diagonal(&[1.0, -1e-6]);
        assert!(matches!(
            logm_on_support(&m, SUPPORT_EPS),
            Err(Error::NotPsd(_))
        ));
        // within the clamp
        let m = ComplexMatrix::from_real_diagonal(&[1.0, -1e-11]);
        assert!(logm_on_support(&m, SUPPORT_EPS).is_ok());
    }

    #[test]
    fn top_eig_2x2_matches_general_solver() {
        let cases = [
            (0.3, c(0.1, -0.4), -0.2),
            (-1.0, c(0.0, 0.0), 2.0),
            (1.0, c(1e-3, 2e-3), 1.0),
            (0.0, c(-0.5, 0.5), 0.0),
        ];
        for (a, b, d) in cases {
            let m =
                ComplexMatrix::from_row_major(2, vec![c(a, 0.0), b, b.conj(), c(d, 0.0)]).unwrap();
            let e = herm_eig(&m).unwrap();
            let (top, v) = top_eig_2x2(a, b, d);
            assert!((top - e.values[1]).abs() < 1e-13);
            let mv = m.mul_vec(&v);
            assert!((mv[0] - v[0] * top).norm() < 1e-12 && (mv[1] - v[1] * top).norm() < 1e-12);
        }
    }

    #[test]
    fn from_row_major_rejects_bad_input() {
        assert!(ComplexMatrix::from_row_major(2, vec![ONE; 3]).is_err());
        assert_eq!(
            ComplexMatrix::from_row_major(1, vec![c(f64::NAN, 0.0)]),
            Err(Error::NonFinite)
        );
    }
}
