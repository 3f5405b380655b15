use crate::error::{Error, Result};
use crate::linalg::{herm_eig, ComplexMatrix, SUPPORT_EPS};
use crate::quantum::DensityMatrix;

/// First divided difference of `ln` at `(a, b)`, stable for `a ≈ b`.
pub(crate) fn log_divided_difference(a: f64, b: f64) -> f64 {
    let d = a - b;
    if d == 0.0 {
        1.0 / a
    } else if d.abs() < 1e-3 * b.abs() {
        (d / b).ln_1p() / d
    } else {
        (a.ln() - b.ln()) / d
    }
}

/// Fréchet derivative of `σ ↦ Tr ρ ln σ`, returned as the Hermitian `G`
/// with `Tr(ΔG) = d/dt Tr ρ ln(σ + tΔ)`.
///
/// In σ's eigenbasis `G̃_ij = ρ̃_ij·(ln λ_i − ln λ_j)/(λ_i − λ_j)`. σ must be
/// full rank; the solver mixes in a little `I/4` before calling this.
pub fn log_gradient(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<ComplexMatrix> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: sigma.dim(),
        });
    }
    log_gradient_matrix(rho.matrix(), sigma.matrix())
}

pub(crate) fn log_gradient_matrix(
    rho: &ComplexMatrix,
    sigma: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    let eig = herm_eig(sigma)?;
    let min = eig.values[0];
    if min < SUPPORT_EPS {
        return Err(Error::SingularSigma(min));
    }
    let u = &eig.vectors;
    let d = sigma.dim();
    let rho_t = &(&u.adjoint() * rho) * u;
    let g_t = ComplexMatrix::from_fn(d, |i, j| {
        rho_t[(i, j)] * log_divided_difference(eig.values[i], eig.values[j])
    });
    Ok((&(u * &g_t) * &u.adjoint()).hermitian_part())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_density, random_hermitian, seeded};

    #[test]
    fn maximally_mixed_gives_identity() {
        let q = ComplexMatrix::identity(4).scale_real(0.25);
        let g = log_gradient_matrix(&q, &q).unwrap();
        assert!(g.max_abs_diff(&ComplexMatrix::identity(4)) < 1e-12);
    }

    #[test]
    fn commuting_diagonal_case() {
        let rho = ComplexMatrix::from_real_diagonal(&[0.1, 0.2, 0.3, 0.4]);
        let sigma = ComplexMatrix::from_real_diagonal(&[0.4, 0.3, 0.2, 0.1]);
        let g = log_gradient_matrix(&rho, &sigma).unwrap();
        let expected = ComplexMatrix::from_real_diagonal(&[0.25, 2.0 / 3.0, 1.5, 4.0]);
        assert!(g.max_abs_diff(&expected) < 1e-12);
    }

    #[test]
    fn singular_sigma_is_rejected() {
        let rho = ComplexMatrix::identity(4).scale_real(0.25);
        let sigma = ComplexMatrix::from_real_diagonal(&[0.5, 0.5, 0.0, 0.0]);
        assert!(matches!(
            log_gradient_matrix(&rho, &sigma),
            Err(Error::SingularSigma(_))
        ));
    }

    fn tr_rho_log(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> f64 {
        let l = crate::linalg::logm_on_support(sigma, 0.0).unwrap();
        rho.trace_product_re(&l)
    }

    #[test]
    fn matches_central_differences() {
        let mut rng = seeded(2024);
        for _ in 0..10 {
            let rho = random_density(&mut rng, 4, 4);
            let sigma = random_density(&mut rng, 4, 4);
            let mut delta = random_hermitian(&mut rng, 4);
            let shift = delta.trace().re / 4.0;
            delta = &delta - &ComplexMatrix::identity(4).scale_real(shift);
            delta = delta.scale_real(0.05 / delta.max_abs());
            let g = log_gradient_matrix(&rho, &sigma).unwrap();
            let h = 1e-5;
            let plus = &sigma + &delta.scale_real(h);
            let minus = &sigma - &delta.scale_real(h);
            let fd = (tr_rho_log(&rho, &plus) - tr_rho_log(&rho, &minus)) / (2.0 * h);
            let analytic = delta.trace_product_re(&g);
            assert!((fd - analytic).abs() < 1e-6, "fd {fd} analytic {analytic}");
        }
    }

    #[test]
    fn divided_difference_is_continuous() {
        let a = 0.3;
        for d in [1e-2, 1e-4, 1e-8, 1e-12] {
            let v = log_divided_difference(a + d, a);
            assert!((v - 1.0 / a).abs() < 2.0 * d / (a * a) + 1e-12);
        }
    }
}
