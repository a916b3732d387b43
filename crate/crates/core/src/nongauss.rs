//! Relative-entropy non-Gaussianity.

use crate::error::{Error, Result};
use crate::fock::DensityMatrix;
use crate::gaussian::{covariance_of, h_function};
use crate::scalar::{xlogx, Real};

/// Eigenvalues of the second argument below this are outside its support.
pub const SUPPORT_EIGEN_TOL: f64 = 1e-12;
/// Largest weight the first argument may put outside that support.
pub const SUPPORT_WEIGHT_TOL: f64 = 1e-10;
/// Negative results down to this are roundoff and clamp to zero.
pub const CLAMP_TOL: f64 = 1e-9;

/// `delta[rho] = h(sqrt(det sigma)) - S(rho)`, in nats.
///
/// This equals the relative entropy between `rho` and the Gaussian state with
/// its covariance matrix and means.
pub fn non_gaussianity<T: Real>(rho: &DensityMatrix<T>) -> Result<T> {
    let cov = covariance_of(rho)?;
    let delta = h_function(cov.symplectic_eigenvalue())? - rho.von_neumann_entropy();
    Ok(clamp_small_negative(delta))
}

/// Quantum relative entropy `Tr[rho (log rho - log tau)]`, in nats.
///
/// Eigenvectors of `tau` with eigenvalue below 1e-12 count as outside its
/// support: if `rho` puts more than 1e-10 of weight there, the relative
/// entropy is treated as infinite and a [`Error::SupportViolation`] is
/// returned. Smaller weights are kept in the sum.
pub fn relative_entropy<T: Real>(rho: &DensityMatrix<T>, tau: &DensityMatrix<T>) -> Result<T> {
    if rho.dim() != tau.dim() {
        return Err(Error::DimensionMismatch {
            module: "nongauss",
            left: rho.dim(),
            right: tau.dim(),
        });
    }
    let weights = tau.spectrum().diagonal_in_eigenbasis(rho.matrix());
    let cutoff = T::tol(SUPPORT_EIGEN_TOL);
    let mut outside = T::zero();
    let mut cross = T::zero();
    for (&lambda, &w) in tau.eigenvalues().iter().zip(&weights) {
        if lambda < cutoff {
            outside += w.max(T::zero());
            // the residual weight still pairs with log tau, or tail terms of
            // S(rho) would be left without their partners
            cross += w * if lambda > T::zero() { lambda } else { cutoff }.ln();
        } else {
            cross += w * lambda.ln();
        }
    }
    if outside > T::tol(SUPPORT_WEIGHT_TOL) {
        return Err(Error::SupportViolation {
            weight: outside.as_f64(),
        });
    }
    let self_term = rho.eigenvalues().iter().fold(T::zero(), |acc, &l| acc + xlogx(l));
    Ok(clamp_small_negative(self_term - cross))
}

fn clamp_small_negative<T: Real>(x: T) -> T {
    if x < T::zero() && x >= -T::tol(CLAMP_TOL) {
        T::zero()
    } else {
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::thermal_state;

    #[test]
    fn thermal_is_gaussian() {
        for n in [0.0, 0.5, 1.0, 4.0] {
            let rho = thermal_state(n, 200).unwrap();
            assert!(non_gaussianity(&rho).unwrap() <= 1e-9, "n = {n}");
        }
    }

    #[test]
    fn single_photon() {
        let rho = DensityMatrix::<f64>::fock(1, 32).unwrap();
        let d = non_gaussianity(&rho).unwrap();
        assert!((d - 2.0 * 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn self_relative_entropy_is_zero() {
        let rho = thermal_state(1.0, 64).unwrap();
        assert!(relative_entropy::<f64>(&rho, &rho).unwrap().abs() < 1e-12);
    }

    #[test]
    fn disjoint_supports() {
        let one = DensityMatrix::<f64>::fock(1, 8).unwrap();
        let vac = DensityMatrix::<f64>::fock(0, 8).unwrap();
        assert!(matches!(
            relative_entropy(&one, &vac),
            Err(Error::SupportViolation { .. })
        ));
        assert!(relative_entropy(&vac, &one).is_err());
    }
}
