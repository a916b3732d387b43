//! Fidelity, Bures distance and quantum Fisher information.
//!
//! # Normalization of the QFI distance
//!
//! With `rho = sum_n r_n |n><n|` the standard quantum Fisher information is
//! `H = 2 sum_{nm} |<m| d rho |n>|^2 / (r_n + r_m)`. The quantity returned by
//! [`qfi_distance`] is `D_Q = H dlambda^2 / 2`, which reduces to
//! `sum_k dp_k^2 / (2 p_k)` on eigenvalue perturbations. That is the
//! normalization in which the energy-corrected identity
//! `D_Q = delta + dn^2 / (2 n (n + 1))` holds exactly at second order.

use nalgebra::Complex;

use crate::error::{Error, Result};
use crate::fock::{DensityMatrix, NumberDistribution, HERMITICITY_TOL};
use crate::scalar::{real, Real};
use crate::spectral::{hermitian_eigen, hermiticity_defect, CMatrix};

/// Eigenvalue pairs with `r_n + r_m` below this are dropped from the QFI sum.
pub const QFI_PAIR_CUTOFF: f64 = 1e-10;
/// Probabilities below this cannot carry a perturbation.
pub const DIVISION_GUARD: f64 = 1e-300;
/// Default central-difference step.
pub const DEFAULT_FD_STEP: f64 = 1e-4;

/// Hermitian, traceless `d rho / d lambda`.
#[derive(Debug, Clone)]
pub struct TangentDirection<T: Real = f64> {
    drho: CMatrix<T>,
}

impl<T: Real> TangentDirection<T> {
    pub fn new(drho: CMatrix<T>) -> Result<Self> {
        if !drho.is_square() {
            return Err(Error::NotSquare {
                rows: drho.nrows(),
                cols: drho.ncols(),
            });
        }
        let defect = hermiticity_defect(&drho);
        if defect > T::tol(HERMITICITY_TOL) {
            return Err(Error::HermiticityViolation {
                deviation: defect.as_f64(),
            });
        }
        let trace = drho.trace().re;
        if trace.abs() > T::tol(1e-10) {
            return Err(Error::bad_spec("metric", format!("tangent trace {trace} is not zero")));
        }
        Ok(Self { drho })
    }

    /// `sum_k dp_k |k><k|`.
    pub fn diagonal(dp: &[T]) -> Result<Self> {
        let n = dp.len();
        Self::new(CMatrix::from_fn(n, n, |i, j| if i == j { real(dp[i]) } else { real(T::zero()) }))
    }

    /// `c |j><k| + c^* |k><j|`.
    pub fn coherence(dim: usize, j: usize, k: usize, c: Complex<T>) -> Result<Self> {
        if j >= dim || k >= dim || j == k {
            return Err(Error::bad_spec("metric", format!("bad coherence indices ({j}, {k}) in {dim}")));
        }
        let mut m = CMatrix::zeros(dim, dim);
        m[(j, k)] = c;
        m[(k, j)] = c.conj();
        Self::new(m)
    }

    pub fn dim(&self) -> usize {
        self.drho.nrows()
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.drho
    }
}

fn check_dims<T: Real>(a: &DensityMatrix<T>, b: usize) -> Result<()> {
    if a.dim() != b {
        return Err(Error::DimensionMismatch {
            module: "metric",
            left: a.dim(),
            right: b,
        });
    }
    Ok(())
}

/// Uhlmann fidelity `Tr sqrt(sqrt(rho1) rho2 sqrt(rho1))`, in `[0, 1]`.
pub fn fidelity<T: Real>(rho1: &DensityMatrix<T>, rho2: &DensityMatrix<T>) -> Result<T> {
    check_dims(rho1, rho2.dim())?;
    let root = rho1.spectrum().map(|x| x.max(T::zero()).sqrt());
    let inner = &root * rho2.matrix() * &root;
    let inner = (&inner + inner.adjoint()).map(|z| z * real(T::lit(0.5)));
    let f = hermitian_eigen(&inner)
        .values
        .iter()
        .fold(T::zero(), |acc, &l| acc + l.max(T::zero()).sqrt());
    Ok(f.min(T::one()))
}

/// `d_B^2 = 2 (1 - F)`, in `[0, 2]`.
pub fn bures_distance_sq<T: Real>(rho1: &DensityMatrix<T>, rho2: &DensityMatrix<T>) -> Result<T> {
    Ok(T::lit(2.0) * (T::one() - fidelity(rho1, rho2)?))
}

/// `D_Q = (H/2) dlambda^2` along `drho` at `rho`; see the module docs.
pub fn qfi_distance<T: Real>(rho: &DensityMatrix<T>, drho: &TangentDirection<T>, dlambda: T) -> Result<T> {
    check_dims(rho, drho.dim())?;
    let spectrum = rho.spectrum();
    let x = spectrum.to_eigenbasis(drho.matrix());
    let r = rho.eigenvalues();
    let cutoff = T::tol(QFI_PAIR_CUTOFF);
    let n = rho.dim();
    let mut sum = T::zero();
    for j in 0..n {
        for i in 0..n {
            let denom = r[i] + r[j];
            if denom < cutoff {
                continue;
            }
            let w = x[(i, j)].norm_sqr();
            if w > T::zero() {
                sum += w / denom;
            }
        }
    }
    Ok(sum * dlambda * dlambda)
}

/// `sum_k dp_k^2 / (2 p_k)`.
pub fn classical_fisher_half<T: Real>(p: &NumberDistribution<T>, dp: &[T]) -> Result<T> {
    if p.len() != dp.len() {
        return Err(Error::DimensionMismatch {
            module: "metric",
            left: p.len(),
            right: dp.len(),
        });
    }
    let floor = T::lit(DIVISION_GUARD);
    let mut sum = T::zero();
    for (k, (&pk, &d)) in p.probs().iter().zip(dp).enumerate() {
        if d == T::zero() {
            continue;
        }
        if pk < floor {
            return Err(Error::DivisionGuard {
                module: "metric",
                index: k,
                dp: d.as_f64(),
            });
        }
        sum += d * d / (T::lit(2.0) * pk);
    }
    Ok(sum)
}

/// `D_Q` per unit `dlambda^2` with `d rho` from central differences.
///
/// With `richardson`, the derivative is extrapolated from steps `h` and
/// `h/2` as `(4 D(h/2) - D(h)) / 3`.
pub fn qfi_finite_difference<T, F>(state_at: F, lambda0: T, step: T, richardson: bool) -> Result<T>
where
    T: Real,
    F: Fn(T) -> Result<DensityMatrix<T>>,
{
    if !(step > T::zero()) {
        return Err(Error::bad_spec("metric", "finite-difference step must be positive"));
    }
    let base = state_at(lambda0)?;
    let central = |h: T| -> Result<CMatrix<T>> {
        let plus = state_at(lambda0 + h)?;
        let minus = state_at(lambda0 - h)?;
        check_dims(&base, plus.dim())?;
        check_dims(&base, minus.dim())?;
        Ok((plus.matrix() - minus.matrix()).map(|z| z / real(T::lit(2.0) * h)))
    };
    let mut drho = central(step)?;
    if richardson {
        let half = central(step * T::lit(0.5))?;
        drho = (half.map(|z| z * real(T::lit(4.0))) - drho).map(|z| z / real(T::lit(3.0)));
    }
    // traces of differences of unit-trace states are zero to roundoff
    let shift = drho.trace() / real(T::from_usize_lossy(drho.nrows()));
    for i in 0..drho.nrows() {
        drho[(i, i)] -= shift;
    }
    let drho = (&drho + drho.adjoint()).map(|z| z * real(T::lit(0.5)));
    qfi_distance(&base, &TangentDirection::new(drho)?, T::one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::thermal_state;

    #[test]
    fn fidelity_basics() {
        let rho = thermal_state(1.0, 64).unwrap();
        assert!((fidelity(&rho, &rho).unwrap() - 1.0_f64).abs() < 1e-12);
        let vac = DensityMatrix::<f64>::fock(0, 8).unwrap();
        let one = DensityMatrix::<f64>::fock(1, 8).unwrap();
        assert!(fidelity(&vac, &one).unwrap().abs() < 1e-12);
        assert!((bures_distance_sq(&vac, &one).unwrap() - 2.0).abs() < 1e-12);
        assert!(bures_distance_sq::<f64>(&rho, &rho).unwrap().abs() < 1e-12);
    }

    #[test]
    fn zero_tangent() {
        let rho = thermal_state(1.0, 64).unwrap();
        let zero = TangentDirection::diagonal(&vec![0.0; 64]).unwrap();
        assert_eq!(qfi_distance(&rho, &zero, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn two_outcome_fisher() {
        let p = NumberDistribution::new(vec![0.5, 0.5]).unwrap();
        let eps = 1e-3;
        // eps^2/(2 * 1/2) twice = eps^2 * 2
        let got = classical_fisher_half(&p, &[eps, -eps]).unwrap();
        assert!((got - 2.0_f64 * eps * eps).abs() < 1e-18);
        assert_eq!(classical_fisher_half(&p, &[0.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn division_guard() {
        let p = NumberDistribution::new(vec![1.0, 0.0]).unwrap();
        assert!(matches!(
            classical_fisher_half(&p, &[-0.1, 0.1]),
            Err(Error::DivisionGuard { index: 1, .. })
        ));
    }

    #[test]
    fn tangent_validation() {
        let mut m = CMatrix::<f64>::zeros(3, 3);
        m[(0, 1)] = Complex::new(1.0, 0.0);
        assert!(TangentDirection::new(m).is_err());
        assert!(TangentDirection::diagonal(&[1.0, 0.0]).is_err());
        assert!(TangentDirection::<f64>::coherence(4, 1, 1, Complex::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn constant_family_has_zero_qfi() {
        let d = qfi_finite_difference(|_| thermal_state(2.0, 96), 0.3, 1e-4, false).unwrap();
        assert!(f64::abs(d) < 1e-10);
    }
}
