//! Single-mode states in a truncated Fock basis.
//!
//! A [`DensityMatrix`] is validated once at construction (Hermitian, unit
//! trace, positive, and fitting inside the box) and immutable afterwards. Its
//! eigendecomposition is computed during validation and kept, so entropies and
//! matrix functions never decompose the same state twice.

use nalgebra::{Complex, DVector};

use crate::error::{Error, Result};
use crate::scalar::{real, xlogx, Real};
use crate::spectral::{conjugate, hermitian_eigen, hermitian_part, hermiticity_defect, CMatrix, HermitianEigen};

/// Entrywise Hermiticity tolerance.
pub const HERMITICITY_TOL: f64 = 1e-10;
/// Allowed deviation of the trace from one.
pub const TRACE_TOL: f64 = 1e-9;
/// Eigenvalues in `[-NEGATIVITY_TOL, 0)` are clamped to zero.
pub const NEGATIVITY_TOL: f64 = 1e-10;
/// Largest diagonal mass allowed in the top tenth of the box.
pub const TRUNCATION_TOL: f64 = 1e-8;
/// Allowed deviation of a probability vector's sum from one.
pub const DISTRIBUTION_TOL: f64 = 1e-9;
/// Truncation used when the caller does not pick one.
pub const DEFAULT_DIM: usize = 200;

/// Number of top Fock levels watched by the truncation guard.
pub fn guard_band(dim: usize) -> usize {
    dim / 10
}

/// Hermitian, unit-trace, positive matrix on the truncated Fock basis.
#[derive(Debug, Clone)]
pub struct DensityMatrix<T: Real = f64> {
    data: CMatrix<T>,
    spectrum: HermitianEigen<T>,
}

impl<T: Real> DensityMatrix<T> {
    /// Validates `data` as a state.
    ///
    /// Eigenvalues in `[-1e-10, 0)` are clamped to zero and the result is
    /// renormalized to unit trace.
    pub fn new(data: CMatrix<T>) -> Result<Self> {
        if !data.is_square() {
            return Err(Error::NotSquare {
                rows: data.nrows(),
                cols: data.ncols(),
            });
        }
        let n = data.nrows();

        let defect = hermiticity_defect(&data);
        if defect > T::tol(HERMITICITY_TOL) {
            return Err(Error::HermiticityViolation {
                deviation: defect.as_f64(),
            });
        }
        let trace = data.trace().re;
        if (trace - T::one()).abs() > T::tol(TRACE_TOL) {
            return Err(Error::TraceViolation { trace: trace.as_f64() });
        }

        let data = hermitian_part(&data);
        let mut spectrum = hermitian_eigen(&data);
        let min = spectrum.min_value();
        if min < -T::tol(NEGATIVITY_TOL) {
            return Err(Error::NegativityViolation {
                module: "fock_core",
                min_eigenvalue: min.as_f64(),
            });
        }

        let clamped = min < T::zero();
        if clamped {
            spectrum.values.apply(|x| *x = x.max(T::zero()));
        }
        let total: T = spectrum.values.iter().copied().fold(T::zero(), |a, b| a + b);
        spectrum.values.apply(|x| *x /= total);
        let data = if clamped {
            spectrum.map(|x| x)
        } else {
            data.map(|z| z / real(total))
        };

        let band = guard_band(n);
        let leak = (n - band..n).fold(T::zero(), |acc, k| acc + data[(k, k)].re);
        if leak > T::tol(TRUNCATION_TOL) {
            return Err(Error::TruncationLeak {
                module: "fock_core",
                what: "diagonal mass in the top 10% of the box",
                value: leak.as_f64(),
                bound: TRUNCATION_TOL,
            });
        }

        Ok(Self { data, spectrum })
    }

    /// Diagonal state `sum_k p_k |k><k|`.
    pub fn from_distribution(p: &NumberDistribution<T>) -> Result<Self> {
        let diag = DVector::from_iterator(p.len(), p.probs.iter().map(|&x| real(x)));
        Self::new(CMatrix::from_diagonal(&diag))
    }

    /// Number state `|k><k|`.
    pub fn fock(k: usize, dim: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::bad_spec("fock_core", format!("Fock level {k} outside a box of {dim}")));
        }
        let mut m = CMatrix::zeros(dim, dim);
        m[(k, k)] = real(T::one());
        Self::new(m)
    }

    /// `|psi><psi|` for a normalized amplitude vector.
    pub fn pure(psi: &DVector<Complex<T>>) -> Result<Self> {
        Self::new(psi * psi.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.data
    }

    pub fn spectrum(&self) -> &HermitianEigen<T> {
        &self.spectrum
    }

    pub fn eigenvalues(&self) -> &[T] {
        self.spectrum.values.as_slice()
    }

    /// True when every off-diagonal entry is exactly zero.
    pub fn is_diagonal(&self) -> bool {
        self.spectrum.vectors.is_none()
    }

    /// `-Tr[rho log rho]` in nats.
    pub fn von_neumann_entropy(&self) -> T {
        let s = self
            .eigenvalues()
            .iter()
            .fold(T::zero(), |acc, &l| acc - xlogx(l));
        s.max(T::zero())
    }

    /// `Tr[rho^2]`.
    pub fn purity(&self) -> T {
        self.eigenvalues().iter().fold(T::zero(), |acc, &l| acc + l * l)
    }

    /// `Tr[rho a^dag a] = sum_k k rho_kk`.
    pub fn mean_photon_number(&self) -> T {
        (0..self.dim()).fold(T::zero(), |acc, k| {
            acc + T::from_usize_lossy(k) * self.data[(k, k)].re
        })
    }

    /// Diagonal `{<k|rho|k>}` as a probability vector.
    pub fn number_distribution(&self) -> NumberDistribution<T> {
        let probs: Vec<T> = (0..self.dim()).map(|k| self.data[(k, k)].re.max(T::zero())).collect();
        NumberDistribution::normalized(probs).expect("diagonal of a validated state")
    }

    /// `U rho U^H`, re-validated (including the truncation guard).
    pub fn conjugated_by(&self, u: &OperatorMatrix<T>) -> Result<Self> {
        if u.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                module: "fock_core",
                left: u.dim(),
                right: self.dim(),
            });
        }
        Self::new(conjugate(&u.data, &self.data))
    }

    /// `Tr[rho A]`.
    pub fn expectation(&self, a: &OperatorMatrix<T>) -> Complex<T> {
        self.data.component_mul(&a.data.transpose()).sum()
    }
}

/// Probability vector over Fock numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct NumberDistribution<T: Real = f64> {
    probs: Vec<T>,
}

impl<T: Real> NumberDistribution<T> {
    /// Accepts `probs` if every entry is non-negative and the sum is one
    /// within 1e-9.
    pub fn new(probs: Vec<T>) -> Result<Self> {
        if probs.is_empty() {
            return Err(invalid("empty probability vector"));
        }
        if let Some((k, p)) = probs.iter().enumerate().find(|(_, p)| !(**p >= T::zero())) {
            return Err(invalid(format!("p[{k}] = {p} is negative")));
        }
        let sum = probs.iter().copied().fold(T::zero(), |a, b| a + b);
        if (sum - T::one()).abs() > T::tol(DISTRIBUTION_TOL) {
            return Err(invalid(format!("probabilities sum to {sum}")));
        }
        Ok(Self { probs })
    }

    /// Rescales non-negative weights to unit sum.
    pub fn normalized(mut weights: Vec<T>) -> Result<Self> {
        let sum = weights.iter().copied().fold(T::zero(), |a, b| a + b);
        if !(sum > T::zero()) {
            return Err(invalid("weights have no mass"));
        }
        for w in weights.iter_mut() {
            *w /= sum;
        }
        Self::new(weights)
    }

    /// Kronecker delta at `k`.
    pub fn delta(k: usize, len: usize) -> Result<Self> {
        if k >= len {
            return Err(invalid(format!("level {k} outside a support of {len}")));
        }
        let mut probs = vec![T::zero(); len];
        probs[k] = T::one();
        Ok(Self { probs })
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn into_vec(self) -> Vec<T> {
        self.probs
    }

    /// `sum_k k p_k`.
    pub fn mean(&self) -> T {
        self.probs
            .iter()
            .enumerate()
            .fold(T::zero(), |acc, (k, &p)| acc + T::from_usize_lossy(k) * p)
    }

    /// `-sum_k p_k log p_k` in nats.
    pub fn shannon_entropy(&self) -> T {
        self.probs.iter().fold(T::zero(), |acc, &p| acc - xlogx(p))
    }

    /// Pads with zeros (or fails if mass would be cut) to length `len`.
    pub fn resized(&self, len: usize) -> Result<Self> {
        if len < self.len() && self.probs[len..].iter().any(|&p| p > T::zero()) {
            return Err(invalid(format!("cannot cut support {} down to {len}", self.len())));
        }
        let mut probs = self.probs.clone();
        probs.resize(len, T::zero());
        Ok(Self { probs })
    }

    /// Total-variation distance `1/2 sum |p_k - q_k|` (shorter vector zero-padded).
    pub fn total_variation(&self, other: &Self) -> T {
        let n = self.len().max(other.len());
        let get = |v: &[T], k: usize| v.get(k).copied().unwrap_or_else(T::zero);
        let s = (0..n).fold(T::zero(), |acc, k| acc + (get(&self.probs, k) - get(&other.probs, k)).abs());
        s * T::lit(0.5)
    }
}

fn invalid(reason: impl Into<String>) -> Error {
    Error::InvalidDistribution {
        module: "fock_core",
        reason: reason.into(),
    }
}

/// Square operator on the truncated basis; may be non-Hermitian.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix<T: Real = f64> {
    data: CMatrix<T>,
}

impl<T: Real> OperatorMatrix<T> {
    pub fn new(data: CMatrix<T>) -> Result<Self> {
        if !data.is_square() {
            return Err(Error::NotSquare {
                rows: data.nrows(),
                cols: data.ncols(),
            });
        }
        Ok(Self { data })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            data: CMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.data
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.data
    }

    pub fn adjoint(&self) -> Self {
        Self {
            data: self.data.adjoint(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self {
            data: &self.data * &other.data,
        }
    }
}

/// Ladder, quadrature and number operators of one truncated mode.
#[derive(Debug, Clone)]
pub struct ModeOperators<T: Real = f64> {
    pub a: OperatorMatrix<T>,
    pub a_dag: OperatorMatrix<T>,
    /// `(a + a^dag) / sqrt 2`
    pub q: OperatorMatrix<T>,
    /// `(a - a^dag) / (i sqrt 2)`
    pub p: OperatorMatrix<T>,
    pub number: OperatorMatrix<T>,
}

/// Builds `a` with `a[k-1][k] = sqrt k`, and everything derived from it.
pub fn mode_operators<T: Real>(dim: usize) -> Result<ModeOperators<T>> {
    if dim < 2 {
        return Err(Error::bad_spec("fock_core", "mode operators need dim >= 2"));
    }
    let a = CMatrix::from_fn(dim, dim, |i, j| {
        if j == i + 1 {
            real(T::from_usize_lossy(j).sqrt())
        } else {
            real(T::zero())
        }
    });
    let a_dag = a.adjoint();
    let inv_sqrt2 = T::one() / T::lit(2.0).sqrt();
    let q = (&a + &a_dag).map(|z| z * real(inv_sqrt2));
    // 1/(i sqrt 2) = -i/sqrt 2
    let p = (&a - &a_dag).map(|z| z * Complex::new(T::zero(), -inv_sqrt2));
    let number = CMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            real(T::from_usize_lossy(i))
        } else {
            real(T::zero())
        }
    });
    Ok(ModeOperators {
        a: OperatorMatrix { data: a },
        a_dag: OperatorMatrix { data: a_dag },
        q: OperatorMatrix { data: q },
        p: OperatorMatrix { data: p },
        number: OperatorMatrix { data: number },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex<f64> {
        Complex::new(re, 0.0)
    }

    fn diag(values: &[f64]) -> CMatrix<f64> {
        CMatrix::from_diagonal(&DVector::from_iterator(values.len(), values.iter().map(|&v| c(v))))
    }

    #[test]
    fn maximally_mixed_is_valid() {
        let rho = DensityMatrix::new(diag(&[0.25; 4])).unwrap();
        assert!((rho.von_neumann_entropy() - 4f64.ln()).abs() < 1e-12);
        assert!((rho.purity() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = CMatrix::<f64>::zeros(2, 2);
        m[(0, 1)] = c(1.0);
        m[(0, 0)] = c(1.0);
        assert!(matches!(DensityMatrix::new(m), Err(Error::HermiticityViolation { .. })));
    }

    #[test]
    fn rejects_negative_eigenvalue() {
        let err = DensityMatrix::new(diag(&[0.6, 0.5, -0.1])).unwrap_err();
        assert!(matches!(err, Error::NegativityViolation { .. }), "{err}");
    }

    #[test]
    fn rejects_bad_trace() {
        assert!(matches!(
            DensityMatrix::new(diag(&[0.6, 0.5])),
            Err(Error::TraceViolation { .. })
        ));
    }

    #[test]
    fn rejects_non_square() {
        assert!(matches!(
            DensityMatrix::new(CMatrix::<f64>::zeros(2, 3)),
            Err(Error::NotSquare { .. })
        ));
    }

    #[test]
    fn clamps_roundoff_negativity() {
        let rho = DensityMatrix::new(diag(&[0.5 + 5e-11, 0.5, -5e-11])).unwrap();
        assert!(rho.eigenvalues().iter().all(|&l| l >= 0.0));
        assert!((rho.matrix().trace().re - 1.0).abs() < 1e-15);
        assert_eq!(rho.matrix()[(2, 2)].re, 0.0);
    }

    #[test]
    fn truncation_guard_fires() {
        let mut v = vec![0.0; 20];
        v[0] = 0.9;
        v[19] = 0.1;
        let err = DensityMatrix::new(diag(&v)).unwrap_err();
        assert!(matches!(err, Error::TruncationLeak { .. }));
    }

    #[test]
    fn pure_and_mixed_entropies() {
        let vac = DensityMatrix::<f64>::fock(0, 8).unwrap();
        assert_eq!(vac.von_neumann_entropy(), 0.0);
        assert_eq!(vac.purity(), 1.0);
        let mixed = DensityMatrix::new(diag(&[0.5, 0.5])).unwrap();
        assert!((mixed.von_neumann_entropy() - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn photon_numbers_and_distributions() {
        let f3 = DensityMatrix::<f64>::fock(3, 10).unwrap();
        assert_eq!(f3.mean_photon_number(), 3.0);
        let one = DensityMatrix::<f64>::fock(1, 4).unwrap();
        assert_eq!(one.number_distribution().probs(), &[0.0, 1.0, 0.0, 0.0]);
        let mix = DensityMatrix::new(diag(&[0.5, 0.0, 0.5, 0.0])).unwrap();
        assert_eq!(mix.number_distribution().probs(), &[0.5, 0.0, 0.5, 0.0]);
        assert_eq!(mix.mean_photon_number(), 1.0);
    }

    #[test]
    fn ladder_operator_entries() {
        let ops = mode_operators::<f64>(2).unwrap();
        let nonzero: Vec<_> = ops.a.matrix().iter().filter(|z| z.norm_sqr() > 0.0).collect();
        assert_eq!(nonzero.len(), 1);
        assert_eq!(ops.a.matrix()[(0, 1)], c(1.0));

        let ops = mode_operators::<f64>(3).unwrap();
        assert_eq!(ops.number.matrix(), &diag(&[0.0, 1.0, 2.0]));
        assert!(mode_operators::<f64>(1).is_err());
    }

    #[test]
    fn canonical_commutator_below_the_edge() {
        let n = 12;
        let ops = mode_operators::<f64>(n).unwrap();
        let q = ops.q.matrix();
        let p = ops.p.matrix();
        let comm = q * p - p * q;
        for i in 0..n - 1 {
            for j in 0..n - 1 {
                let want = if i == j { Complex::new(0.0, 1.0) } else { c(0.0) };
                assert!((comm[(i, j)] - want).norm() < 1e-12, "({i},{j})");
            }
        }
        // truncation: the last diagonal entry is i(1 - N)
        assert!((comm[(n - 1, n - 1)] - Complex::new(0.0, 1.0 - n as f64)).norm() < 1e-12);
    }

    #[test]
    fn distribution_validation() {
        assert!(NumberDistribution::new(vec![0.5, 0.6]).is_err());
        assert!(NumberDistribution::new(vec![1.1, -0.1]).is_err());
        let d = NumberDistribution::normalized(vec![1.0, 1.0, 2.0]).unwrap();
        assert_eq!(d.probs(), &[0.25, 0.25, 0.5]);
        assert!((d.mean() - 1.25_f64).abs() < 1e-15);
        assert!(d.resized(2).is_err());
        assert_eq!(d.resized(5).unwrap().len(), 5);
    }

    #[test]
    fn single_precision_state() {
        let rho = DensityMatrix::<f32>::new(CMatrix::from_diagonal(&DVector::from_vec(vec![
            Complex::new(0.5f32, 0.0),
            Complex::new(0.5, 0.0),
        ])))
        .unwrap();
        assert!((rho.von_neumann_entropy() - 2f32.ln()).abs() < 1e-6);
    }
}
