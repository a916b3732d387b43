//! Hermitian eigendecomposition and the matrix functions built on it.
//!
//! Every matrix function in the crate (log, square root, exponential of a
//! Hermitian generator) goes through [`hermitian_eigen`].

use nalgebra::{Complex, ComplexField, DMatrix, DVector, SymmetricEigen};

use crate::scalar::{polar, real, Real};

pub type CMatrix<T> = DMatrix<Complex<T>>;

/// `A = V diag(values) V^H`.
#[derive(Debug, Clone)]
pub struct HermitianEigen<T: Real> {
    pub values: DVector<T>,
    /// Eigenvectors as columns. `None` means the identity (input was diagonal).
    pub vectors: Option<CMatrix<T>>,
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Only the lower triangle is read. Exactly diagonal inputs skip the
/// iterative solver.
pub fn hermitian_eigen<T: Real>(m: &CMatrix<T>) -> HermitianEigen<T> {
    assert!(m.is_square(), "hermitian_eigen needs a square matrix");
    let n = m.nrows();
    if is_diagonal(m) {
        return HermitianEigen {
            values: DVector::from_fn(n, |i, _| m[(i, i)].re),
            vectors: None,
        };
    }
    let eig = SymmetricEigen::new(m.clone());
    HermitianEigen {
        values: eig.eigenvalues,
        vectors: Some(eig.eigenvectors),
    }
}

fn is_diagonal<T: Real>(m: &CMatrix<T>) -> bool {
    let zero = Complex::new(T::zero(), T::zero());
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            if i != j && m[(i, j)] != zero {
                return false;
            }
        }
    }
    true
}

impl<T: Real> HermitianEigen<T> {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn min_value(&self) -> T {
        self.values.iter().copied().fold(T::max_value().unwrap(), |a, b| a.min(b))
    }

    /// `V diag(f(values)) V^H`.
    pub fn map(&self, f: impl Fn(T) -> T) -> CMatrix<T> {
        self.map_complex(|x| real(f(x)))
    }

    pub fn map_complex(&self, f: impl Fn(T) -> Complex<T>) -> CMatrix<T> {
        let n = self.dim();
        let fv: Vec<Complex<T>> = self.values.iter().map(|&x| f(x)).collect();
        match &self.vectors {
            None => CMatrix::from_fn(n, n, |i, j| if i == j { fv[i] } else { real(T::zero()) }),
            Some(v) => {
                let mut scaled = v.clone();
                for (j, mut col) in scaled.column_iter_mut().enumerate() {
                    col *= fv[j];
                }
                scaled * v.adjoint()
            }
        }
    }

    /// `V^H A V`: the matrix `a` expressed in the eigenbasis.
    pub fn to_eigenbasis(&self, a: &CMatrix<T>) -> CMatrix<T> {
        match &self.vectors {
            None => a.clone(),
            Some(v) => v.adjoint() * a * v,
        }
    }

    /// `<v_i| a |v_i>` for every eigenvector.
    pub fn diagonal_in_eigenbasis(&self, a: &CMatrix<T>) -> Vec<T> {
        match &self.vectors {
            None => (0..self.dim()).map(|i| a[(i, i)].re).collect(),
            Some(v) => {
                let av = a * v;
                (0..self.dim())
                    .map(|i| v.column(i).dotc(&av.column(i)).re)
                    .collect()
            }
        }
    }
}

/// `exp(G)` for an anti-Hermitian generator `G`, computed as `exp(-iH)` with
/// `H = iG` Hermitian. The result is unitary to machine precision.
pub fn unitary_exp<T: Real>(generator: &CMatrix<T>) -> CMatrix<T> {
    let i = Complex::new(T::zero(), T::one());
    let h = generator.map(|z| z * i);
    let h = hermitian_part(&h);
    hermitian_eigen(&h).map_complex(|lambda| polar(T::one(), -lambda))
}

/// `(A + A^H) / 2`.
pub fn hermitian_part<T: Real>(a: &CMatrix<T>) -> CMatrix<T> {
    let half = real(T::lit(0.5));
    (a + a.adjoint()).map(|z| z * half)
}

/// `max |A_ij - conj(A_ji)|`.
pub fn hermiticity_defect<T: Real>(a: &CMatrix<T>) -> T {
    let n = a.nrows();
    let mut worst = T::zero();
    for j in 0..n {
        for i in j..n {
            let d = (a[(i, j)] - a[(j, i)].conj()).modulus();
            if d > worst {
                worst = d;
            }
        }
    }
    worst
}

/// `U A U^H`.
pub fn conjugate<T: Real>(u: &CMatrix<T>, a: &CMatrix<T>) -> CMatrix<T> {
    u * a * u.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn diagonal_shortcut_keeps_values() {
        let m = CMatrix::from_diagonal(&DVector::from_vec(vec![c(0.2, 0.0), c(0.8, 0.0)]));
        let e = hermitian_eigen(&m);
        assert!(e.vectors.is_none());
        assert_eq!(e.values.as_slice(), &[0.2, 0.8]);
    }

    #[test]
    fn map_reconstructs_matrix() {
        let m = CMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(2.0, 0.0)]);
        let e = hermitian_eigen(&m);
        let back = e.map(|x| x);
        assert!((back - &m).camax() < 1e-12);
        let mut vals: Vec<f64> = e.values.iter().copied().collect();
        vals.sort_by(f64::total_cmp);
        assert!((vals[0] - 1.0).abs() < 1e-12 && (vals[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn exp_of_pauli_generator_is_rotation() {
        // G = -i t sigma_y, exp(G) = cos t I - i sin t sigma_y
        let t = 0.4;
        let g = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(-t, 0.0), c(t, 0.0), c(0.0, 0.0)]);
        let u = unitary_exp(&g);
        let want = CMatrix::from_row_slice(
            2,
            2,
            &[c(t.cos(), 0.0), c(-t.sin(), 0.0), c(t.sin(), 0.0), c(t.cos(), 0.0)],
        );
        assert!((u - want).camax() < 1e-12);
    }
}
