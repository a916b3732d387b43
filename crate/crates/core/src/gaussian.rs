//! Gaussian states in the Fock basis, covariance data, and reference states.
//!
//! Conventions:
//!
//! * quadratures `q = (a + a^dag)/sqrt 2`, `p = (a - a^dag)/(i sqrt 2)`, so the
//!   vacuum has `sigma = I/2`;
//! * squeezing `S(xi) = exp{(xi^* a^2 - xi a^dag^2)/2}`, which for real
//!   `xi = r` gives the squeezed vacuum `sigma = diag(e^{-2r}, e^{2r})/2`
//!   (the `q` quadrature is the squeezed one);
//! * displacement `D(alpha) = exp{alpha a^dag - alpha^* a}`, shifting
//!   `(<q>, <p>)` by `sqrt 2 (Re alpha, Im alpha)`.
//!
//! Rotations act trivially on a thermal core, so displacement and squeezing
//! are enough to reach every single-mode Gaussian state.

use nalgebra::{Complex, ComplexField, Matrix2, Vector2};

use crate::error::{Error, Result};
use crate::fock::{guard_band, DensityMatrix, NumberDistribution, OperatorMatrix, DEFAULT_DIM, TRUNCATION_TOL};
use crate::scalar::{cplx, polar, real, xlogx, Real};
use crate::spectral::{unitary_exp, CMatrix};

/// Tail weight `(n/(1+n))^dim/(1+n)` a thermal box may drop.
pub const THERMAL_TAIL_TOL: f64 = 1e-12;
/// Slack on the uncertainty relation `det sigma >= 1/4`.
pub const UNCERTAINTY_TOL: f64 = 1e-8;
/// Unitarity defect allowed on the lower 90% of the box.
pub const UNITARITY_TOL: f64 = 1e-8;
/// Largest squeezing magnitude accepted in [`GaussianParams`].
pub const MAX_SQUEEZING: f64 = 1.0;

/// Thermal occupancy, complex squeezing and complex displacement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianParams<T: Real = f64> {
    pub n_bar: T,
    pub xi: Complex<T>,
    pub alpha: Complex<T>,
}

impl<T: Real> GaussianParams<T> {
    pub fn new(n_bar: T, xi: Complex<T>, alpha: Complex<T>) -> Result<Self> {
        if !(n_bar >= T::zero()) || !n_bar.is_finite() {
            return Err(Error::bad_spec("gaussian", format!("n_bar = {n_bar} must be finite and >= 0")));
        }
        if xi.modulus() > T::lit(MAX_SQUEEZING) + T::tol(1e-12) {
            return Err(Error::bad_spec(
                "gaussian",
                format!("|xi| = {} exceeds {MAX_SQUEEZING}", xi.modulus()),
            ));
        }
        if !alpha.re.is_finite() || !alpha.im.is_finite() {
            return Err(Error::bad_spec("gaussian", "displacement must be finite"));
        }
        Ok(Self { n_bar, xi, alpha })
    }

    pub fn thermal(n_bar: T) -> Result<Self> {
        Self::new(n_bar, cplx(T::zero(), T::zero()), cplx(T::zero(), T::zero()))
    }

    /// Covariance data of the state these parameters describe.
    pub fn covariance(&self) -> CovarianceData<T> {
        let m = squeezing_symplectic(self.xi);
        let nu = self.n_bar + T::lit(0.5);
        let sigma = m * m.transpose() * nu;
        let s2 = T::lit(2.0).sqrt();
        let mean = Vector2::new(s2 * self.alpha.re, s2 * self.alpha.im);
        CovarianceData { sigma, mean }
    }
}

/// Symmetric 2x2 quadrature covariance and mean vector `(<q>, <p>)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceData<T: Real = f64> {
    pub sigma: Matrix2<T>,
    pub mean: Vector2<T>,
}

impl<T: Real> CovarianceData<T> {
    pub fn new(sigma: Matrix2<T>, mean: Vector2<T>) -> Result<Self> {
        if (sigma[(0, 1)] - sigma[(1, 0)]).abs() > T::tol(1e-12) {
            return Err(Error::bad_spec("gaussian", "covariance matrix is not symmetric"));
        }
        if !(sigma[(0, 0)] > T::zero() && sigma[(1, 1)] > T::zero()) {
            return Err(Error::bad_spec("gaussian", "covariance diagonal must be positive"));
        }
        let cov = Self { sigma, mean };
        let det = cov.det();
        if det < T::lit(0.25) - T::tol(UNCERTAINTY_TOL) {
            return Err(Error::UncertaintyViolation { det: det.as_f64() });
        }
        Ok(cov)
    }

    pub fn det(&self) -> T {
        self.sigma.determinant()
    }

    /// Symplectic eigenvalue `sqrt(det sigma)`.
    pub fn symplectic_eigenvalue(&self) -> T {
        self.det().max(T::zero()).sqrt()
    }
}

/// `p_k = n^k/(1+n)^{k+1}` on `dim` levels, renormalized over the box.
pub fn thermal_distribution<T: Real>(n_bar: T, dim: usize) -> Result<NumberDistribution<T>> {
    if !(n_bar >= T::zero()) || !n_bar.is_finite() {
        return Err(Error::bad_spec("gaussian", format!("thermal occupancy {n_bar} must be >= 0")));
    }
    if dim == 0 {
        return Err(Error::bad_spec("gaussian", "empty box"));
    }
    let one = T::one();
    let ratio = n_bar / (one + n_bar);
    let tail = ratio.powi(dim as i32) / (one + n_bar);
    if tail > T::tol(THERMAL_TAIL_TOL) {
        return Err(Error::TruncationLeak {
            module: "gaussian",
            what: "thermal tail beyond the box",
            value: tail.as_f64(),
            bound: THERMAL_TAIL_TOL,
        });
    }
    let mut probs = Vec::with_capacity(dim);
    let mut pk = one / (one + n_bar);
    for _ in 0..dim {
        probs.push(pk);
        pk *= ratio;
    }
    let total = probs.iter().copied().fold(T::zero(), |a, b| a + b);
    log::debug!("thermal n={n_bar} dim={dim}: renormalization defect {}", (one - total).as_f64());
    NumberDistribution::normalized(probs)
}

/// Smallest box that holds a thermal state with `n_bar` quanta within the
/// tail guard.
pub fn thermal_box<T: Real>(n_bar: T) -> usize {
    let n = n_bar.as_f64();
    if !(n > 0.0) {
        return 1;
    }
    let ratio = n / (1.0 + n);
    let mut dim = ((THERMAL_TAIL_TOL * (1.0 + n)).ln() / ratio.ln()).ceil().max(1.0) as usize;
    while ratio.powi(dim as i32) / (1.0 + n) > THERMAL_TAIL_TOL {
        dim += 1;
    }
    dim
}

/// Box size, at least the default and a multiple of 50, expected to hold the
/// Gaussian state of `params` within the truncation guards.
///
/// The number distribution is modelled as thermal with the occupancy of the
/// anti-squeezed quadrature plus the coherent amplitude, so this is an
/// estimate; construction still checks the guards.
pub fn suggested_dim<T: Real>(params: &GaussianParams<T>) -> usize {
    let n = params.n_bar.as_f64();
    let r = params.xi.norm_sqr().as_f64().sqrt();
    let n_eff = (n + 0.5) * (2.0 * r).exp() - 0.5 + params.alpha.norm_sqr().as_f64();
    let mut dim = DEFAULT_DIM.max(thermal_box(n));
    if n_eff > 0.0 {
        let ratio = n_eff / (1.0 + n_eff);
        let band = (TRUNCATION_TOL.ln() / (0.9 * ratio.ln())).ceil() as usize;
        dim = dim.max(band);
    }
    dim.div_ceil(50) * 50
}

/// Thermal (chaotic) state with `n_bar` mean quanta.
pub fn thermal_state<T: Real>(n_bar: T, dim: usize) -> Result<DensityMatrix<T>> {
    DensityMatrix::from_distribution(&thermal_distribution(n_bar, dim)?)
}

/// Entropy of a single-mode Gaussian state with symplectic eigenvalue `x`:
/// `h(x) = (x+1/2) log(x+1/2) - (x-1/2) log(x-1/2)`, in nats.
pub fn h_function<T: Real>(x: T) -> Result<T> {
    let half = T::lit(0.5);
    if x < half - T::tol(1e-9) || !x.is_finite() {
        return Err(Error::DomainError(format!("h(x) needs x >= 1/2, got {x}")));
    }
    let x = x.max(half);
    Ok(xlogx(x + half) - xlogx(x - half))
}

/// Quadrature covariance and means of `rho`.
///
/// Moments are evaluated with the untruncated operator algebra
/// (`<a a^dag> = <a^dag a> + 1`) from the entries `rho_{k,k-1}`,
/// `rho_{k,k-2}` and `rho_{kk}`; the truncation guard makes the boundary
/// correction negligible.
pub fn covariance_of<T: Real>(rho: &DensityMatrix<T>) -> Result<CovarianceData<T>> {
    let m = rho.matrix();
    let n = rho.dim();
    let mut a1 = cplx(T::zero(), T::zero());
    let mut a2 = cplx(T::zero(), T::zero());
    for k in 1..n {
        a1 += m[(k, k - 1)] * real(T::from_usize_lossy(k).sqrt());
        if k >= 2 {
            a2 += m[(k, k - 2)] * real(T::from_usize_lossy(k * (k - 1)).sqrt());
        }
    }
    let number = rho.mean_photon_number();
    let half = T::lit(0.5);
    let s2 = T::lit(2.0).sqrt();
    let mq = s2 * a1.re;
    let mp = s2 * a1.im;
    let qq = number + half + a2.re - mq * mq;
    let pp = number + half - a2.re - mp * mp;
    let qp = a2.im - mq * mp;
    CovarianceData::new(Matrix2::new(qq, qp, qp, pp), Vector2::new(mq, mp))
}

/// Single-mode Williamson form `sigma = sqrt(det sigma) S S^T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Williamson<T: Real = f64> {
    pub n_bar: T,
    /// Symmetric positive-definite symplectic factor.
    pub symplectic: Matrix2<T>,
}

/// Returns `n_bar = sqrt(det sigma) - 1/2` and the principal square root of
/// `sigma / sqrt(det sigma)`.
pub fn williamson_1mode<T: Real>(cov: &CovarianceData<T>) -> Williamson<T> {
    let nu = cov.symplectic_eigenvalue().max(T::lit(0.5));
    let a = cov.sigma / nu;
    // For a 2x2 SPD matrix with unit determinant, sqrt(A) = (A + I)/sqrt(tr A + 2).
    let s = (a + Matrix2::identity()) / (a.trace() + T::lit(2.0)).sqrt();
    Williamson {
        n_bar: nu - T::lit(0.5),
        symplectic: s,
    }
}

/// Heisenberg-picture action of `S(xi)` on `(q, p)`:
/// `cosh r I - sinh r [[cos t, sin t], [sin t, -cos t]]` for `xi = r e^{it}`.
pub fn squeezing_symplectic<T: Real>(xi: Complex<T>) -> Matrix2<T> {
    let r = xi.modulus();
    let t = xi.im.atan2(xi.re);
    let (ch, sh) = (r.cosh(), r.sinh());
    let (c, s) = (t.cos(), t.sin());
    Matrix2::new(ch - sh * c, -sh * s, -sh * s, ch + sh * c)
}

/// Inverse of [`squeezing_symplectic`] on symmetric positive symplectic matrices.
pub fn squeezing_from_symplectic<T: Real>(s: &Matrix2<T>) -> Complex<T> {
    let half = T::lit(0.5);
    let r = (s.trace() * half).max(T::one()).acosh();
    if r == T::zero() {
        return cplx(T::zero(), T::zero());
    }
    let t = (-s[(0, 1)]).atan2((s[(1, 1)] - s[(0, 0)]) * half);
    polar(r, t)
}

/// `S(xi) = exp{(xi^* a^2 - xi a^dag^2)/2}` on the box.
pub fn squeeze_operator<T: Real>(xi: Complex<T>, dim: usize) -> CMatrix<T> {
    let half = real(T::lit(0.5));
    let g = CMatrix::from_fn(dim, dim, |i, j| {
        if j == i + 2 {
            // a^2 |j> = sqrt(j(j-1)) |j-2>
            xi.conj() * real(T::from_usize_lossy(j * (j - 1)).sqrt()) * half
        } else if i == j + 2 {
            -xi * real(T::from_usize_lossy(i * (i - 1)).sqrt()) * half
        } else {
            real(T::zero())
        }
    });
    unitary_exp(&g)
}

/// `D(alpha) = exp{alpha a^dag - alpha^* a}` on the box.
pub fn displacement_operator<T: Real>(alpha: Complex<T>, dim: usize) -> CMatrix<T> {
    let g = CMatrix::from_fn(dim, dim, |i, j| {
        if i == j + 1 {
            alpha * real(T::from_usize_lossy(i).sqrt())
        } else if j == i + 1 {
            -alpha.conj() * real(T::from_usize_lossy(j).sqrt())
        } else {
            real(T::zero())
        }
    });
    unitary_exp(&g)
}

/// `D(alpha) S(xi)`, checked for unitarity on the lower 90% of the box.
pub fn symplectic_unitary<T: Real>(params: &GaussianParams<T>, dim: usize) -> Result<OperatorMatrix<T>> {
    let zero = cplx(T::zero(), T::zero());
    let mut u = CMatrix::identity(dim, dim);
    if params.xi != zero {
        u = squeeze_operator(params.xi, dim);
    }
    if params.alpha != zero {
        u = displacement_operator(params.alpha, dim) * u;
    }
    let keep = dim - guard_band(dim);
    let uu = &u * u.adjoint();
    let mut defect = T::zero();
    for j in 0..keep {
        for i in 0..keep {
            let target = if i == j { T::one() } else { T::zero() };
            defect = defect.max((uu[(i, j)] - real(target)).modulus());
        }
    }
    if defect > T::tol(UNITARITY_TOL) {
        return Err(Error::TruncationLeak {
            module: "gaussian",
            what: "unitarity defect",
            value: defect.as_f64(),
            bound: UNITARITY_TOL,
        });
    }
    OperatorMatrix::new(u)
}

/// `D(alpha) S(xi) nu S(xi)^dag D(alpha)^dag` with `nu` thermal.
pub fn gaussian_state<T: Real>(params: &GaussianParams<T>, dim: usize) -> Result<DensityMatrix<T>> {
    let core = thermal_state(params.n_bar, dim)?;
    let zero = cplx(T::zero(), T::zero());
    if params.xi == zero && params.alpha == zero {
        return Ok(core);
    }
    core.conjugated_by(&symplectic_unitary(params, dim)?)
}

/// Parameters of the Gaussian state sharing `cov`.
pub fn params_from_covariance<T: Real>(cov: &CovarianceData<T>) -> Result<GaussianParams<T>> {
    let w = williamson_1mode(cov);
    let xi = squeezing_from_symplectic(&w.symplectic);
    let inv_s2 = T::one() / T::lit(2.0).sqrt();
    let alpha = cplx(cov.mean.x * inv_s2, cov.mean.y * inv_s2);
    GaussianParams::new(w.n_bar, xi, alpha)
}

/// The Gaussian state with the same covariance matrix and means as `rho`.
pub fn reference_gaussian<T: Real>(rho: &DensityMatrix<T>) -> Result<DensityMatrix<T>> {
    let params = params_from_covariance(&covariance_of(rho)?)?;
    gaussian_state(&params, rho.dim())
}
