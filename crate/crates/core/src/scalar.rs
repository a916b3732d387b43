//! Scalar abstraction for the numerical core.
//!
//! Everything that touches a density matrix is generic over [`Real`], which is
//! implemented for `f32` and `f64`. Complex entries are `Complex<T>`.

use std::fmt;

use nalgebra::{Complex, RealField};
use num_traits::{FromPrimitive, ToPrimitive};

/// Real scalar usable by the Fock-space routines.
pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    /// Smallest tolerance that is meaningful at this precision.
    const TOLERANCE_FLOOR: f64;

    /// Converts an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// A tolerance, floored at [`Real::TOLERANCE_FLOOR`].
    #[inline]
    fn tol(x: f64) -> Self {
        Self::lit(x.max(Self::TOLERANCE_FLOOR))
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    const TOLERANCE_FLOOR: f64 = 0.0;
}

impl Real for f32 {
    const TOLERANCE_FLOOR: f64 = 1e-5;
}

#[inline]
pub(crate) fn cplx<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

#[inline]
pub(crate) fn real<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

/// `r·e^{iθ}`.
#[inline]
pub(crate) fn polar<T: Real>(r: T, theta: T) -> Complex<T> {
    Complex::new(r * theta.cos(), r * theta.sin())
}

/// `x log x` with the convention `0 log 0 = 0`.
#[inline]
pub(crate) fn xlogx<T: Real>(x: T) -> T {
    if x > T::zero() {
        x * x.ln()
    } else {
        T::zero()
    }
}
