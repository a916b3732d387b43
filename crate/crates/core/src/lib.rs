//! Non-Gaussianity of perturbed single-mode Gaussian states.
//!
//! States live in a truncated Fock basis. The crate computes the
//! relative-entropy non-Gaussianity `delta[rho] = h(sqrt(det sigma)) - S(rho)`,
//! fidelity and quantum Fisher information, builds eigenvalue, mixing and
//! coherence perturbations of thermal states, and checks how non-Gaussianity
//! relates to the QFI distance along them.
//!
//! The numerical core ([`fock`], [`gaussian`], [`nongauss`], [`perturb`],
//! [`metric`]) is generic over [`Real`] (`f32` or `f64`); the aliases below
//! pin the common double-precision types. The [`verify`] harnesses work in
//! `f64`. All entropies are in nats.

pub mod error;
pub mod fock;
pub mod gaussian;
pub mod metric;
pub mod nongauss;
pub mod perturb;
pub mod scalar;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::Real;

pub use fock::{mode_operators, ModeOperators};
pub use gaussian::{
    covariance_of, gaussian_state, h_function, reference_gaussian, symplectic_unitary, thermal_state, williamson_1mode,
};
pub use metric::{bures_distance_sq, classical_fisher_half, fidelity, qfi_distance, qfi_finite_difference};
pub use nongauss::{non_gaussianity, relative_entropy};
pub use perturb::{
    coherence_perturbation, concavity_bound, convex_combination, ng_exact_diagonal, ng_second_order,
    ng_second_order_target, target_distribution, TargetSpec,
};

pub type DensityMatrix = fock::DensityMatrix<f64>;
pub type DensityMatrix32 = fock::DensityMatrix<f32>;
pub type NumberDistribution = fock::NumberDistribution<f64>;
pub type NumberDistribution32 = fock::NumberDistribution<f32>;
pub type OperatorMatrix = fock::OperatorMatrix<f64>;
pub type OperatorMatrix32 = fock::OperatorMatrix<f32>;
pub type GaussianParams = gaussian::GaussianParams<f64>;
pub type GaussianParams32 = gaussian::GaussianParams<f32>;
pub type CovarianceData = gaussian::CovarianceData<f64>;
pub type CovarianceData32 = gaussian::CovarianceData<f32>;
pub type TangentDirection = metric::TangentDirection<f64>;
pub type TangentDirection32 = metric::TangentDirection<f32>;
pub type Complex = nalgebra::Complex<f64>;
