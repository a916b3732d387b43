use thiserror::Error;

/// Failure of a numerical guard or a malformed request.
///
/// Every variant names the module and the invariant it protects, so a single
/// line is enough to diagnose a failure from the command line.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("fock_core: matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("{module}: dimension mismatch ({left} vs {right})")]
    DimensionMismatch {
        module: &'static str,
        left: usize,
        right: usize,
    },

    #[error("fock_core: hermiticity violated (max |A - A^H| = {deviation:e})")]
    HermiticityViolation { deviation: f64 },

    #[error("fock_core: unit trace violated (trace = {trace})")]
    TraceViolation { trace: f64 },

    #[error("{module}: positivity violated (min eigenvalue = {min_eigenvalue:e})")]
    NegativityViolation {
        module: &'static str,
        min_eigenvalue: f64,
    },

    #[error("{module}: truncation leak ({what} = {value:e} exceeds {bound:e})")]
    TruncationLeak {
        module: &'static str,
        what: &'static str,
        value: f64,
        bound: f64,
    },

    #[error("gaussian: domain error ({0})")]
    DomainError(String),

    #[error("gaussian: uncertainty relation violated (det sigma = {det})")]
    UncertaintyViolation { det: f64 },

    #[error("nongauss: support violated (weight {weight:e} outside supp tau; relative entropy is infinite)")]
    SupportViolation { weight: f64 },

    #[error("{module}: division guard (p[{index}] vanishes but carries dp = {dp:e})")]
    DivisionGuard {
        module: &'static str,
        index: usize,
        dp: f64,
    },

    #[error("{module}: bad spec ({reason})")]
    BadSpec {
        module: &'static str,
        reason: String,
    },

    #[error("{module}: invalid distribution ({reason})")]
    InvalidDistribution {
        module: &'static str,
        reason: String,
    },

    #[error("verify: infeasible constraint ({reason})")]
    InfeasibleConstraint { reason: String },
}

impl Error {
    pub(crate) fn bad_spec(module: &'static str, reason: impl Into<String>) -> Self {
        Error::BadSpec {
            module,
            reason: reason.into(),
        }
    }

    /// Module that raised the error.
    pub fn module(&self) -> &'static str {
        match self {
            Error::NotSquare { .. }
            | Error::HermiticityViolation { .. }
            | Error::TraceViolation { .. } => "fock_core",
            Error::DomainError(_) | Error::UncertaintyViolation { .. } => "gaussian",
            Error::SupportViolation { .. } => "nongauss",
            Error::InfeasibleConstraint { .. } => "verify",
            Error::DimensionMismatch { module, .. }
            | Error::NegativityViolation { module, .. }
            | Error::TruncationLeak { module, .. }
            | Error::DivisionGuard { module, .. }
            | Error::BadSpec { module, .. }
            | Error::InvalidDistribution { module, .. } => module,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
