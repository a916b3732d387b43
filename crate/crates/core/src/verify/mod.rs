//! Verification harnesses, sweep tables and the maximal non-Gaussianity search.
//!
//! All randomness is drawn from ChaCha streams derived from `(seed, stream,
//! index)`, so every instance is reproducible on its own and results do not
//! depend on how instances are scheduled across threads.

mod search;
mod sweep;
mod theorem;

use num_traits::Num;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use search::{project_energy_simplex, random_target_baseline, search_max_ng, SearchConfig, SearchResult, TIE_TOL};
pub use sweep::{sweep_fig1, Panel, SweepRow, SweepTable};
pub use theorem::{
    random_classical_direction, verify_second_order, verify_theorem1, verify_theorem2, SecondOrderConfig,
    Theorem1Config, Theorem2Config, Theorem2Family, DIRECTION_LEVELS,
};

/// Named random sub-streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Theorem1 = 1,
    Theorem2 = 2,
    SecondOrder = 3,
    SearchRestart = 4,
    RandomTarget = 5,
}

/// Generator for instance `index` of `stream` under `seed`.
pub fn substream(seed: u64, stream: Stream, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((stream as u64) << 40) | index);
    rng
}

/// Purity `1/(2n+1)` of a thermal state.
pub fn thermal_purity<T: Num + Copy>(n: T) -> T {
    let two = T::one() + T::one();
    T::one() / (two * n + T::one())
}

/// Coefficient `2 mu^2 / (1 - mu^2)` multiplying `dn^2` in the energy-corrected
/// QFI identity; equals `1/(2n(n+1))` for a thermal state.
pub fn energy_correction_coefficient<T: Num + Copy>(purity: T) -> T {
    let two = T::one() + T::one();
    two * purity * purity / (T::one() - purity * purity)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckKind {
    /// Passes when every residual is within the tolerance.
    Equality,
    /// Passes when every slack is at least `-tolerance`.
    Inequality,
}

/// One verified instance.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceRecord {
    pub index: usize,
    /// Short description, e.g. the coherence indices.
    pub label: String,
    pub d_q: f64,
    pub delta: f64,
    pub dn: f64,
    /// Absolute residual (equality checks) or slack (inequality checks).
    pub residual: f64,
    /// Residual divided by `d_q` when `d_q > 0`.
    pub relative: f64,
}

/// Outcome of a verification harness.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub name: &'static str,
    pub kind: CheckKind,
    pub instances: usize,
    /// Residuals (equality) or slacks (inequality), one per instance.
    pub residuals: Vec<f64>,
    pub records: Vec<InstanceRecord>,
    /// Largest checked residual (equality) or smallest slack (inequality).
    pub worst: f64,
    pub tolerance: f64,
    /// Whether the tolerance applies to `relative` rather than `residual`.
    pub relative_tolerance: bool,
    pub passed: bool,
    pub seed: u64,
    /// Draws rejected for leaving the state space.
    pub rejected: usize,
    pub config: String,
}

impl VerificationReport {
    pub(crate) fn build(
        name: &'static str,
        kind: CheckKind,
        records: Vec<InstanceRecord>,
        tolerance: f64,
        relative_tolerance: bool,
        seed: u64,
        rejected: usize,
        config: String,
    ) -> Self {
        let checked = |r: &InstanceRecord| if relative_tolerance { r.relative } else { r.residual };
        let (worst, passed) = match kind {
            CheckKind::Equality => {
                let worst = records.iter().map(|r| checked(r).abs()).fold(0.0, f64::max);
                (worst, worst <= tolerance)
            }
            CheckKind::Inequality => {
                let worst = records.iter().map(checked).fold(f64::INFINITY, f64::min);
                let worst = if records.is_empty() { 0.0 } else { worst };
                (worst, worst >= -tolerance)
            }
        };
        Self {
            name,
            kind,
            instances: records.len(),
            residuals: records.iter().map(|r| r.residual).collect(),
            records,
            worst,
            tolerance,
            relative_tolerance,
            passed,
            seed,
            rejected,
            config,
        }
    }

    /// Largest absolute residual, regardless of the check kind.
    pub fn max_abs_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |a, r| a.max(r.abs()))
    }

    /// One-line summary.
    pub fn summary(&self) -> String {
        let what = match (self.kind, self.relative_tolerance) {
            (CheckKind::Equality, true) => "max relative residual",
            (CheckKind::Equality, false) => "max abs residual",
            (CheckKind::Inequality, true) => "min relative slack",
            (CheckKind::Inequality, false) => "min slack",
        };
        format!(
            "{}: {} instances, {what} {:.3e} (tolerance {:.1e}), rejected {}, seed {} -> {}",
            self.name,
            self.instances,
            self.worst,
            self.tolerance,
            self.rejected,
            self.seed,
            if self.passed { "PASS" } else { "FAIL" }
        )
    }
}
