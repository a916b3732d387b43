//! Perturbation families around a thermal state.
//!
//! Three kinds of perturbation are built here:
//!
//! * eigenvalue ("classical") perturbations `p_k -> p_k + dp_k`, with the
//!   second-order non-Gaussianity `sum dp^2/(2p) - dn^2/(2n(n+1))`;
//! * finite convex mixtures `q = (1-eps) p + eps mu` with a target number
//!   distribution, their exact non-Gaussianity and the concavity bound;
//! * Fock-basis coherences `|j><k|` with `|j - k| >= 3`, which leave every
//!   first and second quadrature moment untouched.
//!
//! Because non-Gaussianity is invariant under Gaussian unitaries, a state
//! diagonal in the Fock basis stands for its whole symplectic orbit, and the
//! diagonal routines work on number distributions directly.

use nalgebra::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

use crate::error::{Error, Result};
use crate::fock::{DensityMatrix, NumberDistribution};
use crate::gaussian::{h_function, thermal_distribution, THERMAL_TAIL_TOL};
use crate::metric::classical_fisher_half;
use crate::nongauss::CLAMP_TOL;
use crate::scalar::{Real, real};

/// Tolerance on `sum dp = 0` for raw perturbation vectors.
pub const ZERO_SUM_TOL: f64 = 1e-12;
/// Smallest `|j - k|` for which a coherence leaves the covariance matrix alone.
pub const MIN_COHERENCE_GAP: usize = 3;

/// Target number distribution mixed into the base thermal state.
#[derive(Debug, Clone, PartialEq)]
pub enum TargetSpec<T: Real = f64> {
    /// `mu_k = n^k e^{-n} / k!`
    Poissonian { n_mu: T },
    /// `mu_k = n^k / (1+n)^{k+1}`
    Thermal { n_mu: T },
    /// `mu_k = delta_{k, n}`; `n_mu` must be a non-negative integer.
    Fock { n_mu: T },
    Custom { probs: Vec<T> },
    /// Uniform draw from the simplex on `support` levels. With `mean` set,
    /// the draw is mixed with the vacuum (mean too high) or with
    /// `|support-1>` (mean too low) to hit it exactly.
    RandomSimplex { support: usize, seed: u64, mean: Option<T> },
}

impl<T: Real> TargetSpec<T> {
    pub fn kind(&self) -> &'static str {
        match self {
            TargetSpec::Poissonian { .. } => "poisson",
            TargetSpec::Thermal { .. } => "thermal",
            TargetSpec::Fock { .. } => "fock",
            TargetSpec::Custom { .. } => "custom",
            TargetSpec::RandomSimplex { .. } => "random",
        }
    }
}

/// Integer level of a Fock target.
pub fn fock_level<T: Real>(n_mu: T) -> Result<usize> {
    let n = n_mu.as_f64();
    if !(n >= 0.0) || n.fract() != 0.0 {
        return Err(Error::bad_spec("perturb", "Fock target requires integer n_mu"));
    }
    Ok(n as usize)
}

/// Number distribution of a target on `dim` levels.
pub fn target_distribution<T: Real>(spec: &TargetSpec<T>, dim: usize) -> Result<NumberDistribution<T>> {
    match spec {
        TargetSpec::Poissonian { n_mu } => poisson_distribution(*n_mu, dim),
        TargetSpec::Thermal { n_mu } => thermal_distribution(*n_mu, dim),
        TargetSpec::Fock { n_mu } => {
            let k = fock_level(*n_mu)?;
            if k >= dim {
                return Err(Error::bad_spec("perturb", format!("Fock level {k} outside a box of {dim}")));
            }
            NumberDistribution::delta(k, dim)
        }
        TargetSpec::Custom { probs } => NumberDistribution::new(probs.clone())?.resized(dim),
        TargetSpec::RandomSimplex { support, seed, mean } => {
            if *support == 0 || *support > dim {
                return Err(Error::bad_spec("perturb", format!("random support {support} outside 1..={dim}")));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut mu = random_simplex::<T, _>(*support, &mut rng);
            if let Some(m) = mean {
                mu = match_mean(mu, *m)?;
            }
            mu.resized(dim)
        }
    }
}

/// Poisson weights on `dim` levels, renormalized over the box.
pub fn poisson_distribution<T: Real>(n_mu: T, dim: usize) -> Result<NumberDistribution<T>> {
    if !(n_mu >= T::zero()) || !n_mu.is_finite() {
        return Err(Error::bad_spec("perturb", format!("Poisson mean {n_mu} must be >= 0")));
    }
    if n_mu == T::zero() {
        return NumberDistribution::delta(0, dim);
    }
    let ln_n = n_mu.ln();
    let mut ln_p = -n_mu;
    let mut probs = Vec::with_capacity(dim);
    for k in 0..dim {
        if k > 0 {
            ln_p += ln_n - T::from_usize_lossy(k).ln();
        }
        probs.push(ln_p.exp());
    }
    let total = probs.iter().copied().fold(T::zero(), |a, b| a + b);
    let tail = T::one() - total;
    if tail > T::tol(THERMAL_TAIL_TOL) {
        return Err(Error::TruncationLeak {
            module: "perturb",
            what: "Poisson tail beyond the box",
            value: tail.as_f64(),
            bound: THERMAL_TAIL_TOL,
        });
    }
    log::debug!("poisson n={n_mu} dim={dim}: renormalization defect {}", tail.as_f64());
    NumberDistribution::normalized(probs)
}

/// Uniform sample on the probability simplex over `support` levels
/// (normalized exponential variates).
pub fn random_simplex<T: Real, R: Rng + ?Sized>(support: usize, rng: &mut R) -> NumberDistribution<T> {
    let weights: Vec<T> = (0..support)
        .map(|_| {
            let e: f64 = rng.sample(Exp1);
            T::lit(e.max(f64::MIN_POSITIVE))
        })
        .collect();
    NumberDistribution::normalized(weights).expect("exponential variates are positive")
}

/// Mixes `mu` with the vacuum or with its top level so that its mean is `target`.
pub fn match_mean<T: Real>(mu: NumberDistribution<T>, target: T) -> Result<NumberDistribution<T>> {
    let top = mu.len() - 1;
    let top_t = T::from_usize_lossy(top);
    if !(target >= T::zero()) || target > top_t {
        return Err(Error::InfeasibleConstraint {
            reason: format!("mean {target} not reachable on levels 0..={top}"),
        });
    }
    let m = mu.mean();
    let (w, anchor) = if m > target {
        (T::one() - target / m, 0)
    } else if m < target {
        ((target - m) / (top_t - m), top)
    } else {
        return Ok(mu);
    };
    let mut probs: Vec<T> = mu.probs().iter().map(|&x| (T::one() - w) * x).collect();
    probs[anchor] += w;
    NumberDistribution::normalized(probs)
}

/// `q = (1 - eps) p + eps mu`.
pub fn convex_combination<T: Real>(
    p: &NumberDistribution<T>,
    mu: &NumberDistribution<T>,
    eps: T,
) -> Result<NumberDistribution<T>> {
    if !(eps >= T::zero() && eps <= T::one()) {
        return Err(Error::bad_spec("perturb", format!("mixing weight {eps} outside [0, 1]")));
    }
    if p.len() != mu.len() {
        return Err(Error::DimensionMismatch {
            module: "perturb",
            left: p.len(),
            right: mu.len(),
        });
    }
    let one_minus = T::one() - eps;
    let q: Vec<T> = p
        .probs()
        .iter()
        .zip(mu.probs())
        .map(|(&a, &b)| one_minus * a + eps * b)
        .collect();
    NumberDistribution::normalized(q)
}

/// Exact non-Gaussianity of the Fock-diagonal state with distribution `q`:
/// `h(n + 1/2) - H[q]`.
pub fn ng_exact_diagonal<T: Real>(q: &NumberDistribution<T>) -> Result<T> {
    let delta = h_function(q.mean() + T::lit(0.5))? - q.shannon_entropy();
    if delta < T::zero() && delta >= -T::tol(CLAMP_TOL) {
        return Ok(T::zero());
    }
    Ok(delta)
}

fn check_zero_sum<T: Real>(dp: &[T]) -> Result<()> {
    let sum = dp.iter().copied().fold(T::zero(), |a, b| a + b);
    if sum.abs() > T::tol(ZERO_SUM_TOL) {
        return Err(Error::bad_spec("perturb", format!("perturbation sums to {sum}, not 0")));
    }
    Ok(())
}

/// `dn = sum_k k dp_k`.
pub fn energy_shift<T: Real>(dp: &[T]) -> T {
    dp.iter()
        .enumerate()
        .fold(T::zero(), |acc, (k, &d)| acc + T::from_usize_lossy(k) * d)
}

/// Second-order non-Gaussianity of `p + dp` around a thermal `p` with mean `n_nu`:
/// `sum_k dp_k^2/(2 p_k) - dn^2/(2 n_nu (1 + n_nu))`.
pub fn ng_second_order<T: Real>(p: &NumberDistribution<T>, dp: &[T], n_nu: T) -> Result<T> {
    check_zero_sum(dp)?;
    if !(n_nu > T::zero()) {
        return Err(Error::bad_spec("perturb", "second-order expansion needs n_nu > 0"));
    }
    let fisher = classical_fisher_half(p, dp).map_err(reattribute)?;
    let dn = energy_shift(dp);
    Ok(fisher - dn * dn / (T::lit(2.0) * n_nu * (T::one() + n_nu)))
}

/// Terms of the second-order non-Gaussianity of `(1-eps) p + eps mu`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondOrderTarget<T: Real = f64> {
    /// `sum_k (p_k - mu_k)^2 / (2 p_k)`
    pub classical: T,
    /// `Delta n_mu = sum_k (p_k - mu_k) k`
    pub energy_shift: T,
    /// `eps^2 (classical - Delta n_mu^2 / (2 n_t (1 + n_t)))`
    pub value: T,
}

/// Second-order non-Gaussianity along the direction of a target distribution.
pub fn ng_second_order_target<T: Real>(
    p: &NumberDistribution<T>,
    mu: &NumberDistribution<T>,
    eps: T,
    n_t: T,
) -> Result<SecondOrderTarget<T>> {
    if p.len() != mu.len() {
        return Err(Error::DimensionMismatch {
            module: "perturb",
            left: p.len(),
            right: mu.len(),
        });
    }
    if !(n_t > T::zero()) {
        return Err(Error::bad_spec("perturb", "second-order expansion needs n_t > 0"));
    }
    let diff: Vec<T> = p.probs().iter().zip(mu.probs()).map(|(&a, &b)| a - b).collect();
    let classical = classical_fisher_half(p, &diff).map_err(reattribute)?;
    let shift = energy_shift(&diff);
    let unit = classical - shift * shift / (T::lit(2.0) * n_t * (T::one() + n_t));
    Ok(SecondOrderTarget {
        classical,
        energy_shift: shift,
        value: eps * eps * unit,
    })
}

/// Upper bound on the non-Gaussianity of `(1-eps) thermal(n_t) + eps mu` from
/// the concavity of the Shannon entropy:
/// `h(n_eta + 1/2) - h(n_t + 1/2) + eps (h(n_t + 1/2) - H[mu])`.
pub fn concavity_bound<T: Real>(n_t: T, mu: &NumberDistribution<T>, eps: T) -> Result<T> {
    if !(eps >= T::zero() && eps <= T::one()) {
        return Err(Error::bad_spec("perturb", format!("mixing weight {eps} outside [0, 1]")));
    }
    let half = T::lit(0.5);
    let n_eta = (T::one() - eps) * n_t + eps * mu.mean();
    let h_t = h_function(n_t + half)?;
    Ok(h_function(n_eta + half)? - h_t + eps * (h_t - mu.shannon_entropy()))
}

/// `tau + eps (c |j><k| + c^* |k><j|)`, validated as a state.
///
/// For `|j - k| >= 3` the quadrature means and covariance matrix are those of
/// `tau`. Positivity is checked on the spectrum; an amplitude past the
/// positivity radius gives [`Error::NegativityViolation`].
pub fn coherence_perturbation<T: Real>(
    tau: &DensityMatrix<T>,
    j: usize,
    k: usize,
    c: Complex<T>,
    eps: T,
) -> Result<DensityMatrix<T>> {
    if j.abs_diff(k) < MIN_COHERENCE_GAP {
        return Err(Error::bad_spec(
            "perturb",
            format!("coherence |{j}><{k}| would move the covariance matrix (need |j-k| >= 3)"),
        ));
    }
    let dim = tau.dim();
    if j >= dim || k >= dim {
        return Err(Error::bad_spec("perturb", format!("coherence ({j}, {k}) outside a box of {dim}")));
    }
    let mut m = tau.matrix().clone();
    m[(j, k)] += c * real(eps);
    m[(k, j)] += c.conj() * real(eps);
    DensityMatrix::new(m).map_err(reattribute)
}

fn reattribute(e: Error) -> Error {
    match e {
        Error::NegativityViolation { min_eigenvalue, .. } => Error::NegativityViolation {
            module: "perturb",
            min_eigenvalue,
        },
        Error::DivisionGuard { index, dp, .. } => Error::DivisionGuard {
            module: "perturb",
            index,
            dp,
        },
        other => other,
    }
}

/// Which way a [`PerturbationFamily`] leaves the thermal state.
#[derive(Debug, Clone, PartialEq)]
pub enum Direction<T: Real = f64> {
    /// Zero-sum change of the number distribution per unit `eps`.
    Raw(Vec<T>),
    /// Convex mixing towards a target.
    Target(TargetSpec<T>),
}

/// Thermal state with `n_t` quanta moved by `eps` along a direction.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationFamily<T: Real = f64> {
    pub n_t: T,
    pub direction: Direction<T>,
    pub epsilon: T,
}

impl<T: Real> PerturbationFamily<T> {
    pub fn base(&self, dim: usize) -> Result<NumberDistribution<T>> {
        thermal_distribution(self.n_t, dim)
    }

    /// `dp` per unit `eps`, on `dim` levels.
    pub fn tangent(&self, dim: usize) -> Result<Vec<T>> {
        let p = self.base(dim)?;
        match &self.direction {
            Direction::Raw(dp) => {
                check_zero_sum(dp)?;
                let mut dp = dp.clone();
                if dp.len() > dim {
                    return Err(Error::bad_spec("perturb", "direction longer than the box"));
                }
                dp.resize(dim, T::zero());
                Ok(dp)
            }
            Direction::Target(spec) => {
                let mu = target_distribution(spec, dim)?;
                Ok(mu.probs().iter().zip(p.probs()).map(|(&m, &b)| m - b).collect())
            }
        }
    }

    /// Perturbed number distribution.
    pub fn distribution(&self, dim: usize) -> Result<NumberDistribution<T>> {
        let p = self.base(dim)?;
        match &self.direction {
            Direction::Target(spec) => convex_combination(&p, &target_distribution(spec, dim)?, self.epsilon),
            Direction::Raw(_) => {
                let dp = self.tangent(dim)?;
                let q: Vec<T> = p.probs().iter().zip(&dp).map(|(&a, &d)| a + self.epsilon * d).collect();
                if let Some((k, v)) = q.iter().enumerate().find(|(_, v)| **v < T::zero()) {
                    return Err(Error::InvalidDistribution {
                        module: "perturb",
                        reason: format!("perturbed p[{k}] = {v} is negative"),
                    });
                }
                NumberDistribution::normalized(q)
            }
        }
    }

    pub fn ng_exact(&self, dim: usize) -> Result<T> {
        ng_exact_diagonal(&self.distribution(dim)?)
    }

    pub fn ng_second_order(&self, dim: usize) -> Result<T> {
        let p = self.base(dim)?;
        let dp: Vec<T> = self.tangent(dim)?.into_iter().map(|d| d * self.epsilon).collect();
        ng_second_order(&p, &dp, p.mean())
    }
}
