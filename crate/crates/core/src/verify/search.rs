use rayon::prelude::*;

use super::{substream, Stream};
use crate::error::{Error, Result};
use crate::fock::{NumberDistribution, DEFAULT_DIM};
use crate::gaussian::{h_function, thermal_distribution};
use crate::perturb::{convex_combination, match_mean, ng_exact_diagonal, random_simplex, target_distribution, TargetSpec};
use crate::scalar::xlogx;

/// Non-Gaussianity values closer than this are ties.
pub const TIE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub n_t: f64,
    pub eps: f64,
    pub n_mu: f64,
    /// Targets live on Fock levels `0..support`.
    pub support: usize,
    pub restarts: usize,
    pub iterations: usize,
    pub seed: u64,
    pub dim: usize,
    /// Initial ascent step.
    pub step: f64,
    /// Total-variation radius for declaring a Fock match.
    pub fock_tolerance: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            n_t: 4.0,
            eps: 0.5,
            n_mu: 4.0,
            support: 30,
            restarts: 20,
            iterations: 300,
            seed: 42,
            dim: DEFAULT_DIM,
            step: 0.5,
            fock_tolerance: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    /// Best target found, on `support` levels.
    pub best: NumberDistribution<f64>,
    pub delta: f64,
    /// Levels carrying the best target's mass.
    pub support: Vec<usize>,
    /// Total-variation distance to the Fock state at `n_mu`, when `n_mu` is an integer.
    pub tv_to_fock: Option<f64>,
    pub fock_match: Option<bool>,
    /// Final non-Gaussianity of every restart, in restart order.
    pub restart_deltas: Vec<f64>,
}

/// Objective and gradient for `mu -> delta[(1 - eps) p + eps mu]`.
struct Objective<'a> {
    p: &'a [f64],
    eps: f64,
    support: usize,
}

impl Objective<'_> {
    fn mix(&self, mu: &[f64]) -> Vec<f64> {
        let mut q: Vec<f64> = self.p.iter().map(|&x| (1.0 - self.eps) * x).collect();
        for (k, &m) in mu.iter().enumerate() {
            q[k] += self.eps * m;
        }
        q
    }

    fn value(&self, mu: &[f64]) -> f64 {
        let q = self.mix(mu);
        let mean: f64 = q.iter().enumerate().map(|(k, &x)| k as f64 * x).sum();
        let entropy: f64 = q.iter().map(|&x| -xlogx(x)).sum();
        h_function(mean + 0.5).unwrap_or(f64::NAN) - entropy
    }

    fn gradient(&self, mu: &[f64]) -> Vec<f64> {
        let q = self.mix(mu);
        let mean: f64 = q.iter().enumerate().map(|(k, &x)| k as f64 * x).sum();
        // h'(x) = log(x + 1/2) - log(x - 1/2) at x = mean + 1/2
        let dh = (mean + 1.0).ln() - mean.max(f64::MIN_POSITIVE).ln();
        (0..self.support)
            .map(|k| self.eps * (k as f64 * dh + q[k].ln() + 1.0))
            .collect()
    }
}

/// Euclidean projection onto `{mu >= 0, sum mu = 1, sum k mu = n_mu}`.
///
/// The minimizer is `mu_k = max(0, y_k - a - b k)`. For a fixed energy
/// multiplier `b` the normalization fixes `a` (a plain simplex projection),
/// and the resulting mean falls monotonically in `b`, so `b` is found by
/// bisection.
pub fn project_energy_simplex(y: &[f64], n_mu: f64) -> Vec<f64> {
    let s = y.len();
    let top = s.saturating_sub(1) as f64;
    if s == 0 || n_mu <= 0.0 || n_mu >= top {
        let k = if n_mu <= 0.0 { 0 } else { s.saturating_sub(1) };
        let mut x = vec![0.0; s];
        if s > 0 {
            x[k] = 1.0;
        }
        return x;
    }
    let tilted = |b: f64| -> Vec<f64> {
        let shifted: Vec<f64> = y.iter().enumerate().map(|(k, &v)| v - b * k as f64).collect();
        project_simplex(&shifted)
    };
    let mean = |x: &[f64]| -> f64 { x.iter().enumerate().map(|(k, &v)| k as f64 * v).sum() };

    // beyond this tilt all mass sits on the first or last level
    let (lo_y, hi_y) = y.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let reach = hi_y - lo_y + 1.0;
    let (mut lo, mut hi) = (-reach, reach);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if mean(&tilted(mid)) > n_mu {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // the mean is continuous in the tilt, so interpolating the bracket ends
    // removes the last rounding step
    let (xl, xh) = (tilted(lo), tilted(hi));
    let (ml, mh) = (mean(&xl), mean(&xh));
    let t = if ml > mh { ((ml - n_mu) / (ml - mh)).clamp(0.0, 1.0) } else { 0.5 };
    xl.iter().zip(&xh).map(|(a, b)| (1.0 - t) * a + t * b).collect()
}

/// Euclidean projection onto the probability simplex (sort and threshold).
fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (i, &u) in sorted.iter().enumerate() {
        cumulative += u;
        let candidate = (cumulative - 1.0) / (i + 1) as f64;
        if u - candidate > 0.0 {
            theta = candidate;
        }
    }
    v.iter().map(|&u| (u - theta).max(0.0)).collect()
}

/// Feasible points of the energy-constrained simplex supported on at most
/// two of `levels`: the Fock state at `n_mu` and mixtures of a level below
/// `n_mu` with one above it.
fn vertices_among(levels: &[usize], n_mu: f64, len: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for (i, &a) in levels.iter().enumerate() {
        if a as f64 == n_mu {
            let mut v = vec![0.0; len];
            v[a] = 1.0;
            out.push(v);
        }
        for &b in &levels[i + 1..] {
            let (lo, hi) = (a.min(b), a.max(b));
            if (lo as f64) < n_mu && n_mu < hi as f64 {
                let w = (n_mu - lo as f64) / (hi - lo) as f64;
                let mut v = vec![0.0; len];
                v[lo] = 1.0 - w;
                v[hi] = w;
                out.push(v);
            }
        }
    }
    out
}

fn support_of(mu: &[f64]) -> Vec<usize> {
    mu.iter()
        .enumerate()
        .filter(|(_, &m)| m > 1e-9)
        .map(|(k, _)| k)
        .collect()
}

/// Most massive levels of `mu`, at most `cap` of them, in increasing order.
fn heaviest_levels(mu: &[f64], cap: usize) -> Vec<usize> {
    let mut levels = support_of(mu);
    if levels.len() > cap {
        levels.sort_by(|&a, &b| mu[b].total_cmp(&mu[a]));
        levels.truncate(cap);
        levels.sort_unstable();
    }
    levels
}

/// Searches the energy-constrained simplex for the target that maximizes the
/// non-Gaussianity of `(1 - eps) thermal(n_t) + eps mu`.
///
/// Each restart starts from a uniform random target mixed to the right
/// energy, runs projected-gradient ascent with step halving, snaps to the
/// best vertex of the face its iterate lies on, and then climbs along
/// polytope edges. The objective is convex in `mu` (an entropy term with a
/// negative sign plus a function of the mean), so its local maxima sit on
/// vertices and neither the snap nor the climb can lower it. Restarts run
/// independently with their own sub-seeds.
pub fn search_max_ng(cfg: &SearchConfig) -> Result<SearchResult> {
    if cfg.support < 2 {
        return Err(Error::bad_spec("verify", "search support must be >= 2"));
    }
    if cfg.support > cfg.dim {
        return Err(Error::bad_spec("verify", "search support exceeds the box"));
    }
    if !(cfg.n_mu >= 0.0) || cfg.n_mu > (cfg.support - 1) as f64 {
        return Err(Error::InfeasibleConstraint {
            reason: format!("n_mu = {} not representable on levels 0..={}", cfg.n_mu, cfg.support - 1),
        });
    }
    if !(cfg.eps >= 0.0 && cfg.eps <= 1.0) {
        return Err(Error::bad_spec("verify", format!("mixing weight {} outside [0, 1]", cfg.eps)));
    }
    if cfg.restarts == 0 {
        return Err(Error::bad_spec("verify", "need at least one restart"));
    }
    let p = thermal_distribution(cfg.n_t, cfg.dim)?;
    let obj = Objective {
        p: p.probs(),
        eps: cfg.eps,
        support: cfg.support,
    };

    let finals: Vec<(f64, Vec<f64>)> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = substream(cfg.seed, Stream::SearchRestart, r as u64);
            let start = match_mean(random_simplex::<f64, _>(cfg.support, &mut rng), cfg.n_mu)?;
            Ok(ascend(&obj, start.into_vec(), cfg))
        })
        .collect::<Result<_>>()?;

    let best_value = finals.iter().map(|(v, _)| *v).fold(f64::NEG_INFINITY, f64::max);
    let (delta, mu) = finals
        .iter()
        .filter(|(v, _)| *v >= best_value - TIE_TOL)
        .min_by(|a, b| support_of(&a.1).cmp(&support_of(&b.1)))
        .cloned()
        .expect("at least one restart");

    let best = NumberDistribution::normalized(mu.iter().map(|&m| m.max(0.0)).collect())?;
    let tv_to_fock = if cfg.n_mu.fract() == 0.0 {
        let fock = NumberDistribution::delta(cfg.n_mu as usize, cfg.support)?;
        Some(best.total_variation(&fock))
    } else {
        None
    };
    Ok(SearchResult {
        support: support_of(best.probs()),
        fock_match: tv_to_fock.map(|tv| tv <= cfg.fock_tolerance),
        tv_to_fock,
        delta,
        best,
        restart_deltas: finals.iter().map(|(v, _)| *v).collect(),
    })
}

fn ascend(obj: &Objective<'_>, start: Vec<f64>, cfg: &SearchConfig) -> (f64, Vec<f64>) {
    let mut mu = project_energy_simplex(&start, cfg.n_mu);
    let mut value = obj.value(&mu);
    let mut step = cfg.step;
    for _ in 0..cfg.iterations {
        let g = obj.gradient(&mu);
        let trial: Vec<f64> = mu.iter().zip(&g).map(|(m, d)| m + step * d).collect();
        let next = project_energy_simplex(&trial, cfg.n_mu);
        let next_value = obj.value(&next);
        if next_value >= value - 1e-15 {
            let moved: f64 = next.iter().zip(&mu).map(|(a, b)| (a - b).abs()).sum();
            mu = next;
            value = next_value;
            if moved < 1e-12 {
                break;
            }
        } else {
            step *= 0.5;
            if step < 1e-10 {
                break;
            }
        }
    }

    // the face of the iterate holds the vertices worth checking
    let levels = heaviest_levels(&mu, 16);
    // a convex objective peaks at a vertex, so the face's best vertex
    // replaces the iterate
    match best_vertex(obj, &levels, cfg.n_mu, mu.len()) {
        Some((v, vertex)) => edge_ascent(obj, v, vertex, cfg.n_mu),
        None => (value, mu),
    }
}

fn best_vertex(obj: &Objective<'_>, levels: &[usize], n_mu: f64, len: usize) -> Option<(f64, Vec<f64>)> {
    vertices_among(levels, n_mu, len)
        .into_iter()
        .map(|v| (obj.value(&v), v))
        .fold(None, |acc: Option<(f64, Vec<f64>)>, cand| match acc {
            Some(a) if a.0 >= cand.0 => Some(a),
            _ => Some(cand),
        })
}

/// Walks polytope edges from a vertex to the best adjacent vertex while that
/// improves the objective. Two vertices share an edge when their supports
/// together span at most three levels.
fn edge_ascent(obj: &Objective<'_>, mut value: f64, mut vertex: Vec<f64>, n_mu: f64) -> (f64, Vec<f64>) {
    let len = vertex.len();
    loop {
        let current = support_of(&vertex);
        let mut best: Option<(f64, Vec<f64>)> = None;
        for extra in (0..len).filter(|c| !current.contains(c)) {
            let mut levels = current.clone();
            levels.push(extra);
            levels.sort_unstable();
            if let Some((v, cand)) = best_vertex(obj, &levels, n_mu, len) {
                if best.as_ref().is_none_or(|b| v > b.0) {
                    best = Some((v, cand));
                }
            }
        }
        match best {
            Some((v, cand)) if v > value + 1e-12 => {
                value = v;
                vertex = cand;
            }
            _ => return (value, vertex),
        }
    }
}

/// Best non-Gaussianity over `count` uniform random targets mixed to energy
/// `n_mu` on `support` levels; the random-sampling baseline for the search.
pub fn random_target_baseline(cfg: &SearchConfig, count: usize) -> Result<(f64, NumberDistribution<f64>)> {
    let p = thermal_distribution(cfg.n_t, cfg.dim)?;
    let mut best: Option<(f64, NumberDistribution<f64>)> = None;
    for i in 0..count {
        let mut rng = substream(cfg.seed, Stream::RandomTarget, i as u64);
        let seed = rand::Rng::random::<u64>(&mut rng);
        let spec = TargetSpec::RandomSimplex {
            support: cfg.support,
            seed,
            mean: Some(cfg.n_mu),
        };
        let mu = target_distribution(&spec, cfg.dim)?;
        let d = ng_exact_diagonal(&convex_combination(&p, &mu, cfg.eps)?)?;
        if best.as_ref().is_none_or(|(b, _)| d > *b) {
            best = Some((d, mu));
        }
    }
    best.ok_or_else(|| Error::bad_spec("verify", "baseline needs at least one sample"))
}
