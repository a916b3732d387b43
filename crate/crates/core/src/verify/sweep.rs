use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::fock::DEFAULT_DIM;
use crate::gaussian::{thermal_box, thermal_distribution};
use crate::perturb::{
    concavity_bound, convex_combination, fock_level, ng_exact_diagonal, ng_second_order_target, target_distribution,
    TargetSpec,
};

/// Panels of the mixing experiment: non-Gaussianity against the target energy
/// for three target families, and against the mixing weight at `n_mu = n_t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Panel {
    Poisson,
    Thermal,
    Fock,
    Epsilon,
}

impl Panel {
    pub fn name(self) -> &'static str {
        match self {
            Panel::Poisson => "poisson",
            Panel::Thermal => "thermal",
            Panel::Fock => "fock",
            Panel::Epsilon => "epsilon",
        }
    }
}

impl fmt::Display for Panel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Panel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "poisson" | "poissonian" => Ok(Panel::Poisson),
            "thermal" => Ok(Panel::Thermal),
            "fock" => Ok(Panel::Fock),
            "epsilon" | "eps" => Ok(Panel::Epsilon),
            other => Err(Error::bad_spec("verify", format!("unknown panel '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    /// `poisson`, `thermal`, `fock`, or `epsilon-poisson` / `epsilon-fock`.
    pub panel: String,
    pub n_t: f64,
    pub eps: f64,
    pub n_mu: f64,
    pub delta_exact: f64,
    pub delta_2nd: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub const HEADER: [&'static str; 7] = ["panel", "n_t", "eps", "n_mu", "delta_exact", "delta_2nd", "bound"];

    /// Rows of one panel id, in sweep order.
    pub fn panel<'a>(&'a self, id: &'a str) -> impl Iterator<Item = &'a SweepRow> + 'a {
        self.rows.iter().filter(move |r| r.panel == id)
    }

    /// Rows of one panel id at one mixing weight.
    pub fn curve(&self, id: &str, eps: f64) -> Vec<&SweepRow> {
        self.rows.iter().filter(|r| r.panel == id && r.eps == eps).collect()
    }
}

/// Exact non-Gaussianity, its second-order expansion and the concavity bound
/// for `(1 - eps) thermal(n_t) + eps target` over a grid.
///
/// For [`Panel::Epsilon`] the energy grid is ignored and the sweep runs over
/// `eps_list` with Poissonian and Fock targets at `n_mu = n_t`. A `dim` of
/// `None` picks the smallest box, never below the default, that holds every
/// distribution of the sweep within the tail guards.
pub fn sweep_fig1(panel: Panel, n_t: f64, eps_list: &[f64], n_mu_grid: &[f64], dim: Option<usize>) -> Result<SweepTable> {
    let dim = dim.unwrap_or_else(|| auto_dim(panel, n_t, n_mu_grid));
    if eps_list.is_empty() {
        return Err(Error::bad_spec("verify", "empty eps list"));
    }
    let p = thermal_distribution(n_t, dim)?;

    let row = |id: &str, eps: f64, n_mu: f64, spec: TargetSpec<f64>| -> Result<SweepRow> {
        let mu = target_distribution(&spec, dim)?;
        let q = convex_combination(&p, &mu, eps)?;
        Ok(SweepRow {
            panel: id.to_string(),
            n_t,
            eps,
            n_mu,
            delta_exact: ng_exact_diagonal(&q)?,
            delta_2nd: ng_second_order_target(&p, &mu, eps, n_t)?.value,
            bound: concavity_bound(n_t, &mu, eps)?,
        })
    };

    let mut rows = Vec::new();
    match panel {
        Panel::Epsilon => {
            fock_level(n_t)?;
            for &eps in eps_list {
                rows.push(row("epsilon-poisson", eps, n_t, TargetSpec::Poissonian { n_mu: n_t })?);
                rows.push(row("epsilon-fock", eps, n_t, TargetSpec::Fock { n_mu: n_t })?);
            }
        }
        _ => {
            if n_mu_grid.is_empty() {
                return Err(Error::bad_spec("verify", "empty n_mu grid"));
            }
            if panel == Panel::Fock {
                for &n in n_mu_grid {
                    fock_level(n)?;
                }
            }
            for &eps in eps_list {
                for &n_mu in n_mu_grid {
                    let spec = match panel {
                        Panel::Poisson => TargetSpec::Poissonian { n_mu },
                        Panel::Thermal => TargetSpec::Thermal { n_mu },
                        Panel::Fock => TargetSpec::Fock { n_mu },
                        Panel::Epsilon => unreachable!(),
                    };
                    rows.push(row(panel.name(), eps, n_mu, spec)?);
                }
            }
        }
    }
    Ok(SweepTable { rows })
}

fn auto_dim(panel: Panel, n_t: f64, n_mu_grid: &[f64]) -> usize {
    let energies: Vec<f64> = match panel {
        Panel::Epsilon => vec![n_t],
        _ => n_mu_grid.iter().copied().filter(|n| n.is_finite() && *n >= 0.0).collect(),
    };
    let target = |n: f64| match panel {
        Panel::Thermal => thermal_box(n),
        // Poisson tails die off past a dozen standard deviations
        Panel::Poisson | Panel::Epsilon => (n + 12.0 * n.sqrt() + 30.0).ceil() as usize,
        Panel::Fock => n as usize + 1,
    };
    energies
        .into_iter()
        .map(target)
        .fold(DEFAULT_DIM.max(thermal_box(n_t)), usize::max)
}
