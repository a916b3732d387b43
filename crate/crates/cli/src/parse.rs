use std::collections::BTreeMap;

use ng_geometry::perturb::{convex_combination, target_distribution, TargetSpec};
use ng_geometry::{
    coherence_perturbation, gaussian_state, thermal_state, Complex, DensityMatrix, GaussianParams, NumberDistribution,
};

use crate::CliError;

/// Parses `a..b` or `a..b:step` (inclusive, step 1 by default), a plain
/// number, or a comma-separated list of either.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, CliError> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        match item.split_once("..") {
            Some((lo, rest)) => {
                let (hi, step) = match rest.split_once(':') {
                    Some((hi, step)) => (hi, number(step, item)?),
                    None => (rest, 1.0),
                };
                let (lo, hi) = (number(lo, item)?, number(hi, item)?);
                if !(step > 0.0) || hi < lo {
                    return Err(CliError::Usage(format!("bad range '{item}'")));
                }
                let count = ((hi - lo) / step + 1e-9).floor() as usize;
                // snap to 12 significant digits so 0.05 * 3 reads back as 0.15
                out.extend((0..=count).map(|i| snap(lo + i as f64 * step)));
            }
            None => out.push(number(item, item)?),
        }
    }
    if out.is_empty() {
        return Err(CliError::Usage(format!("empty grid '{s}'")));
    }
    Ok(out)
}

fn snap(x: f64) -> f64 {
    format!("{x:.11e}").parse().unwrap_or(x)
}

fn number(s: &str, context: &str) -> Result<f64, CliError> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("'{}' in '{context}' is not a number", s.trim())))?;
    if !v.is_finite() {
        return Err(CliError::Usage(format!("'{context}' is not finite")));
    }
    Ok(v)
}

struct Fields<'a> {
    kind: &'a str,
    spec: &'a str,
    map: BTreeMap<&'a str, &'a str>,
}

impl<'a> Fields<'a> {
    fn parse(spec: &'a str) -> Result<Self, CliError> {
        let (kind, rest) = spec.split_once(':').unwrap_or((spec, ""));
        let mut map = BTreeMap::new();
        for pair in rest.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("state '{spec}': expected key=value, got '{pair}'")))?;
            map.insert(k.trim(), v.trim());
        }
        Ok(Self {
            kind: kind.trim(),
            spec,
            map,
        })
    }

    fn allow(&self, keys: &[&str]) -> Result<(), CliError> {
        match self.map.keys().find(|k| !keys.contains(k)) {
            Some(k) => Err(CliError::Usage(format!(
                "state '{}': unknown key '{k}' for {} (expected {})",
                self.spec,
                self.kind,
                keys.join(", ")
            ))),
            None => Ok(()),
        }
    }

    fn raw(&self, key: &str) -> Result<&'a str, CliError> {
        self.map
            .get(key)
            .copied()
            .ok_or_else(|| CliError::Usage(format!("state '{}': missing '{key}'", self.spec)))
    }

    fn real(&self, key: &str) -> Result<f64, CliError> {
        number(self.raw(key)?, self.spec)
    }

    fn real_or(&self, key: &str, default: f64) -> Result<f64, CliError> {
        match self.map.get(key) {
            Some(v) => number(v, self.spec),
            None => Ok(default),
        }
    }

    fn index(&self, key: &str) -> Result<usize, CliError> {
        let raw = self.raw(key)?;
        raw.parse()
            .map_err(|_| CliError::Usage(format!("state '{}': '{key}' must be a level index", self.spec)))
    }
}

/// Builds a density matrix from a description such as `thermal:n=4`,
/// `fock:k=1`, `gaussian:n=0.5,r=0.2,phi=0,re=1,im=0`, `poisson:n=2`,
/// `mix:nt=4,target=fock,nmu=4,eps=0.5` or `coherence:nt=4,j=0,k=3,eps=1e-3`.
pub fn parse_state(spec: &str, dim: usize) -> Result<DensityMatrix, CliError> {
    let f = Fields::parse(spec)?;
    let rho = match f.kind {
        "thermal" => {
            f.allow(&["n"])?;
            thermal_state(f.real("n")?, dim)?
        }
        "fock" => {
            f.allow(&["k"])?;
            DensityMatrix::fock(f.index("k")?, dim)?
        }
        "gaussian" => {
            f.allow(&["n", "r", "phi", "re", "im"])?;
            let xi = Complex::from_polar(f.real_or("r", 0.0)?, f.real_or("phi", 0.0)?);
            let alpha = Complex::new(f.real_or("re", 0.0)?, f.real_or("im", 0.0)?);
            gaussian_state(&GaussianParams::new(f.real_or("n", 0.0)?, xi, alpha)?, dim)?
        }
        "poisson" => {
            f.allow(&["n"])?;
            diagonal(&target_distribution(&TargetSpec::Poissonian { n_mu: f.real("n")? }, dim)?)?
        }
        "mix" => {
            f.allow(&["nt", "target", "nmu", "eps"])?;
            let n_mu = f.real("nmu")?;
            let target = match f.raw("target")? {
                "poisson" | "poissonian" => TargetSpec::Poissonian { n_mu },
                "thermal" => TargetSpec::Thermal { n_mu },
                "fock" => TargetSpec::Fock { n_mu },
                other => {
                    return Err(CliError::Usage(format!(
                        "state '{spec}': target '{other}' is not poisson, thermal or fock"
                    )))
                }
            };
            let base = target_distribution(&TargetSpec::Thermal { n_mu: f.real("nt")? }, dim)?;
            let mu = target_distribution(&target, dim)?;
            diagonal(&convex_combination(&base, &mu, f.real("eps")?)?)?
        }
        "coherence" => {
            f.allow(&["nt", "j", "k", "eps", "phase"])?;
            let tau = thermal_state(f.real("nt")?, dim)?;
            let c = Complex::from_polar(1.0, f.real_or("phase", 0.0)?);
            coherence_perturbation(&tau, f.index("j")?, f.index("k")?, c, f.real("eps")?)?
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown state kind '{other}' (expected thermal, fock, gaussian, poisson, mix or coherence)"
            )))
        }
    };
    Ok(rho)
}

fn diagonal(p: &NumberDistribution) -> Result<DensityMatrix, CliError> {
    Ok(DensityMatrix::from_distribution(p)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0..3").unwrap(), vec![0.0, 1.0, 2.0, 3.0]);
        assert_eq!(parse_grid("0.3,0.7,0.9").unwrap(), vec![0.3, 0.7, 0.9]);
        let eps = parse_grid("0.05..1:0.05").unwrap();
        assert_eq!(eps.len(), 20);
        assert_eq!(eps[2], 0.15);
        assert_eq!(eps[19], 1.0);
        assert_eq!(parse_grid("1..2, 5").unwrap(), vec![1.0, 2.0, 5.0]);
        assert!(parse_grid("3..1").is_err());
        assert!(parse_grid("a").is_err());
        assert!(parse_grid("").is_err());
    }

    #[test]
    fn states() {
        assert!(parse_state("thermal:n=1", 64).is_ok());
        assert!(parse_state("fock:k=2", 32).is_ok());
        assert!(parse_state("gaussian:n=0.2,r=0.1,phi=0.3,re=0.5", 64).is_ok());
        assert!(parse_state("mix:nt=1,target=fock,nmu=2,eps=0.5", 64).is_ok());
        assert!(parse_state("coherence:nt=1,j=0,k=3,eps=1e-3", 64).is_ok());
        assert!(matches!(parse_state("thermal:m=1", 32), Err(CliError::Usage(_))));
        assert!(matches!(parse_state("wigner:n=1", 32), Err(CliError::Usage(_))));
        assert!(matches!(parse_state("fock", 32), Err(CliError::Usage(_))));
    }
}
