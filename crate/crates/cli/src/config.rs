use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::args::GlobalArgs;
use crate::CliError;

pub const DIM_ENV: &str = "NG_GEOMETRY_DIM";
pub const MIN_DIM: usize = 16;
pub const TOLERANCE_NAMES: [&str; 4] = ["theorem1", "theorem2", "second_order", "fock_match"];

/// Settings after layering flags over the config file over the environment
/// over built-in defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub dim: usize,
    /// Whether `dim` came from a flag, the config file or the environment
    /// rather than the built-in default.
    pub dim_chosen: bool,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub log_level: String,
    pub jobs: Option<usize>,
    pub tolerances: BTreeMap<String, f64>,
}

impl RunConfig {
    pub fn tolerance(&self, name: &str, default: f64) -> f64 {
        self.tolerances.get(name).copied().unwrap_or(default)
    }

    pub fn resolve(flags: &GlobalArgs, env_dim: Option<String>) -> Result<Self, CliError> {
        let file = match &flags.config {
            Some(path) => load_file(path)?,
            None => toml::Table::new(),
        };
        for key in file.keys() {
            if !["dim", "seed", "out", "log_level", "jobs", "tol"].contains(&key.as_str()) {
                return Err(CliError::Usage(format!("unknown config key '{key}'")));
            }
        }

        let env_dim = match env_dim {
            Some(s) => Some(
                s.trim()
                    .parse::<usize>()
                    .map_err(|_| CliError::Usage(format!("{DIM_ENV}='{s}' is not a dimension")))?,
            ),
            None => None,
        };
        let chosen = flags
            .dim
            .or(file_uint(&file, "dim")?.map(|v| v as usize))
            .or(env_dim);
        let dim = chosen.unwrap_or(ng_geometry::fock::DEFAULT_DIM);
        if dim < MIN_DIM {
            return Err(CliError::Usage(format!("dim {dim} below the minimum {MIN_DIM}")));
        }

        let mut tolerances = BTreeMap::new();
        if let Some(value) = file.get("tol") {
            let table = value
                .as_table()
                .ok_or_else(|| CliError::Usage("config 'tol' must be a table".into()))?;
            for (name, v) in table {
                let v = v
                    .as_float()
                    .or_else(|| v.as_integer().map(|i| i as f64))
                    .ok_or_else(|| CliError::Usage(format!("config tol.{name} is not a number")))?;
                insert_tolerance(&mut tolerances, name, v)?;
            }
        }
        for pair in &flags.tol {
            let (name, v) = pair
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("--tol expects NAME=VALUE, got '{pair}'")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("--tol {name}: '{v}' is not a number")))?;
            insert_tolerance(&mut tolerances, name.trim(), v)?;
        }

        Ok(Self {
            dim,
            dim_chosen: chosen.is_some(),
            seed: flags.seed.or(file_uint(&file, "seed")?).unwrap_or(42),
            out: flags.out.clone().or(file_str(&file, "out")?.map(PathBuf::from)),
            log_level: flags
                .log_level
                .clone()
                .or(file_str(&file, "log_level")?)
                .unwrap_or_else(|| "warn".into()),
            jobs: flags.jobs.or(file_uint(&file, "jobs")?.map(|v| v as usize)),
            tolerances,
        })
    }
}

fn insert_tolerance(map: &mut BTreeMap<String, f64>, name: &str, v: f64) -> Result<(), CliError> {
    if !TOLERANCE_NAMES.contains(&name) {
        return Err(CliError::Usage(format!(
            "unknown tolerance '{name}' (expected one of {})",
            TOLERANCE_NAMES.join(", ")
        )));
    }
    if !(v.is_finite() && v >= 0.0) {
        return Err(CliError::Usage(format!("tolerance {name} must be a finite non-negative number")));
    }
    map.insert(name.to_string(), v);
    Ok(())
}

fn load_file(path: &Path) -> Result<toml::Table, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    text.parse::<toml::Table>()
        .map_err(|e| CliError::Usage(format!("config {}: {}", path.display(), e.message())))
}

fn file_uint(file: &toml::Table, key: &str) -> Result<Option<u64>, CliError> {
    match file.get(key) {
        None => Ok(None),
        Some(v) => v
            .as_integer()
            .filter(|&i| i >= 0)
            .map(|i| Some(i as u64))
            .ok_or_else(|| CliError::Usage(format!("config '{key}' must be a non-negative integer"))),
    }
}

fn file_str(file: &toml::Table, key: &str) -> Result<Option<String>, CliError> {
    match file.get(key) {
        None => Ok(None),
        Some(v) => v
            .as_str()
            .map(|s| Some(s.to_string()))
            .ok_or_else(|| CliError::Usage(format!("config '{key}' must be a string"))),
    }
}
