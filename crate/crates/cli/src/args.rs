use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ng_geometry::verify::Panel;

#[derive(Debug, Parser)]
#[command(name = "ng", version, about = "Non-Gaussianity and quantum Fisher geometry of single-mode states")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Fock truncation (default 200, or NG_GEOMETRY_DIM)
    #[arg(long, global = true)]
    pub dim: Option<usize>,
    /// Master seed for every random sub-stream (default 42)
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// CSV destination; stdout when absent
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// error, warn, info, debug or trace
    #[arg(long, global = true)]
    pub log_level: Option<String>,
    /// TOML file of `key = value` defaults, overridden by flags
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Tolerance override NAME=VALUE (theorem1, theorem2, second_order, fock_match)
    #[arg(long = "tol", global = true, value_name = "NAME=VALUE")]
    pub tol: Vec<String>,
    /// Worker threads for instance evaluation; results do not depend on it
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Non-Gaussianity of thermal states mixed with a target, over a grid
    Fig1(Fig1Args),
    /// Run a verification harness and emit per-instance residuals
    Theorem(TheoremArgs),
    /// Non-Gaussianity of described states
    Ng(NgArgs),
    /// Search for the target that maximizes non-Gaussianity at fixed energy
    Search(SearchArgs),
    /// Fidelity and Bures distance between two described states
    Fidelity(FidelityArgs),
}

#[derive(Debug, Args)]
pub struct Fig1Args {
    /// poisson, thermal, fock or epsilon
    #[arg(long, value_parser = parse_panel)]
    pub panel: Panel,
    #[arg(long, default_value_t = 4.0)]
    pub nt: f64,
    /// Mixing weights, e.g. 0.3,0.7,0.9 or 0.05..1:0.05
    #[arg(long)]
    pub eps: Option<String>,
    /// Target energies, e.g. 0..20 or 1,2,4
    #[arg(long, default_value = "0..20")]
    pub nmu: String,
}

fn parse_panel(s: &str) -> Result<Panel, String> {
    s.parse().map_err(|e: ng_geometry::Error| e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    #[value(name = "second-order")]
    SecondOrder,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Coherence,
    Classical,
}

#[derive(Debug, Args)]
pub struct TheoremArgs {
    #[arg(long, value_enum)]
    pub which: Which,
    #[arg(long, default_value_t = 4.0)]
    pub nt: f64,
    #[arg(long, default_value_t = 100)]
    pub count: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub scale: f64,
    /// Keep the mean photon number fixed (harness 1)
    #[arg(long)]
    pub fix_energy: bool,
    /// Perturbation family (harness 2)
    #[arg(long, value_enum, default_value_t = Family::Coherence)]
    pub family: Family,
    /// Coherence indices are drawn below this level (harness 2)
    #[arg(long, default_value_t = 30)]
    pub levels: usize,
}

#[derive(Debug, Args)]
pub struct NgArgs {
    /// State description, repeatable; see the README for the grammar
    #[arg(long, required = true)]
    pub state: Vec<String>,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long, default_value_t = 4.0)]
    pub nt: f64,
    #[arg(long, default_value_t = 0.5)]
    pub eps: f64,
    #[arg(long, default_value_t = 4.0)]
    pub nmu: f64,
    #[arg(long, default_value_t = 30)]
    pub support: usize,
    #[arg(long, default_value_t = 20)]
    pub restarts: usize,
    #[arg(long, default_value_t = 300)]
    pub iterations: usize,
    /// Also report the best of this many random targets at the same energy
    #[arg(long, default_value_t = 0)]
    pub baseline: usize,
}

#[derive(Debug, Args)]
pub struct FidelityArgs {
    #[arg(long)]
    pub a: String,
    #[arg(long)]
    pub b: String,
}
