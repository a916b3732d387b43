//! Command-line front end for `ng-geometry`.
//!
//! Every subcommand writes one CSV table (to `--out` or stdout) and keeps
//! human-readable summaries on stderr. Exit codes: 0 success, 1 failed
//! verification, 2 usage error, 3 numerical guard.

pub mod args;
pub mod config;
pub mod output;
pub mod parse;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::Parser;
use ng_geometry::verify::{
    random_target_baseline, search_max_ng, sweep_fig1, verify_second_order, verify_theorem1, verify_theorem2,
    Panel, SearchConfig, SecondOrderConfig, SweepTable, Theorem1Config, Theorem2Config, Theorem2Family,
    VerificationReport,
};
use ng_geometry::{bures_distance_sq, covariance_of, fidelity, non_gaussianity};

use args::{Cli, Command, Family, Fig1Args, NgArgs, SearchArgs, TheoremArgs, Which};
use config::{RunConfig, DIM_ENV};
use output::{write_csv, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_GUARD: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{0}")]
    Core(#[from] ng_geometry::Error),
    #[error("cli: non-finite value in column '{column}'")]
    NonFinite { column: String },
    #[error("io: {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use ng_geometry::Error as E;
        match self {
            CliError::Usage(_) | CliError::Io { .. } => EXIT_USAGE,
            CliError::Core(E::BadSpec { .. } | E::InvalidDistribution { .. } | E::InfeasibleConstraint { .. }) => {
                EXIT_USAGE
            }
            CliError::Core(_) | CliError::NonFinite { .. } => EXIT_GUARD,
        }
    }
}

/// Parses `argv`, runs the subcommand and returns the process exit code.
pub fn run<I, A>(argv: I) -> i32
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_VERIFICATION,
        Err(e) => {
            eprintln!("ng: error: {}", single_line(&e.to_string()));
            e.exit_code()
        }
    }
}

fn single_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Runs a parsed command line; `Ok(false)` means a verification failed.
pub fn execute(cli: Cli) -> Result<bool, CliError> {
    let cfg = RunConfig::resolve(&cli.global, std::env::var(DIM_ENV).ok())?;
    let _ = env_logger::Builder::new()
        .parse_filters(&cfg.log_level)
        .format_timestamp(None)
        .try_init();
    log::debug!("resolved configuration: {cfg:?}");

    let job = || dispatch(&cli.command, &cfg);
    match cfg.jobs {
        Some(0) => Err(CliError::Usage("--jobs must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Usage(format!("cannot start {n} worker threads: {e}")))?
            .install(job),
        None => job(),
    }
}

fn dispatch(command: &Command, cfg: &RunConfig) -> Result<bool, CliError> {
    match command {
        Command::Fig1(a) => fig1(a, cfg),
        Command::Theorem(a) => theorem(a, cfg),
        Command::Ng(a) => ng(a, cfg),
        Command::Search(a) => search(a, cfg),
        Command::Fidelity(a) => {
            let rho = parse::parse_state(&a.a, cfg.dim)?;
            let sigma = parse::parse_state(&a.b, cfg.dim)?;
            let mut t = Table::new(&["fidelity", "bures_sq"]);
            t.push(vec![fidelity(&rho, &sigma)?.into(), bures_distance_sq(&rho, &sigma)?.into()]);
            write_csv(&t, cfg.out.as_deref())?;
            Ok(true)
        }
    }
}

/// CSV form of a sweep table.
pub fn sweep_table(sweep: &SweepTable) -> Table {
    let mut t = Table::new(&SweepTable::HEADER);
    for r in &sweep.rows {
        t.push(vec![
            r.panel.as_str().into(),
            r.n_t.into(),
            r.eps.into(),
            r.n_mu.into(),
            r.delta_exact.into(),
            r.delta_2nd.into(),
            r.bound.into(),
        ]);
    }
    t
}

fn fig1(a: &Fig1Args, cfg: &RunConfig) -> Result<bool, CliError> {
    let eps = match (&a.eps, a.panel) {
        (Some(s), _) => parse::parse_grid(s)?,
        (None, Panel::Epsilon) => parse::parse_grid("0.05..1:0.05")?,
        (None, _) => vec![0.3, 0.7, 0.9],
    };
    let n_mu = parse::parse_grid(&a.nmu)?;
    // without an explicit box the sweep sizes its own to fit every target
    let dim = cfg.dim_chosen.then_some(cfg.dim);
    let sweep = sweep_fig1(a.panel, a.nt, &eps, &n_mu, dim)?;
    write_csv(&sweep_table(&sweep), cfg.out.as_deref())?;
    Ok(true)
}

/// CSV form of a verification report, one row per instance.
pub fn report_table(report: &VerificationReport) -> Table {
    let mut t = Table::new(&["index", "label", "d_q", "delta", "dn", "residual", "relative"]);
    for r in &report.records {
        t.push(vec![
            r.index.into(),
            r.label.as_str().into(),
            r.d_q.into(),
            r.delta.into(),
            r.dn.into(),
            r.residual.into(),
            r.relative.into(),
        ]);
    }
    t
}

fn theorem(a: &TheoremArgs, cfg: &RunConfig) -> Result<bool, CliError> {
    let report = match a.which {
        Which::One => {
            let d = Theorem1Config::default();
            verify_theorem1(&Theorem1Config {
                n_t: a.nt,
                count: a.count,
                scale: a.scale,
                seed: cfg.seed,
                fix_energy: a.fix_energy,
                dim: cfg.dim,
                tolerance: cfg.tolerance("theorem1", d.tolerance),
            })?
        }
        Which::Two => {
            let d = Theorem2Config::default();
            verify_theorem2(&Theorem2Config {
                n_t: a.nt,
                count: a.count,
                scale: a.scale,
                seed: cfg.seed,
                dim: cfg.dim,
                family: match a.family {
                    Family::Coherence => Theorem2Family::Coherence,
                    Family::Classical => Theorem2Family::ClassicalFixedEnergy,
                },
                levels: a.levels,
                tolerance: cfg.tolerance("theorem2", d.tolerance),
            })?
        }
        Which::SecondOrder => {
            let d = SecondOrderConfig::default();
            verify_second_order(&SecondOrderConfig {
                n_t: a.nt,
                count: a.count,
                scale: a.scale,
                seed: cfg.seed,
                dim: cfg.dim,
                tolerance: cfg.tolerance("second_order", d.tolerance),
            })?
        }
    };
    write_csv(&report_table(&report), cfg.out.as_deref())?;
    eprintln!("{}", report.summary());
    Ok(report.passed)
}

fn ng(a: &NgArgs, cfg: &RunConfig) -> Result<bool, CliError> {
    let mut t = Table::new(&["state", "delta", "mean_n", "nu", "entropy"]);
    for spec in &a.state {
        let rho = parse::parse_state(spec, cfg.dim)?;
        let cov = covariance_of(&rho)?;
        t.push(vec![
            spec.as_str().into(),
            non_gaussianity(&rho)?.into(),
            rho.mean_photon_number().into(),
            cov.symplectic_eigenvalue().into(),
            rho.von_neumann_entropy().into(),
        ]);
    }
    write_csv(&t, cfg.out.as_deref())?;
    Ok(true)
}

fn search(a: &SearchArgs, cfg: &RunConfig) -> Result<bool, CliError> {
    let d = SearchConfig::default();
    let sc = SearchConfig {
        n_t: a.nt,
        eps: a.eps,
        n_mu: a.nmu,
        support: a.support,
        restarts: a.restarts,
        iterations: a.iterations,
        seed: cfg.seed,
        dim: cfg.dim,
        step: d.step,
        fock_tolerance: cfg.tolerance("fock_match", d.fock_tolerance),
    };
    let result = search_max_ng(&sc)?;
    let mut t = Table::new(&["k", "mu_k"]);
    for (k, &m) in result.best.probs().iter().enumerate() {
        t.push(vec![k.into(), m.into()]);
    }
    write_csv(&t, cfg.out.as_deref())?;

    let mut summary = format!(
        "search: delta {} on support {:?}",
        output::format_g(result.delta),
        result.support
    );
    if let (Some(tv), Some(hit)) = (result.tv_to_fock, result.fock_match) {
        summary += &format!(", TV to Fock({}) {}, match {hit}", a.nmu, output::format_g(tv));
    }
    if a.baseline > 0 {
        let (best, _) = random_target_baseline(&sc, a.baseline)?;
        summary += &format!(", best of {} random targets {}", a.baseline, output::format_g(best));
    }
    eprintln!("{summary}");
    Ok(true)
}
