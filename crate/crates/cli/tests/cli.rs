use std::path::Path;
use std::process::{Command, Output};

use ng_cli::output::{write_csv, Cell, Table};
use ng_cli::{EXIT_GUARD, EXIT_OK, EXIT_USAGE, EXIT_VERIFICATION};

fn ng(args: &[&str]) -> Output {
    ng_with_env(args, None)
}

fn ng_with_env(args: &[&str], dim: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ng"));
    cmd.args(args).env_remove("NG_GEOMETRY_DIM").env_remove("RUST_LOG");
    if let Some(d) = dim {
        cmd.env("NG_GEOMETRY_DIM", d);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn records(text: &str) -> Vec<csv::StringRecord> {
    csv::Reader::from_reader(text.as_bytes()).records().map(|r| r.unwrap()).collect()
}

#[test]
fn fig1_header_and_rows() {
    let o = ng(&["fig1", "--panel", "fock", "--eps", "0.3", "--nmu", "0..3"]);
    assert_eq!(code(&o), EXIT_OK, "{}", stderr(&o));
    let text = stdout(&o);
    assert_eq!(text.lines().next().unwrap(), "panel,n_t,eps,n_mu,delta_exact,delta_2nd,bound");
    let rows = records(&text);
    assert_eq!(rows.len(), 4);
    let deltas: Vec<f64> = rows.iter().map(|r| r[4].parse().unwrap()).collect();
    assert!(deltas.windows(2).all(|w| w[1] > w[0]));
    assert_eq!(&rows[0][0], "fock");
}

#[test]
fn ng_reports_known_values() {
    let o = ng(&["--dim", "60", "ng", "--state", "fock:k=1", "--state", "thermal:n=1"]);
    assert_eq!(code(&o), EXIT_OK, "{}", stderr(&o));
    let rows = records(&stdout(&o));
    let fock: f64 = rows[0][1].parse().unwrap();
    assert!((fock - 2.0 * 2f64.ln()).abs() < 1e-10);
    let thermal: f64 = rows[1][1].parse().unwrap();
    assert!(thermal.abs() < 1e-9);
    assert_eq!(&rows[1][2], "1");
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        vec!["fig1", "--panel", "fock", "--nmu", "2.5"],
        vec!["ng", "--state", "squeezed:1"],
        vec!["--dim", "4", "ng", "--state", "fock:k=1"],
        vec!["--tol", "nonsense=1", "ng", "--state", "fock:k=1"],
        vec!["--jobs", "0", "ng", "--state", "fock:k=1"],
        vec!["search", "--nmu", "40"],
    ] {
        let o = ng(&args);
        assert_eq!(code(&o), EXIT_USAGE, "{args:?}: {}", stderr(&o));
        let err = stderr(&o);
        assert_eq!(err.lines().count(), 1, "{err}");
        assert!(err.starts_with("ng: error:"), "{err}");
    }
    let o = ng(&["fig1", "--panel", "fock", "--nmu", "2.5"]);
    assert!(stderr(&o).contains("Fock target requires integer n_mu"));
    assert!(o.stdout.is_empty());
}

#[test]
fn clap_rejections_exit_with_two() {
    assert_eq!(code(&ng(&["fig1"])), EXIT_USAGE);
    assert_eq!(code(&ng(&["nonexistent"])), EXIT_USAGE);
    assert_eq!(code(&ng(&["--help"])), EXIT_OK);
}

#[test]
fn guard_failures_exit_with_three() {
    // a thermal state with this much energy does not fit in the box
    let o = ng(&["--dim", "40", "ng", "--state", "thermal:n=10"]);
    assert_eq!(code(&o), EXIT_GUARD, "{}", stderr(&o));
    assert!(stderr(&o).contains("thermal tail"));
}

#[test]
fn failed_verification_exits_with_one() {
    let args = ["theorem", "--which", "second-order", "--count", "5"];
    assert_eq!(code(&ng(&args)), EXIT_OK);
    let mut strict = vec!["--tol", "second_order=1e-9"];
    strict.extend(args);
    let o = ng(&strict);
    assert_eq!(code(&o), EXIT_VERIFICATION);
    assert!(stderr(&o).contains("FAIL"));
    assert_eq!(records(&stdout(&o)).len(), 5);
}

#[test]
fn out_flag_writes_the_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fid.csv");
    let args = ["--dim", "40", "fidelity", "--a", "thermal:n=0.5", "--b", "fock:k=0"];
    let piped = ng(&args);
    let mut with_out = args.to_vec();
    let p = path.to_str().unwrap();
    with_out.extend(["--out", p]);
    let o = ng(&with_out);
    assert_eq!(code(&o), EXIT_OK);
    assert!(o.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), piped.stdout);
    let rows = records(&stdout(&piped));
    let f: f64 = rows[0][0].parse().unwrap();
    // sqrt of the vacuum population of a thermal state
    assert!((f - (1.0f64 / 1.5).sqrt()).abs() < 1e-10);
}

#[test]
fn unwritable_output_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("missing").join("x.csv");
    let o = ng(&["--dim", "40", "--out", bad.to_str().unwrap(), "ng", "--state", "fock:k=1"]);
    assert_eq!(code(&o), EXIT_USAGE);
}

#[test]
fn dimension_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("ng.toml");
    std::fs::write(&cfg, "dim = 30\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    // thermal:3 needs about 90 levels, so the effective box decides success
    let state = ["ng", "--state", "thermal:n=3"];
    let run = |extra: &[&str], env: Option<&str>| {
        let mut args = extra.to_vec();
        args.extend(state);
        code(&ng_with_env(&args, env))
    };
    assert_eq!(run(&[], None), EXIT_OK);
    assert_eq!(run(&[], Some("30")), EXIT_GUARD);
    assert_eq!(run(&["--config", cfg], Some("120")), EXIT_GUARD);
    assert_eq!(run(&["--config", cfg, "--dim", "120"], Some("30")), EXIT_OK);
    assert_eq!(run(&[], Some("many")), EXIT_USAGE);
}

#[test]
fn config_file_validation() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, body: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, body).unwrap();
        p
    };
    let unknown = write("unknown.toml", "dimension = 30\n");
    let broken = write("broken.toml", "dim = \n");
    let tol = write("tol.toml", "[tol]\nsecond_order = 1e-9\n");
    for p in [&unknown, &broken] {
        let o = ng(&["--config", p.to_str().unwrap(), "ng", "--state", "fock:k=1"]);
        assert_eq!(code(&o), EXIT_USAGE, "{}", stderr(&o));
    }
    let missing = dir.path().join("absent.toml");
    assert_eq!(code(&ng(&["--config", missing.to_str().unwrap(), "ng", "--state", "fock:k=1"])), EXIT_USAGE);

    let base = ["theorem", "--which", "second-order", "--count", "4"];
    let mut from_file = vec!["--config", tol.to_str().unwrap()];
    from_file.extend(base);
    assert_eq!(code(&ng(&from_file)), EXIT_VERIFICATION);
    from_file.extend(["--tol", "second_order=0.01"]);
    assert_eq!(code(&ng(&from_file)), EXIT_OK);
}

#[test]
fn seeds_change_random_draws_only() {
    let a = ng(&["theorem", "--which", "1", "--count", "4", "--seed", "1"]);
    let b = ng(&["theorem", "--which", "1", "--count", "4", "--seed", "2"]);
    let c = ng(&["theorem", "--which", "1", "--count", "4", "--seed", "1", "--jobs", "1"]);
    assert_eq!(code(&a), EXIT_OK);
    assert_ne!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn search_summary_names_the_fock_state() {
    let o = ng(&["search", "--support", "10", "--restarts", "3", "--iterations", "80"]);
    assert_eq!(code(&o), EXIT_OK, "{}", stderr(&o));
    let rows = records(&stdout(&o));
    assert_eq!(rows.len(), 10);
    assert_eq!(&rows[4][1], "1");
    assert!(stderr(&o).contains("match true"));
}

fn write_table(table: &Table, path: &Path) -> String {
    write_csv(table, Some(path)).unwrap();
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn empty_table_is_just_a_header() {
    let dir = tempfile::tempdir().unwrap();
    let text = write_table(&Table::new(&["a", "b"]), &dir.path().join("e.csv"));
    assert_eq!(text, "a,b\n");
}

#[test]
fn numeric_cells_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let values = [std::f64::consts::PI, -1.0 / 7.0, 6.02214076e23, 1.5e-14];
    let mut t = Table::new(&["label", "count", "x0", "x1", "x2", "x3"]);
    let mut row: Vec<Cell> = vec!["with,comma".into(), 7usize.into()];
    row.extend(values.iter().map(|&v| Cell::from(v)));
    t.push(row);
    let text = write_table(&t, &dir.path().join("r.csv"));
    let rec = &records(&text)[0];
    assert_eq!(&rec[0], "with,comma");
    assert_eq!(&rec[1], "7");
    for (i, v) in values.iter().enumerate() {
        let back: f64 = rec[2 + i].parse().unwrap();
        assert!(((back - v) / v).abs() < 1e-11, "{back} vs {v}");
    }
}

#[test]
fn non_finite_cells_are_refused() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("n.csv");
    let mut t = Table::new(&["x"]);
    t.push(vec![f64::NAN.into()]);
    let err = write_csv(&t, Some(&path)).unwrap_err();
    assert_eq!(err.exit_code(), EXIT_GUARD);
    assert!(!path.exists());
}
