//! The command-line binary: subcommands, output files and exit codes.

use std::path::Path;
use std::process::{Command, Output};

use mprk_harness::io::{read_json, read_snapshot, RunSummary};
use mprk_harness::study::{CflSearch, EocTable};

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mprk-euler")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn run_writes_snapshots_summary_and_exact_solution() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli(&[
        "run",
        "--scenario",
        "contact",
        "--scheme",
        "MPE-s",
        "--cells",
        "100",
        "--out",
        path(dir.path()),
        "--exact",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let summary: RunSummary = read_json(&dir.path().join("summary.json")).unwrap();
    assert!(summary.completed && summary.failure.is_none());
    assert_eq!((summary.scheme.as_str(), summary.cells, summary.order), ("MPE-s", 100, 1));
    assert_eq!(summary.snapshots.len(), 2);
    let last = read_snapshot(&dir.path().join(summary.snapshots.last().unwrap())).unwrap();
    assert_eq!(last.columns, ["x", "rho", "u", "p", "rhoE"]);
    assert_eq!(last.rows.len(), 100);
    assert_eq!(last.meta("scenario"), Some("contact"));
    // the contact stays a contact
    assert!(last.column("p").unwrap().iter().all(|p| (p - 3.0).abs() < 1e-9));
    let exact = read_snapshot(&dir.path().join("exact.csv")).unwrap();
    assert_eq!(exact.meta("source"), Some("exact"));
    assert_eq!(exact.column("x"), last.column("x"));
    assert!(String::from_utf8_lossy(&out.stdout).contains("L1 density error"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    let out_dir = dir.path().join("res");
    std::fs::write(
        &cfg,
        format!("# smooth run\nscenario = smooth\nscheme = Heun\ncells = 400\nout = {}\n", out_dir.display()),
    )
    .unwrap();
    let out = cli(&["run", "--config", path(&cfg), "--cells", "32", "--tend", "0.01", "--snapshots", "1"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let summary: RunSummary = read_json(&out_dir.join("summary.json")).unwrap();
    assert_eq!(summary.cells, 32);
    assert_eq!(summary.t_end, 0.01);
    assert!(summary.snapshots.len() > 2);
}

#[test]
fn positivity_failure_exits_with_two_and_keeps_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli(&[
        "run",
        "--scenario",
        "vacuum",
        "--scheme",
        "MPE-rhoE",
        "--cells",
        "200",
        "--cfl",
        "0.1",
        "--out",
        path(dir.path()),
    ]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("pressure"));
    let summary: RunSummary = read_json(&dir.path().join("summary.json")).unwrap();
    let failure = summary.failure.unwrap();
    assert!(!summary.completed && failure.positivity);
}

#[test]
fn configuration_errors_exit_with_three() {
    for args in [
        &["run", "--scenario", "smooth", "--scheme", "MPE", "--order", "2"][..],
        &["run", "--scheme", "MPE"],
        &["run", "--scenario", "smooth", "--scheme", "MPE", "--cfl=-1"],
        &["eoc", "--cells", "10,30"],
    ] {
        let out = cli(args);
        assert_eq!(code(&out), 3, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn io_errors_exit_with_four() {
    let out = cli(&["run", "--config", "/nonexistent/run.cfg"]);
    assert_eq!(code(&out), 4);
}

#[test]
fn unknown_scheme_is_a_configuration_error() {
    let out = cli(&["run", "--scenario", "smooth", "--scheme", "RK4"]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("RK4"));
}

#[test]
fn help_exits_with_zero() {
    let out = cli(&["--help"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("eoc"));
}

#[test]
fn eoc_subcommand_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli(&["eoc", "--scheme", "FE,MPHeun-s", "--cells", "20,40", "--out", path(dir.path())]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let tables: Vec<EocTable> = read_json(&dir.path().join("eoc.json")).unwrap();
    assert_eq!(tables.len(), 2);
    assert_eq!(tables[1].scheme, "MPHeun-s");
    assert_eq!(tables[0].rows.iter().map(|r| r.cells).collect::<Vec<_>>(), [20, 40]);
}

#[test]
fn cfl_subcommand_writes_search() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli(&["cfl", "--scenario", "contact", "--scheme", "MPE-s", "--cells", "50", "--out", path(dir.path())]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let search: CflSearch = read_json(&dir.path().join("cfl.json")).unwrap();
    assert_eq!(search.cfl, 1.0);
    assert!(search.monotone);
    assert!(String::from_utf8_lossy(&out.stdout).contains("max stable CFL 1"));
}
