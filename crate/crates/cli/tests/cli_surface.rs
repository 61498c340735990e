//! End-to-end tests of the `subsidyscope` binary: exit-code contract,
//! output file shapes, and the pinned checksums of the bundled dataset.

use proptest::prelude::*;
use sha2::{Digest, Sha256};
use std::process::{Command, Output};
use subsidyscope_cli::config::{parse_calibration, BUNDLED_PROJECTS, BUNDLED_TARGETS, DEFAULT_CALIBRATION};
use subsidyscope_cli::dataset::parse_projects;
use subsidyscope_cli::locale::{format_number, parse_number, Locale};
use subsidyscope_cli::report::REPORT_HEADER;
use subsidyscope_core::{evaluate_stages, RiskMode, Scenario};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_subsidyscope"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

// ---------------------------------------------------------------------
// Exit-code contract: 0 ok/help/version, 1 usage, 2 input errors
// ---------------------------------------------------------------------

#[test]
fn help_and_version_exit_zero() {
    let help = run(&["--help"]);
    assert_eq!(help.status.code(), Some(0));
    assert!(stdout_of(&help).contains("subsidyscope"));

    let version = run(&["--version"]);
    assert_eq!(version.status.code(), Some(0));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["--no-such-flag"]).status.code(), Some(1));
    assert_eq!(run(&["not-a-command"]).status.code(), Some(1));
    assert_eq!(run(&[]).status.code(), Some(1));
    // a bad locale is rejected at argument parsing, before any work happens
    assert_eq!(
        run(&["--locale", "de-comma", "evaluate", "SPP-2022-1"]).status.code(),
        Some(1)
    );
}

#[test]
fn input_errors_exit_two() {
    let unknown_project = run(&["evaluate", "No Such Plant"]);
    assert_eq!(unknown_project.status.code(), Some(2));
    assert!(stderr_of(&unknown_project).starts_with("error: "));

    let unknown_scenario = run(&["evaluate", "SPP-2022-1", "--scenario", "S99"]);
    assert_eq!(unknown_scenario.status.code(), Some(2));

    let off_grid_step = run(&["breakeven", "--grid", "0.3"]);
    assert_eq!(off_grid_step.status.code(), Some(2));

    let missing_file = run(&["--dataset", "/nonexistent/projects.csv", "report"]);
    assert_eq!(missing_file.status.code(), Some(2));
}

// ---------------------------------------------------------------------
// Command output shapes
// ---------------------------------------------------------------------

#[test]
fn evaluate_prints_stage_table_and_trajectory() {
    let out = run(&["evaluate", "SPP-2022-1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    for needle in [
        "1 decision date",
        "2 operation start",
        "3 support end",
        "4 lifetime end",
        "trajectory:",
    ] {
        assert!(text.contains(needle), "missing '{needle}' in:\n{text}");
    }
}

#[test]
fn sweep_writes_identical_csv_on_repeat() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.csv");
    let second = dir.path().join("second.csv");

    let a = run(&["sweep", "--out", first.to_str().unwrap()]);
    assert_eq!(a.status.code(), Some(0), "{}", stderr_of(&a));
    let b = run(&["sweep", "--out", second.to_str().unwrap()]);
    assert_eq!(b.status.code(), Some(0));

    let first = std::fs::read_to_string(&first).unwrap();
    let second = std::fs::read_to_string(&second).unwrap();
    assert_eq!(first, second, "repeat sweeps must be byte-identical");
    assert_eq!(first.lines().next(), Some(REPORT_HEADER));
    assert_eq!(first.lines().count(), 1 + 11 * 10);
}

#[test]
fn series_steps_by_half_year_and_ends_at_lifetime_npv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("series.csv");
    let out = run(&["series", "--project", "SPP-2022-1", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));

    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t_years,value"));

    let mut last_value = f64::NAN;
    for (i, line) in lines.enumerate() {
        let (t, v) = line.split_once(',').expect("two columns");
        let t: f64 = t.parse().unwrap();
        assert!((t - i as f64 * 0.5).abs() < 1e-12, "grid broken at {line}");
        last_value = v.parse().unwrap();
    }

    let projects = parse_projects(BUNDLED_PROJECTS, Locale::RuDecimalComma).unwrap();
    let cal = parse_calibration(DEFAULT_CALIBRATION).unwrap();
    let p = projects.iter().find(|p| p.name == "SPP-2022-1").unwrap();
    let rep = evaluate_stages(p, &cal, &Scenario::baseline(), RiskMode::WithRisk).unwrap();
    // the file is rounded to 2 decimals, so allow half a cent
    assert!(
        (last_value - rep.stage4().npv.0).abs() <= 0.005 + 1e-9,
        "terminal series value {last_value} vs stage-4 NPV {}",
        rep.stage4().npv.0
    );
}

#[test]
fn report_markdown_goes_to_stdout() {
    let out = run(&["report", "--format", "md"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    assert!(text.starts_with("| Project | Scenario |"));
    assert_eq!(text.lines().count(), 2 + 11 * 10);
}

#[test]
fn breakeven_portfolio_prints_three_readings() {
    let out = run(&["breakeven"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    for needle in [
        "capacity-weighted median",
        "plain median",
        "aggregate ledger",
    ] {
        assert!(text.contains(needle), "missing '{needle}' in:\n{text}");
    }
    // eleven per-project lines between the heading and the portfolio block
    let project_lines = text
        .lines()
        .filter(|l| l.starts_with("  ") && !l.contains("portfolio"))
        .count();
    assert_eq!(project_lines, 11);
}

#[test]
fn coarser_breakeven_grid_is_consistent() {
    let fine = run(&["breakeven", "--project", "Saratov SPP"]);
    let coarse = run(&["breakeven", "--project", "Saratov SPP", "--grid", "1.0"]);
    assert_eq!(fine.status.code(), Some(0));
    assert_eq!(coarse.status.code(), Some(0));
    let parse_years = |s: &str| -> f64 {
        s.split(": ").nth(1).unwrap().split(' ').next().unwrap().parse().unwrap()
    };
    let fine_years = parse_years(&stdout_of(&fine));
    let coarse_years = parse_years(&stdout_of(&coarse));
    // a coarser grid can only overshoot the finest attainable duration
    assert!(coarse_years >= fine_years - 1e-12);
    assert!(coarse_years - fine_years < 1.0);
}

// ---------------------------------------------------------------------
// Bundled dataset pins
// ---------------------------------------------------------------------

fn sha256_hex(text: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(text.as_bytes());
    format!("{:x}", hasher.finalize())
}

/// The embedded source tables are normative inputs: any byte change is a
/// deliberate data revision and must update these pins.
#[test]
fn bundled_dataset_checksums_are_pinned() {
    assert_eq!(
        sha256_hex(BUNDLED_PROJECTS),
        "de259e5ef8a0dad293fa7c81867cea71aee3d243d231c5716489cfb08b500252"
    );
    assert_eq!(
        sha256_hex(BUNDLED_TARGETS),
        "6077cce7b0a87c00263af13e16d8cfc7bda148f6a30f5b1a479e70985330795e"
    );
}

// ---------------------------------------------------------------------
// Locale round-trip: formatting a 2-decimal value and parsing it back is
// the identity, in both locales, across the full report value range.
// ---------------------------------------------------------------------

proptest! {
    #[test]
    fn locale_round_trip_is_identity(cents in -100_000_000_000_i64..=100_000_000_000_i64) {
        let x = cents as f64 / 100.0;
        for locale in [Locale::RuDecimalComma, Locale::DotDecimal] {
            let shown = format_number(x, locale);
            let back = parse_number(&shown, locale).expect("formatted output parses");
            prop_assert_eq!(back, x, "{} via {:?}", shown, locale);
        }
    }
}
