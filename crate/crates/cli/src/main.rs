//! `subsidyscope` — staged techno-economic assessment of capacity-supported
//! solar projects: four-stage NPV/IRR/DPP evaluation, scenario sweeps,
//! break-even support-duration solving and calibration against published
//! targets.

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use std::path::{Path, PathBuf};
use subsidyscope_cli::config::{self, load_calibration, load_scenarios};
use subsidyscope_cli::dataset::{load_projects, load_targets, parse_projects};
use subsidyscope_cli::error::{exit_code, CliError, Result};
use subsidyscope_cli::locale::Locale;
use subsidyscope_cli::report::{
    build_rows, emit_breakeven_summary, emit_fit_report_md, emit_series, emit_stage_report_csv,
    emit_stage_report_md, series_on_grid,
};
use subsidyscope_core::{
    breakeven_support, calibrate, classify, evaluate_stages, portfolio_breakeven, scenario_ledger,
    stage4_npv_at_duration, BreakEvenResult, CalibrateOptions, CalibrationBounds, Calibration,
    DppOutcome, Error as EngineError, PortfolioBreakEven, Project, RiskMode, Scenario,
    MAX_SUPPORT_YEARS,
};

#[derive(Parser)]
#[command(
    name = "subsidyscope",
    version,
    about = "Staged NPV/IRR/DPP assessment of capacity-supported solar projects",
    propagate_version = true
)]
struct Cli {
    /// Calibration file; overrides SUBSIDYSCOPE_CONFIG and the embedded default
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Projects CSV; defaults to the bundled eleven-project dataset
    #[arg(long, global = true, value_name = "FILE")]
    dataset: Option<PathBuf>,

    /// Number locale of --dataset and --targets files (the bundled files are
    /// ru-decimal-comma)
    #[arg(long, global = true, default_value = "ru-decimal-comma", value_name = "LOCALE")]
    locale: Locale,

    /// Scenario definitions file; defaults to the bundled S0–S9 set
    #[arg(long, global = true, value_name = "FILE")]
    scenarios_file: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one project across the four assessment stages
    Evaluate {
        /// Project name as it appears in the dataset
        project: String,
        /// Scenario id (S0 is the baseline)
        #[arg(long, default_value = "S0")]
        scenario: String,
        /// Include the risk cost stream, or run the classic assessment
        #[arg(long, value_enum, default_value_t = RiskArg::On)]
        risk: RiskArg,
    },
    /// Evaluate projects × scenarios and write the stage report as CSV
    Sweep {
        /// Comma-separated project names, or "all"
        #[arg(long, default_value = "all")]
        projects: String,
        /// Comma-separated scenario ids, or "all"
        #[arg(long, default_value = "all")]
        scenarios: String,
        /// Output CSV path
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
    /// Solve the smallest support duration with nonnegative lifetime NPV
    Breakeven {
        /// Solve for a single project
        #[arg(long, conflicts_with = "portfolio")]
        project: Option<String>,
        /// Report every project plus the three portfolio readings (default)
        #[arg(long)]
        portfolio: bool,
        /// Search-grid step in years; a positive multiple of 0.5
        #[arg(long, default_value_t = 0.5)]
        grid: f64,
    },
    /// Fit calibration values to published targets and write them out
    Calibrate {
        /// Targets CSV (name, stage-3/4 NPV and IRR, optional trajectory)
        #[arg(long, value_name = "FILE")]
        targets: PathBuf,
        /// Destination for the fitted calibration
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
        /// Optional Markdown fit-report destination
        #[arg(long, value_name = "FILE")]
        fit_report: Option<PathBuf>,
        /// Cap on loss evaluations for the search
        #[arg(long, default_value_t = 4000)]
        max_evaluations: usize,
    },
    /// Emit the full stage report for all projects and scenarios
    Report {
        /// Output format
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Write to a file instead of stdout
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Emit plot data for one project under one scenario
    Series {
        /// Project name as it appears in the dataset
        #[arg(long)]
        project: String,
        /// Scenario id
        #[arg(long, default_value = "S0")]
        scenario: String,
        /// Metric to emit
        #[arg(long, value_enum, default_value_t = Metric::Cumnpv)]
        metric: Metric,
        /// Output CSV path
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum RiskArg {
    On,
    Off,
}

impl RiskArg {
    fn mode(self) -> RiskMode {
        match self {
            RiskArg::On => RiskMode::WithRisk,
            RiskArg::Off => RiskMode::Classic,
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Md,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Metric {
    /// Cumulative discounted net flow per half-year
    Cumnpv,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    if let Err(err) = run(cli) {
        eprintln!("error: {err}");
        std::process::exit(exit_code(&err));
    }
}

fn run(cli: Cli) -> Result<()> {
    let cal = load_calibration(cli.config.as_deref())?;
    let projects = match cli.dataset.as_deref() {
        Some(path) => load_projects(path, cli.locale)?.projects,
        None => parse_projects(config::BUNDLED_PROJECTS, Locale::RuDecimalComma)?,
    };
    let scenarios = load_scenarios(cli.scenarios_file.as_deref())?;

    match cli.command {
        Command::Evaluate {
            project,
            scenario,
            risk,
        } => cmd_evaluate(&projects, &scenarios, &cal, &project, &scenario, risk.mode()),
        Command::Sweep {
            projects: project_filter,
            scenarios: scenario_filter,
            out,
        } => cmd_sweep(&projects, &scenarios, &cal, &project_filter, &scenario_filter, &out),
        Command::Breakeven {
            project,
            portfolio: _,
            grid,
        } => cmd_breakeven(&projects, &cal, project.as_deref(), grid),
        Command::Calibrate {
            targets,
            out,
            fit_report,
            max_evaluations,
        } => cmd_calibrate(
            &projects,
            &cal,
            cli.locale,
            &targets,
            &out,
            fit_report.as_deref(),
            max_evaluations,
        ),
        Command::Report { format, out } => {
            cmd_report(&projects, &scenarios, &cal, format, out.as_deref())
        }
        Command::Series {
            project,
            scenario,
            metric: Metric::Cumnpv,
            out,
        } => cmd_series(&projects, &scenarios, &cal, &project, &scenario, &out),
    }
}

fn find_project<'a>(projects: &'a [Project], name: &str) -> Result<&'a Project> {
    projects
        .iter()
        .find(|p| p.name == name)
        .ok_or_else(|| CliError::Engine(EngineError::UnknownProject(name.to_string())))
}

fn find_scenario<'a>(scenarios: &'a [Scenario], id: &str) -> Result<&'a Scenario> {
    scenarios
        .iter()
        .find(|s| s.id == id)
        .ok_or_else(|| CliError::UnknownScenario(id.to_string()))
}

fn write_output(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn cmd_evaluate(
    projects: &[Project],
    scenarios: &[Scenario],
    cal: &Calibration,
    project: &str,
    scenario: &str,
    mode: RiskMode,
) -> Result<()> {
    let p = find_project(projects, project)?;
    let sc = find_scenario(scenarios, scenario)?;
    let report = evaluate_stages(p, cal, sc, mode)?;

    let risk_label = match mode {
        RiskMode::WithRisk => "with risk",
        RiskMode::Classic => "classic (no risk)",
    };
    println!("{} — scenario {} ({}) — {}", p.name, sc.id, sc.description, risk_label);
    println!();
    println!(
        "  {:<24} {:>7}  {:>18}  {:>9}  {:>12}",
        "stage boundary", "years", "NPV (thous. RUB)", "IRR (%)", "DPP (years)"
    );
    let labels = [
        "1 decision date",
        "2 operation start",
        "3 support end",
        "4 lifetime end",
    ];
    for (label, (t, bundle)) in labels
        .iter()
        .zip(report.timeline.boundaries().iter().zip(&report.stages))
    {
        let irr = match bundle.irr.rate {
            Some(r) => format!("{:.2}", r * 100.0),
            None => "NA".into(),
        };
        let dpp = match bundle.dpp {
            DppOutcome::Reached { years } => format!("{years:.2}"),
            DppOutcome::NotReached => "NA".into(),
        };
        println!(
            "  {:<24} {:>7.1}  {:>18.2}  {:>9}  {:>12}",
            label, t, bundle.npv.0, irr, dpp
        );
    }
    println!();
    let class = classify(&report, cal.classification_margin);
    println!("  trajectory: {class} — {}", class.commentary());
    Ok(())
}

fn split_filter<'a>(filter: &'a str) -> Option<Vec<&'a str>> {
    if filter.trim().eq_ignore_ascii_case("all") {
        None
    } else {
        Some(filter.split(',').map(str::trim).filter(|s| !s.is_empty()).collect())
    }
}

fn cmd_sweep(
    projects: &[Project],
    scenarios: &[Scenario],
    cal: &Calibration,
    project_filter: &str,
    scenario_filter: &str,
    out: &Path,
) -> Result<()> {
    let selected_projects: Vec<Project> = match split_filter(project_filter) {
        None => projects.to_vec(),
        Some(names) => names
            .iter()
            .map(|n| find_project(projects, n).cloned())
            .collect::<Result<_>>()?,
    };
    let selected_scenarios: Vec<Scenario> = match split_filter(scenario_filter) {
        None => scenarios.to_vec(),
        Some(ids) => ids
            .iter()
            .map(|id| find_scenario(scenarios, id).cloned())
            .collect::<Result<_>>()?,
    };
    let rows = build_rows(&selected_projects, &selected_scenarios, cal)?;
    write_output(out, &emit_stage_report_csv(&rows)?)?;
    println!("wrote {} rows to {}", rows.len(), out.display());
    Ok(())
}

fn validate_grid(step: f64) -> Result<f64> {
    let half_steps = step / 0.5;
    if step.is_finite()
        && step > 0.0
        && step <= MAX_SUPPORT_YEARS
        && (half_steps - half_steps.round()).abs() < 1e-9
    {
        Ok(step)
    } else {
        Err(CliError::BadGridStep(step))
    }
}

/// Break-even scan on a caller-chosen grid; `step` must be a multiple of 0.5
/// so every candidate duration stays on the ledger grid.
fn breakeven_on_grid(p: &Project, cal: &Calibration, step: f64) -> Result<BreakEvenResult> {
    let n = (MAX_SUPPORT_YEARS / step).floor() as usize;
    for k in 0..=n {
        let d = (k as f64 * step * 2.0).round() / 2.0;
        if d > MAX_SUPPORT_YEARS {
            break;
        }
        if stage4_npv_at_duration(p, cal, d)? >= 0.0 {
            return Ok(BreakEvenResult::Attained { duration: d });
        }
    }
    Ok(BreakEvenResult::NotAttainable)
}

/// Portfolio summary on a caller-chosen grid, mirroring the engine's
/// half-year-grid aggregation.
fn portfolio_on_grid(
    projects: &[Project],
    cal: &Calibration,
    step: f64,
) -> Result<PortfolioBreakEven> {
    let mut per_project = Vec::with_capacity(projects.len());
    let mut weighted: Vec<(f64, f64)> = Vec::with_capacity(projects.len());
    for p in projects {
        let be = breakeven_on_grid(p, cal, step)?;
        weighted.push((be.duration().unwrap_or(f64::INFINITY), p.installed_capacity));
        per_project.push((p.name.clone(), be));
    }
    weighted.sort_by(|a, b| a.0.total_cmp(&b.0));

    let total_capacity: f64 = weighted.iter().map(|(_, c)| c).sum();
    let mut cum = 0.0;
    let mut capacity_weighted_median = BreakEvenResult::NotAttainable;
    for &(d, c) in &weighted {
        cum += c;
        if cum >= total_capacity / 2.0 {
            if d.is_finite() {
                capacity_weighted_median = BreakEvenResult::Attained { duration: d };
            }
            break;
        }
    }

    let median = match weighted.get(weighted.len() / 2) {
        Some(&(mid, _)) if mid.is_finite() => BreakEvenResult::Attained { duration: mid },
        _ => BreakEvenResult::NotAttainable,
    };

    let mut aggregate = BreakEvenResult::NotAttainable;
    let n = (MAX_SUPPORT_YEARS / step).floor() as usize;
    'grid: for k in 0..=n {
        let d = (k as f64 * step * 2.0).round() / 2.0;
        if d > MAX_SUPPORT_YEARS {
            break;
        }
        let mut total = 0.0;
        for p in projects {
            total += stage4_npv_at_duration(p, cal, d)?;
        }
        if total >= 0.0 {
            aggregate = BreakEvenResult::Attained { duration: d };
            break 'grid;
        }
    }

    Ok(PortfolioBreakEven {
        per_project,
        capacity_weighted_median,
        median,
        aggregate,
    })
}

fn cmd_breakeven(
    projects: &[Project],
    cal: &Calibration,
    project: Option<&str>,
    grid: f64,
) -> Result<()> {
    let step = validate_grid(grid)?;
    let default_grid = (step - 0.5).abs() < 1e-12;
    match project {
        Some(name) => {
            let p = find_project(projects, name)?;
            let be = if default_grid {
                breakeven_support(p, cal)?
            } else {
                breakeven_on_grid(p, cal, step)?
            };
            match be {
                BreakEvenResult::Attained { duration } => {
                    println!("{}: {:.1} years", p.name, duration)
                }
                BreakEvenResult::NotAttainable => {
                    println!("{}: not attainable within {MAX_SUPPORT_YEARS:.0} years", p.name)
                }
            }
        }
        None => {
            let pb = if default_grid {
                portfolio_breakeven(projects, cal)?
            } else {
                portfolio_on_grid(projects, cal, step)?
            };
            print!("{}", emit_breakeven_summary(&pb));
        }
    }
    Ok(())
}

fn cmd_calibrate(
    projects: &[Project],
    template: &Calibration,
    locale: Locale,
    targets_path: &Path,
    out: &Path,
    fit_report: Option<&Path>,
    max_evaluations: usize,
) -> Result<()> {
    let targets = load_targets(targets_path, locale)?;
    let options = CalibrateOptions {
        max_evaluations,
        ..CalibrateOptions::default()
    };
    let fit = calibrate(projects, &targets, &CalibrationBounds::default(), template, &options)?;

    let body = toml::to_string_pretty(&fit.calibration)
        .map_err(|e| CliError::BadCalibration(e.to_string()))?;
    let text = format!(
        "# Calibration fitted against published stage-3/stage-4 targets.\n\
         # Regenerate with: subsidyscope calibrate --targets <FILE> --out <FILE>\n\n{body}"
    );
    write_output(out, &text)?;
    println!("wrote calibration to {}", out.display());

    if let Some(path) = fit_report {
        write_output(path, &emit_fit_report_md(&fit))?;
        println!("wrote fit report to {}", path.display());
    }

    println!(
        "sign matches {}/{}, class matches {}/{}, mean relative NPV error {:.4}",
        2 * fit.rows.len() - fit.loss.sign_mismatches,
        2 * fit.rows.len(),
        fit.class_matches,
        fit.class_targets,
        fit.loss.value_error,
    );
    match fit.capacity_weighted_breakeven {
        Some(d) => println!("capacity-weighted break-even: {d:.1} years"),
        None => println!("capacity-weighted break-even: not attainable"),
    }
    println!(
        "classification margin {} years, {} loss evaluations",
        fit.calibration.classification_margin, fit.evaluations
    );
    Ok(())
}

fn cmd_report(
    projects: &[Project],
    scenarios: &[Scenario],
    cal: &Calibration,
    format: Format,
    out: Option<&Path>,
) -> Result<()> {
    let rows = build_rows(projects, scenarios, cal)?;
    let text = match format {
        Format::Csv => emit_stage_report_csv(&rows)?,
        Format::Md => emit_stage_report_md(&rows)?,
    };
    match out {
        Some(path) => {
            write_output(path, &text)?;
            println!("wrote {} rows to {}", rows.len(), path.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_series(
    projects: &[Project],
    scenarios: &[Scenario],
    cal: &Calibration,
    project: &str,
    scenario: &str,
    out: &Path,
) -> Result<()> {
    let p = find_project(projects, project)?;
    let sc = find_scenario(scenarios, scenario)?;
    let (ledger, timeline) = scenario_ledger(p, cal, sc, RiskMode::WithRisk)?;
    let series = series_on_grid(&ledger, cal.market.discount_rate, timeline.grid_len())?;
    write_output(out, &emit_series(&series))?;
    println!("wrote {} points to {}", series.len(), out.display());
    Ok(())
}
