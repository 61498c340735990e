//! Report emission: the stage-report table (CSV and Markdown), plot-data
//! series and the calibration fit report.
//!
//! Every emitter is deterministic byte-for-byte for identical inputs. All
//! numbers are dot-decimal with two fractional digits; NPV columns are
//! thousands of RUB, IRR columns percent, DPP columns years; metrics without
//! a defined value print as `NA`.

use crate::error::{CliError, Result};
use std::fmt::Write as _;
use subsidyscope_core::{
    classify, sweep, BreakEvenResult, Calibration, CashFlowLedger, FitOutcome, PortfolioBreakEven,
    Project, RiskMode, Scenario, StageReport, TrajectoryClass,
};

/// One line of the stage report, mirroring the published table's columns.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub project: String,
    pub scenario: String,
    pub npv_s3: f64,
    /// Stage-3 IRR as a fraction, when defined.
    pub irr_s3: Option<f64>,
    pub npv_s4: f64,
    pub irr_s4: Option<f64>,
    /// Full-lifetime payback with the risk stream, years.
    pub dpp_risk: Option<f64>,
    /// Full-lifetime payback in the classic (risk-free) assessment, years.
    pub dpp_classic: Option<f64>,
    pub class: TrajectoryClass,
}

/// Evaluates every (scenario, project) pair in both risk modes and builds
/// report rows, ordered by (scenario id, project name).
pub fn build_rows(
    projects: &[Project],
    scenarios: &[Scenario],
    cal: &Calibration,
) -> Result<Vec<ReportRow>> {
    let with_risk = sweep(projects, scenarios, cal, RiskMode::WithRisk)?;
    let classic = sweep(projects, scenarios, cal, RiskMode::Classic)?;
    Ok(with_risk
        .iter()
        .zip(&classic)
        .map(|(risk, base)| row_from_reports(risk, base, cal.classification_margin))
        .collect())
}

fn row_from_reports(risk: &StageReport, classic: &StageReport, margin: f64) -> ReportRow {
    debug_assert_eq!(risk.project, classic.project);
    debug_assert_eq!(risk.scenario, classic.scenario);
    ReportRow {
        project: risk.project.clone(),
        scenario: risk.scenario.clone(),
        npv_s3: risk.stage3().npv.0,
        irr_s3: risk.stage3().irr.rate,
        npv_s4: risk.stage4().npv.0,
        irr_s4: risk.stage4().irr.rate,
        dpp_risk: risk.stage4().dpp.years(),
        dpp_classic: classic.stage4().dpp.years(),
        class: classify(risk, margin),
    }
}

fn money(x: f64) -> String {
    format!("{x:.2}")
}

fn percent(rate: Option<f64>) -> String {
    match rate {
        Some(r) => format!("{:.2}", r * 100.0),
        None => "NA".into(),
    }
}

fn years(y: Option<f64>) -> String {
    match y {
        Some(y) => format!("{y:.2}"),
        None => "NA".into(),
    }
}

/// Header of the stage-report CSV, in stable column order.
pub const REPORT_HEADER: &str =
    "project,scenario,npv_s3,irr_s3,npv_s4,irr_s4,dpp_risk,dpp_classic,class";

fn csv_field(text: &str) -> String {
    if text.contains([',', '"', '\n']) {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text.to_string()
    }
}

/// Renders the stage report as CSV: dot decimals, comma delimiter, LF line
/// endings. Fails on empty input rather than emitting an empty file.
pub fn emit_stage_report_csv(rows: &[ReportRow]) -> Result<String> {
    if rows.is_empty() {
        return Err(CliError::EmptyReport);
    }
    let mut out = String::from(REPORT_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            csv_field(&r.project),
            csv_field(&r.scenario),
            money(r.npv_s3),
            percent(r.irr_s3),
            money(r.npv_s4),
            percent(r.irr_s4),
            years(r.dpp_risk),
            years(r.dpp_classic),
            r.class
        );
    }
    Ok(out)
}

/// Renders the stage report as a Markdown table mirroring the published
/// layout, with the trajectory commentary spelled out.
pub fn emit_stage_report_md(rows: &[ReportRow]) -> Result<String> {
    if rows.is_empty() {
        return Err(CliError::EmptyReport);
    }
    let mut out = String::new();
    out.push_str("| Project | Scenario | NPV s3 (thous. RUB) | IRR s3 (%) | NPV s4 (thous. RUB) | IRR s4 (%) | DPP risk (y) | DPP classic (y) | Trajectory |\n");
    out.push_str("|---|---|---:|---:|---:|---:|---:|---:|---|\n");
    for r in rows {
        let _ = writeln!(
            out,
            "| {} | {} | {} | {} | {} | {} | {} | {} | {} |",
            r.project,
            r.scenario,
            money(r.npv_s3),
            percent(r.irr_s3),
            money(r.npv_s4),
            percent(r.irr_s4),
            years(r.dpp_risk),
            years(r.dpp_classic),
            r.class.commentary()
        );
    }
    Ok(out)
}

/// Cumulative discounted flow on the dense 0.5-year grid: sparse ledger
/// entries are carried forward so the time column always steps by 0.5.
pub fn series_on_grid(ledger: &CashFlowLedger, rate: f64, grid_len: usize) -> Result<Vec<(f64, f64)>> {
    let sparse = subsidyscope_core::cumulative_discounted(ledger, rate)?;
    let mut out = Vec::with_capacity(grid_len);
    let mut cursor = 0;
    let mut cum = 0.0;
    for i in 0..grid_len {
        let t = i as f64 * 0.5;
        while cursor < sparse.len() && sparse[cursor].0 <= t {
            cum = sparse[cursor].1;
            cursor += 1;
        }
        out.push((t, cum));
    }
    Ok(out)
}

/// Renders a `(t_years, value)` series as two-column CSV.
pub fn emit_series(series: &[(f64, f64)]) -> String {
    let mut out = String::from("t_years,value\n");
    for (t, v) in series {
        let _ = writeln!(out, "{t:.1},{v:.2}");
    }
    out
}

/// Renders the calibration fit report as Markdown, including the rows whose
/// class hinges on the payback-margin rule.
pub fn emit_fit_report_md(fit: &FitOutcome) -> String {
    let mut out = String::new();
    out.push_str("# Calibration fit report\n\n");
    let _ = writeln!(
        out,
        "- NPV sign matches: {}/{}",
        2 * fit.rows.len() - fit.loss.sign_mismatches,
        2 * fit.rows.len()
    );
    let _ = writeln!(
        out,
        "- Trajectory class matches: {}/{}",
        fit.class_matches, fit.class_targets
    );
    let _ = writeln!(out, "- Mean relative NPV error: {:.4}", fit.loss.value_error);
    let _ = writeln!(
        out,
        "- Capacity-weighted break-even support duration: {}",
        match fit.capacity_weighted_breakeven {
            Some(d) => format!("{d:.1} years (band distance {:.2})", fit.loss.band_violation),
            None => "not attainable".into(),
        }
    );
    let _ = writeln!(
        out,
        "- Classification margin δ: {} years",
        fit.calibration.classification_margin
    );
    let _ = writeln!(out, "- Loss evaluations: {}", fit.evaluations);
    out.push('\n');

    out.push_str("| Project | NPV s3 target | NPV s3 model | sign | NPV s4 target | NPV s4 model | sign | IRR s3 model (%) | IRR s4 model (%) | Class target | Class model | match | δ-sensitive |\n");
    out.push_str("|---|---:|---:|:-:|---:|---:|:-:|---:|---:|---|---|:-:|:-:|\n");
    for r in &fit.rows {
        let _ = writeln!(
            out,
            "| {} | {} | {} | {} | {} | {} | {} | {} | {} | {} | {} | {} | {} |",
            r.project,
            money(r.target_npv_s3),
            money(r.model_npv_s3),
            if r.sign_ok_s3 { "ok" } else { "MISMATCH" },
            money(r.target_npv_s4),
            money(r.model_npv_s4),
            if r.sign_ok_s4 { "ok" } else { "MISMATCH" },
            percent(r.model_irr_s3),
            percent(r.model_irr_s4),
            r.target_class.map_or("—".into(), |c| c.to_string()),
            r.model_class,
            match r.class_match {
                Some(true) => "ok",
                Some(false) => "DIFFERS",
                None => "—",
            },
            if r.ambiguous { "yes" } else { "—" }
        );
    }
    out.push('\n');

    let ambiguous: Vec<&str> = fit
        .rows
        .iter()
        .filter(|r| r.ambiguous)
        .map(|r| r.project.as_str())
        .collect();
    if ambiguous.is_empty() {
        out.push_str("No rows are sensitive to the classification margin.\n");
    } else {
        let _ = writeln!(
            out,
            "Rows whose class depends on the classification margin δ \
             (stage-3 NPV ≤ 0 ≤ stage-4 NPV, split by payback time): {}.",
            ambiguous.join(", ")
        );
    }
    out
}

/// Renders the break-even summary for a set of projects: per-project
/// durations plus the three portfolio readings.
pub fn emit_breakeven_summary(pb: &PortfolioBreakEven) -> String {
    let show = |r: &BreakEvenResult| match r {
        BreakEvenResult::Attained { duration } => format!("{duration:.1} years"),
        BreakEvenResult::NotAttainable => "not attainable within 15 years".into(),
    };
    let mut out = String::from("break-even support duration (stage-4 NPV >= 0, with risk)\n\n");
    for (name, r) in &pb.per_project {
        let _ = writeln!(out, "  {name}: {}", show(r));
    }
    out.push('\n');
    let _ = writeln!(out, "  portfolio, capacity-weighted median: {}", show(&pb.capacity_weighted_median));
    let _ = writeln!(out, "  portfolio, plain median:             {}", show(&pb.median));
    let _ = writeln!(out, "  portfolio, aggregate ledger:         {}", show(&pb.aggregate));
    out
}
