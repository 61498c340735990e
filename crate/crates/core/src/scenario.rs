//! Scenario application, staged evaluation, trajectory classification,
//! scenario×project sweeps and break-even support-duration solving.
//!
//! The shipped scenario set is a reconstruction: the source assessment names
//! ten scenarios without enumerating them, so S0–S9 below cover the stated
//! dimensions (support cessation, reduced payments, amplified risk) and can
//! be replaced wholesale through scenario files.

use crate::cashflow::{build_ledger, zero_risk_stream, CashFlowLedger};
use crate::domain::{
    on_half_year_grid, stage_boundaries, MarketAssumptions, Project, SupportScheme, Timeline,
};
use crate::error::{Error, Result};
use crate::metrics::{evaluate, DppOutcome, MetricBundle};
use crate::risk::{risk_cost_stream, scale_risk, RiskProfile};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Maximum support duration considered anywhere, years.
pub const MAX_SUPPORT_YEARS: f64 = 15.0;

/// A parametric modification of support and risk conditions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub id: String,
    #[serde(default)]
    pub support_duration_override: Option<f64>,
    #[serde(default = "one")]
    pub payment_multiplier: f64,
    #[serde(default = "one")]
    pub risk_multiplier: f64,
    #[serde(default)]
    pub price_growth_override: Option<f64>,
    #[serde(default)]
    pub description: String,
}

fn one() -> f64 {
    1.0
}

impl Scenario {
    /// The neutral scenario: all inputs pass through unchanged.
    pub fn baseline() -> Scenario {
        Scenario {
            id: "S0".into(),
            support_duration_override: None,
            payment_multiplier: 1.0,
            risk_multiplier: 1.0,
            price_growth_override: None,
            description: "baseline support conditions".into(),
        }
    }
}

/// The reconstructed default scenario set, S0 through S9.
pub fn default_scenarios() -> Vec<Scenario> {
    let mut set = vec![Scenario::baseline()];
    let mut push = |id: &str, sd: Option<f64>, pm: f64, rm: f64, description: &str| {
        set.push(Scenario {
            id: id.into(),
            support_duration_override: sd,
            payment_multiplier: pm,
            risk_multiplier: rm,
            price_growth_override: None,
            description: description.into(),
        });
    };
    push("S1", Some(0.0), 1.0, 1.0, "immediate support cessation");
    push("S2", Some(5.0), 1.0, 1.0, "support ceases after 5 years");
    push("S3", Some(10.0), 1.0, 1.0, "support ceases after 10 years");
    push("S4", None, 0.75, 1.0, "capacity payments cut to 75%");
    push("S5", None, 0.50, 1.0, "capacity payments cut to 50%");
    push("S6", None, 0.25, 1.0, "capacity payments cut to 25%");
    push("S7", None, 1.0, 1.5, "risk costs amplified 1.5x");
    push("S8", None, 1.0, 2.0, "risk costs amplified 2x");
    push("S9", None, 0.50, 1.5, "half payments with amplified risk");
    set
}

/// Whether the risk-cost stream participates in an evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RiskMode {
    WithRisk,
    Classic,
}

/// Calibrated evaluation context: market, default support scheme, risk
/// profile and the classification margin δ (years).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    /// Years short of lifetime end a payback must stay to count as "remains
    /// within lifetime". Declared before the table-valued fields so the
    /// serialized file keeps scalars ahead of tables.
    #[serde(default = "default_margin")]
    pub classification_margin: f64,
    #[serde(default)]
    pub market: MarketAssumptions,
    #[serde(default)]
    pub support: SupportScheme,
    pub risk: RiskProfile,
}

fn default_margin() -> f64 {
    1.0
}

/// Metric bundles of one project at the four stage boundaries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageReport {
    pub project: String,
    pub scenario: String,
    /// Bundles at t_decision, t_operation_start, t_support_end,
    /// t_lifetime_end, in that order.
    pub stages: [MetricBundle; 4],
    pub timeline: Timeline,
    pub risk_mode: RiskMode,
}

impl StageReport {
    /// Bundle at the end of the support window (the third assessment stage).
    pub fn stage3(&self) -> &MetricBundle {
        &self.stages[2]
    }

    /// Bundle at lifetime end (the fourth assessment stage).
    pub fn stage4(&self) -> &MetricBundle {
        &self.stages[3]
    }
}

/// Trajectory of economic efficiency over the project stages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrajectoryClass {
    MaintainedWithinCsa,
    RemainsWithinLifetime,
    SlowedBeforeLifetime,
    InitiallyIneffective,
}

impl fmt::Display for TrajectoryClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TrajectoryClass::MaintainedWithinCsa => "maintained_within_csa",
            TrajectoryClass::RemainsWithinLifetime => "remains_within_lifetime",
            TrajectoryClass::SlowedBeforeLifetime => "slowed_before_lifetime",
            TrajectoryClass::InitiallyIneffective => "initially_ineffective",
        };
        f.write_str(s)
    }
}

impl TrajectoryClass {
    /// Long-form wording used in Markdown reports.
    pub fn commentary(self) -> &'static str {
        match self {
            TrajectoryClass::MaintainedWithinCsa => {
                "Efficiency is maintained within the term of the CSA"
            }
            TrajectoryClass::RemainsWithinLifetime => {
                "Efficiency remains within planned service life"
            }
            TrajectoryClass::SlowedBeforeLifetime => {
                "Achievement of efficiency is slowing down before the planned service life"
            }
            TrajectoryClass::InitiallyIneffective => "The project is initially ineffective",
        }
    }
}

/// Break-even support duration of one project.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BreakEvenResult {
    /// Smallest support duration (years, 0.5 grid) with stage-4 NPV ≥ 0.
    Attained { duration: f64 },
    /// Stage-4 NPV stays negative even at the maximum duration.
    NotAttainable,
}

impl BreakEvenResult {
    pub fn duration(self) -> Option<f64> {
        match self {
            BreakEvenResult::Attained { duration } => Some(duration),
            BreakEvenResult::NotAttainable => None,
        }
    }
}

/// Applies a scenario to the calibrated inputs, returning modified copies.
pub fn apply_scenario(
    m: &MarketAssumptions,
    s: &SupportScheme,
    r: &RiskProfile,
    sc: &Scenario,
) -> Result<(MarketAssumptions, SupportScheme, RiskProfile)> {
    let out_of_domain = |what: &str| Error::OutOfDomainOverride {
        id: sc.id.clone(),
        what: what.to_string(),
    };
    let mut market = m.clone();
    let mut support = *s;

    if let Some(d) = sc.support_duration_override {
        if !on_half_year_grid(d) || d > MAX_SUPPORT_YEARS {
            return Err(out_of_domain("support duration must lie on the 0.5-year grid in [0, 15]"));
        }
        // Early termination of the contracted scheme: the window shrinks but
        // the per-period payment keeps its contracted annuity level.
        support = support.with_window(d);
    }
    if !(0.0..=1.0).contains(&sc.payment_multiplier) {
        return Err(out_of_domain("payment multiplier must lie in [0, 1]"));
    }
    support.payment_multiplier = s.payment_multiplier * sc.payment_multiplier;
    if let Some(g) = sc.price_growth_override {
        if !g.is_finite() || g <= -1.0 {
            return Err(out_of_domain("price growth must exceed -1"));
        }
        market.price_growth = g;
    }
    let risk = scale_risk(r, sc.risk_multiplier).map_err(|_| {
        out_of_domain("risk multiplier must be nonnegative")
    })?;
    Ok((market, support, risk))
}

fn ledger_for(
    p: &Project,
    market: &MarketAssumptions,
    support: &SupportScheme,
    risk: &RiskProfile,
    mode: RiskMode,
) -> Result<(CashFlowLedger, Timeline)> {
    let timeline = stage_boundaries(p, support, market)?;
    let stream = match mode {
        RiskMode::WithRisk => risk_cost_stream(risk, p, &timeline)?,
        RiskMode::Classic => zero_risk_stream(&timeline),
    };
    Ok((build_ledger(p, market, support, &stream)?, timeline))
}

/// Builds the full-lifetime ledger for a project under a scenario, returning
/// the timeline alongside for grid-aligned series emission.
pub fn scenario_ledger(
    p: &Project,
    cal: &Calibration,
    sc: &Scenario,
    mode: RiskMode,
) -> Result<(CashFlowLedger, Timeline)> {
    let (market, support, risk) = apply_scenario(&cal.market, &cal.support, &cal.risk, sc)?;
    ledger_for(p, &market, &support, &risk, mode)
}

/// Evaluates one project at its four stage boundaries: the full ledger is
/// built once and truncated at each boundary.
pub fn evaluate_stages(
    p: &Project,
    cal: &Calibration,
    sc: &Scenario,
    mode: RiskMode,
) -> Result<StageReport> {
    let (market, support, risk) = apply_scenario(&cal.market, &cal.support, &cal.risk, sc)?;
    let (ledger, timeline) = ledger_for(p, &market, &support, &risk, mode)?;
    let rate = market.discount_rate;
    let boundary = timeline.boundaries();
    let bundle_at = |t: f64| -> Result<MetricBundle> { evaluate(&ledger.truncate(t)?, rate) };
    Ok(StageReport {
        project: p.name.clone(),
        scenario: sc.id.clone(),
        stages: [
            bundle_at(boundary[0])?,
            bundle_at(boundary[1])?,
            bundle_at(boundary[2])?,
            bundle_at(boundary[3])?,
        ],
        timeline,
        risk_mode: mode,
    })
}

/// Assigns the trajectory class of a report.
///
/// Positive stage-3 NPV means efficiency holds within the support term;
/// negative stage-4 NPV means the project never recovers; in between, the
/// payback time against `margin` years before lifetime end splits "remains"
/// from "slowed". Reports with unreachable payback fall into "slowed".
pub fn classify(rep: &StageReport, margin: f64) -> TrajectoryClass {
    if rep.stage3().npv.0 > 0.0 {
        return TrajectoryClass::MaintainedWithinCsa;
    }
    if rep.stage4().npv.0 < 0.0 {
        return TrajectoryClass::InitiallyIneffective;
    }
    match rep.stage4().dpp {
        DppOutcome::Reached { years } if years <= rep.timeline.t_lifetime_end - margin => {
            TrajectoryClass::RemainsWithinLifetime
        }
        _ => TrajectoryClass::SlowedBeforeLifetime,
    }
}

/// Evaluates every (scenario, project) pair, ordered by scenario id then
/// project name.
pub fn sweep(
    projects: &[Project],
    scenarios: &[Scenario],
    cal: &Calibration,
    mode: RiskMode,
) -> Result<Vec<StageReport>> {
    let mut scenario_order: Vec<&Scenario> = scenarios.iter().collect();
    scenario_order.sort_by(|a, b| a.id.cmp(&b.id));
    let mut project_order: Vec<&Project> = projects.iter().collect();
    project_order.sort_by(|a, b| a.name.cmp(&b.name));

    let mut reports = Vec::with_capacity(projects.len() * scenarios.len());
    for sc in &scenario_order {
        for p in &project_order {
            reports.push(evaluate_stages(p, cal, sc, mode)?);
        }
    }
    Ok(reports)
}

/// Full-lifetime NPV of a project with the payment window cut to `duration`
/// years (contracted annuity level retained), with risk.
pub fn stage4_npv_at_duration(p: &Project, cal: &Calibration, duration: f64) -> Result<f64> {
    let support = cal.support.with_window(duration);
    let (ledger, _) = ledger_for(p, &cal.market, &support, &cal.risk, RiskMode::WithRisk)?;
    Ok(crate::metrics::npv(&ledger, cal.market.discount_rate)?.0)
}

/// Smallest support duration on the 0.5-year grid in [0, 15] whose stage-4
/// NPV is nonnegative.
///
/// The whole grid is evaluated (31 points), which is both the monotonicity
/// verification and the fallback: the reported duration is the smallest
/// nonnegative point regardless of whether the sign pattern is monotone.
pub fn breakeven_support(p: &Project, cal: &Calibration) -> Result<BreakEvenResult> {
    let mut result = BreakEvenResult::NotAttainable;
    for step in 0..=(MAX_SUPPORT_YEARS * 2.0) as usize {
        let d = step as f64 * 0.5;
        if stage4_npv_at_duration(p, cal, d)? >= 0.0 {
            result = BreakEvenResult::Attained { duration: d };
            break;
        }
    }
    Ok(result)
}

/// Portfolio-level break-even summary. The source figure's aggregation level
/// is unstated, so all three readings are computed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PortfolioBreakEven {
    pub per_project: Vec<(String, BreakEvenResult)>,
    /// Smallest duration at which projects totalling ≥ half the installed
    /// capacity have broken even; unattainable projects count as never.
    pub capacity_weighted_median: BreakEvenResult,
    /// Plain median of per-project durations (unattainable = +inf).
    pub median: BreakEvenResult,
    /// Break-even of the summed portfolio ledger.
    pub aggregate: BreakEvenResult,
}

/// Computes per-project and portfolio break-even durations.
pub fn portfolio_breakeven(projects: &[Project], cal: &Calibration) -> Result<PortfolioBreakEven> {
    let mut per_project = Vec::with_capacity(projects.len());
    let mut weighted: Vec<(f64, f64)> = Vec::with_capacity(projects.len());
    for p in projects {
        let be = breakeven_support(p, cal)?;
        weighted.push((
            be.duration().unwrap_or(f64::INFINITY),
            p.installed_capacity,
        ));
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

    // NPV is linear in flows, so the aggregate ledger's NPV is the sum of
    // per-project NPVs at each candidate duration.
    let mut aggregate = BreakEvenResult::NotAttainable;
    'grid: for step in 0..=(MAX_SUPPORT_YEARS * 2.0) as usize {
        let d = step as f64 * 0.5;
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cashflow::FlowKind;
    use crate::domain::{MoneyK, PriceZone};
    use crate::metrics::{IrrOutcome, IrrStatus};
    use crate::risk::RiskFactor;

    fn test_calibration(cuf: f64) -> Calibration {
        let mut market = MarketAssumptions::default();
        market.capacity_utilization.insert("R".into(), cuf);
        Calibration {
            market,
            support: SupportScheme {
                support_duration: 15.0,
                guaranteed_return: 0.08,
                payment_multiplier: 1.0,
                recovery_term: None,
            },
            risk: RiskProfile {
                factors: vec![RiskFactor {
                    id: "aggregate".into(),
                    weight: 1.0,
                    score: 0.5,
                }],
                intensity: 600.0,
                multiplier: 1.0,
            },
            classification_margin: 1.0,
        }
    }

    fn test_project() -> Project {
        Project {
            name: "P".into(),
            region: "R".into(),
            price_zone: PriceZone::First,
            initiator: "I".into(),
            installed_capacity: 15.0,
            specific_capex: 60.0,
            commissioning_period: 2.5,
        }
    }

    #[test]
    fn baseline_scenario_changes_nothing() {
        let cal = test_calibration(0.18);
        let (m, s, r) =
            apply_scenario(&cal.market, &cal.support, &cal.risk, &Scenario::baseline()).unwrap();
        assert_eq!(m, cal.market);
        assert_eq!(s, cal.support);
        assert_eq!(r, cal.risk);
    }

    #[test]
    fn shorter_window_strictly_lowers_lifetime_npv() {
        // A duration override shortens the paid window without touching the
        // contracted annuity level, so it only removes positive flows.
        let cal = test_calibration(0.18);
        let p = test_project();
        let mut prev = f64::NEG_INFINITY;
        for d in [0.0, 5.0, 10.0, 15.0] {
            let npv = stage4_npv_at_duration(&p, &cal, d).unwrap();
            assert!(
                npv > prev,
                "stage-4 NPV must rise with window length: {npv} after {prev} at {d}"
            );
            prev = npv;
        }
    }

    #[test]
    fn duration_override_keeps_payment_level() {
        let cal = test_calibration(0.18);
        let sc = Scenario {
            id: "cut".into(),
            support_duration_override: Some(5.0),
            ..Scenario::baseline()
        };
        let (_, support, _) =
            apply_scenario(&cal.market, &cal.support, &cal.risk, &sc).unwrap();
        let capex = MoneyK(610_005.0);
        assert_eq!(
            support.payment_per_period(capex),
            cal.support.payment_per_period(capex)
        );
        assert_eq!(support.support_duration, 5.0);
    }

    #[test]
    fn zero_multiplier_matches_zero_duration_ledger() {
        let cal = test_calibration(0.18);
        let p = test_project();
        let no_pay = Scenario {
            id: "pm0".into(),
            payment_multiplier: 0.0,
            ..Scenario::baseline()
        };
        let no_window = Scenario {
            id: "sd0".into(),
            support_duration_override: Some(0.0),
            ..Scenario::baseline()
        };
        let build = |sc: &Scenario| {
            let (m, s, r) = apply_scenario(&cal.market, &cal.support, &cal.risk, sc).unwrap();
            ledger_for(&p, &m, &s, &r, RiskMode::WithRisk).unwrap().0
        };
        assert_eq!(build(&no_pay), build(&no_window));
    }

    #[test]
    fn risk_multiplier_doubles_the_stream() {
        let cal = test_calibration(0.18);
        let p = test_project();
        let doubled = Scenario {
            id: "r2".into(),
            risk_multiplier: 2.0,
            ..Scenario::baseline()
        };
        let (m, s, r) = apply_scenario(&cal.market, &cal.support, &cal.risk, &doubled).unwrap();
        let base = ledger_for(&p, &cal.market, &cal.support, &cal.risk, RiskMode::WithRisk)
            .unwrap()
            .0;
        let amped = ledger_for(&p, &m, &s, &r, RiskMode::WithRisk).unwrap().0;
        for (a, b) in base.entries.iter().zip(&amped.entries) {
            assert_eq!(b.component(FlowKind::RiskCost), 2.0 * a.component(FlowKind::RiskCost));
        }
    }

    #[test]
    fn out_of_domain_overrides_are_rejected() {
        let cal = test_calibration(0.18);
        let bad = |sc: Scenario| {
            matches!(
                apply_scenario(&cal.market, &cal.support, &cal.risk, &sc),
                Err(Error::OutOfDomainOverride { .. })
            )
        };
        assert!(bad(Scenario {
            support_duration_override: Some(15.3),
            ..Scenario::baseline()
        }));
        assert!(bad(Scenario {
            support_duration_override: Some(20.0),
            ..Scenario::baseline()
        }));
        assert!(bad(Scenario {
            payment_multiplier: 1.5,
            ..Scenario::baseline()
        }));
        assert!(bad(Scenario {
            risk_multiplier: -1.0,
            ..Scenario::baseline()
        }));
    }

    #[test]
    fn default_set_has_ten_scenarios() {
        let set = default_scenarios();
        assert_eq!(set.len(), 10);
        assert_eq!(set[0], Scenario::baseline());
        let ids: Vec<&str> = set.iter().map(|s| s.id.as_str()).collect();
        assert_eq!(ids, ["S0", "S1", "S2", "S3", "S4", "S5", "S6", "S7", "S8", "S9"]);
    }

    #[test]
    fn stage_bundles_follow_the_timeline() {
        let cal = test_calibration(0.18);
        let p = test_project();
        let rep = evaluate_stages(&p, &cal, &Scenario::baseline(), RiskMode::WithRisk).unwrap();
        assert_eq!(rep.timeline.boundaries(), [0.0, 2.5, 17.5, 27.5]);
        // Stage-1 bundle sees only the first capex tranche.
        assert!((rep.stages[0].npv.0 + p.capex_total().0 / 5.0).abs() < 1e-9);
        // More periods can only move NPV by the flows added, and stage 2 is
        // all capex: NPV at operation start is below NPV at decision date.
        assert!(rep.stages[1].npv.0 < rep.stages[0].npv.0);
    }

    #[test]
    fn near_zero_cost_project_is_nonnegative_everywhere() {
        let mut cal = test_calibration(0.18);
        cal.market.opex = 0.0;
        cal.risk.multiplier = 0.0;
        let p = Project {
            specific_capex: 1e-12,
            ..test_project()
        };
        let rep = evaluate_stages(&p, &cal, &Scenario::baseline(), RiskMode::WithRisk).unwrap();
        for bundle in &rep.stages {
            assert!(bundle.npv.0 >= -1e-6);
        }
        assert!(rep.stage4().npv.0 > 0.0);
    }

    fn synthetic_report(npv3: f64, npv4: f64, dpp4: DppOutcome) -> StageReport {
        let bundle = |npv: f64, dpp: DppOutcome| MetricBundle {
            npv: MoneyK(npv),
            irr: IrrOutcome {
                status: IrrStatus::NotDefined,
                rate: None,
                sign_changes: 0,
            },
            dpp,
            discount_rate: 0.1,
        };
        StageReport {
            project: "synthetic".into(),
            scenario: "S0".into(),
            stages: [
                bundle(-1.0, DppOutcome::NotReached),
                bundle(-2.0, DppOutcome::NotReached),
                bundle(npv3, DppOutcome::NotReached),
                bundle(npv4, dpp4),
            ],
            timeline: Timeline {
                t_decision: 0.0,
                t_operation_start: 2.5,
                t_support_end: 17.5,
                t_lifetime_end: 27.5,
                period_length: 0.5,
            },
            risk_mode: RiskMode::WithRisk,
        }
    }

    #[test]
    fn classification_covers_all_four_outcomes() {
        let m = 1.0;
        assert_eq!(
            classify(&synthetic_report(89_330.76, 186_892.67, DppOutcome::Reached { years: 14.0 }), m),
            TrajectoryClass::MaintainedWithinCsa
        );
        assert_eq!(
            classify(&synthetic_report(-415_823.51, -303_504.55, DppOutcome::NotReached), m),
            TrajectoryClass::InitiallyIneffective
        );
        assert_eq!(
            classify(&synthetic_report(-16_565.72, 171_016.24, DppOutcome::Reached { years: 27.2 }), m),
            TrajectoryClass::SlowedBeforeLifetime
        );
        assert_eq!(
            classify(&synthetic_report(-16_565.72, 171_016.24, DppOutcome::Reached { years: 20.0 }), m),
            TrajectoryClass::RemainsWithinLifetime
        );
        assert_eq!(
            classify(&synthetic_report(-1.0, 1.0, DppOutcome::NotReached), m),
            TrajectoryClass::SlowedBeforeLifetime
        );
    }

    #[test]
    fn sweep_is_ordered_and_complete() {
        let cal = test_calibration(0.18);
        let mut p2 = test_project();
        p2.name = "A-first".into();
        let projects = vec![test_project(), p2];
        let scenarios = default_scenarios();
        let reports = sweep(&projects, &scenarios, &cal, RiskMode::WithRisk).unwrap();
        assert_eq!(reports.len(), 20);
        assert_eq!(reports[0].scenario, "S0");
        assert_eq!(reports[0].project, "A-first");
        assert_eq!(reports[1].project, "P");
        assert_eq!(reports[19].scenario, "S9");
    }

    #[test]
    fn breakeven_trivial_cases() {
        // Generous market: profitable with no support at all.
        let mut cal = test_calibration(0.30);
        cal.market.electricity_price.first = 20_000.0;
        let p = test_project();
        assert_eq!(
            breakeven_support(&p, &cal).unwrap(),
            BreakEvenResult::Attained { duration: 0.0 }
        );

        // Hopeless market: not even the full window saves it.
        let mut cal = test_calibration(0.10);
        cal.market.electricity_price.first = 1.0;
        cal.support.guaranteed_return = 0.0;
        assert_eq!(breakeven_support(&p, &cal).unwrap(), BreakEvenResult::NotAttainable);
    }

    #[test]
    fn breakeven_is_consistent_at_the_boundary() {
        let cal = test_calibration(0.18);
        let p = test_project();
        if let BreakEvenResult::Attained { duration } = breakeven_support(&p, &cal).unwrap() {
            assert!(stage4_npv_at_duration(&p, &cal, duration).unwrap() >= 0.0);
            if duration > 0.0 {
                assert!(stage4_npv_at_duration(&p, &cal, duration - 0.5).unwrap() < 0.0);
            }
        } else {
            assert!(stage4_npv_at_duration(&p, &cal, 15.0).unwrap() < 0.0);
        }
    }
}
