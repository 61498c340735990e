//! Fits the undisclosed market inputs against published per-project NPV
//! targets.
//!
//! The search is a deterministic derivative-free compass search over the
//! numeric knobs (discount rate, zone prices, guaranteed return, opex, risk
//! intensity, one utilization factor per region) inside caller-supplied
//! bounds. The loss is lexicographic: sign mismatches against the 22 NPV
//! targets dominate, then the distance of the capacity-weighted break-even
//! median from its published band, then mean relative NPV error.

use crate::domain::Project;
use crate::error::{Error, Result};
use crate::metrics::{npv, MetricBundle};
use crate::risk::composite_score;
use crate::scenario::{
    breakeven_support, classify, evaluate_stages, scenario_ledger, Calibration, RiskMode,
    Scenario, TrajectoryClass,
};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Published per-project targets: stage-3 and stage-4 NPV (thousands of RUB)
/// and IRR (fraction), plus optionally the published trajectory class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetRecord {
    pub name: String,
    pub npv_s3: f64,
    pub irr_s3: f64,
    pub npv_s4: f64,
    pub irr_s4: f64,
    pub trajectory: Option<TrajectoryClass>,
}

/// Inclusive search intervals for every fitted knob. Regions share one CUF
/// interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationBounds {
    pub discount_rate: (f64, f64),
    pub price_first: (f64, f64),
    pub price_second: (f64, f64),
    pub guaranteed_return: (f64, f64),
    pub opex: (f64, f64),
    pub risk_intensity: (f64, f64),
    pub cuf: (f64, f64),
}

impl Default for CalibrationBounds {
    fn default() -> Self {
        CalibrationBounds {
            discount_rate: (0.05, 0.20),
            price_first: (800.0, 3200.0),
            price_second: (600.0, 2600.0),
            guaranteed_return: (0.0, 0.14),
            opex: (0.1, 3.0),
            risk_intensity: (0.0, 2000.0),
            cuf: (0.10, 0.35),
        }
    }
}

/// Search controls beyond the parameter bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrateOptions {
    /// Hard cap on loss evaluations.
    pub max_evaluations: usize,
    /// Target interval for the capacity-weighted break-even median; `None`
    /// removes that loss term.
    pub breakeven_band: Option<(f64, f64)>,
    /// Candidate classification margins (δ, years) tried after the fit.
    pub margin_grid: Vec<f64>,
}

impl Default for CalibrateOptions {
    fn default() -> Self {
        CalibrateOptions {
            max_evaluations: 4000,
            breakeven_band: Some((12.0, 13.0)),
            margin_grid: (1..=20).map(|k| k as f64 * 0.5).collect(),
        }
    }
}

/// Lexicographic loss: compare `sign_mismatches`, then `band_violation`,
/// then `value_error`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Loss {
    pub sign_mismatches: usize,
    /// Years the capacity-weighted break-even median lies outside its band;
    /// unattainable medians count as the full band distance from zero.
    pub band_violation: f64,
    /// Mean relative NPV error over all targets.
    pub value_error: f64,
}

impl Loss {
    fn better_than(&self, other: &Loss) -> bool {
        (self.sign_mismatches, self.band_violation, self.value_error)
            < (other.sign_mismatches, other.band_violation, other.value_error)
    }
}

/// One row of the fit report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitRow {
    pub project: String,
    pub target_npv_s3: f64,
    pub model_npv_s3: f64,
    pub sign_ok_s3: bool,
    pub target_npv_s4: f64,
    pub model_npv_s4: f64,
    pub sign_ok_s4: bool,
    pub model_irr_s3: Option<f64>,
    pub model_irr_s4: Option<f64>,
    pub target_class: Option<TrajectoryClass>,
    pub model_class: TrajectoryClass,
    pub class_match: Option<bool>,
    /// True when the class hinges on the payback-margin rule, i.e. stage-3
    /// NPV ≤ 0 and stage-4 NPV ≥ 0: these rows are δ-sensitive.
    pub ambiguous: bool,
}

/// Result of a calibration run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitOutcome {
    pub calibration: Calibration,
    pub loss: Loss,
    pub rows: Vec<FitRow>,
    pub class_matches: usize,
    pub class_targets: usize,
    pub capacity_weighted_breakeven: Option<f64>,
    pub evaluations: usize,
}

struct Space {
    regions: Vec<String>,
    lo: Vec<f64>,
    hi: Vec<f64>,
}

const FIXED_DIMS: usize = 6;

impl Space {
    fn new(projects: &[Project], bounds: &CalibrationBounds) -> Result<Space> {
        let mut regions: Vec<String> = projects.iter().map(|p| p.region.clone()).collect();
        regions.sort();
        regions.dedup();

        let mut lo = vec![
            bounds.discount_rate.0,
            bounds.price_first.0,
            bounds.price_second.0,
            bounds.guaranteed_return.0,
            bounds.opex.0,
            bounds.risk_intensity.0,
        ];
        let mut hi = vec![
            bounds.discount_rate.1,
            bounds.price_first.1,
            bounds.price_second.1,
            bounds.guaranteed_return.1,
            bounds.opex.1,
            bounds.risk_intensity.1,
        ];
        for _ in &regions {
            lo.push(bounds.cuf.0);
            hi.push(bounds.cuf.1);
        }

        for (a, b) in lo.iter().zip(&hi) {
            if !(a.is_finite() && b.is_finite()) || a > b {
                return Err(Error::InfeasibleBounds(format!(
                    "interval [{a}, {b}] is empty or not finite"
                )));
            }
        }
        if bounds.cuf.0 <= 0.0 || bounds.cuf.1 > 0.35 {
            return Err(Error::InfeasibleBounds(
                "capacity utilization must stay in (0, 0.35]".into(),
            ));
        }
        if bounds.discount_rate.0 <= -1.0 || bounds.guaranteed_return.0 <= -1.0 {
            return Err(Error::InfeasibleBounds("rates must exceed -1".into()));
        }
        Ok(Space { regions, lo, hi })
    }

    fn dims(&self) -> usize {
        self.lo.len()
    }

    fn seed_from(&self, template: &Calibration) -> Vec<f64> {
        let mut x = vec![
            template.market.discount_rate,
            template.market.electricity_price.first,
            template.market.electricity_price.second,
            template.support.guaranteed_return,
            template.market.opex,
            template.risk.intensity,
        ];
        for region in &self.regions {
            let mid = 0.5 * (self.lo[FIXED_DIMS] + self.hi[FIXED_DIMS]);
            x.push(
                template
                    .market
                    .capacity_utilization
                    .get(region)
                    .copied()
                    .unwrap_or(mid),
            );
        }
        for (i, v) in x.iter_mut().enumerate() {
            *v = v.clamp(self.lo[i], self.hi[i]);
        }
        x
    }

    fn realize(&self, x: &[f64], template: &Calibration) -> Calibration {
        let mut cal = template.clone();
        cal.market.discount_rate = x[0];
        cal.market.electricity_price.first = x[1];
        cal.market.electricity_price.second = x[2];
        cal.support.guaranteed_return = x[3];
        cal.market.opex = x[4];
        cal.risk.intensity = x[5];
        let mut cuf = BTreeMap::new();
        for (i, region) in self.regions.iter().enumerate() {
            cuf.insert(region.clone(), x[FIXED_DIMS + i]);
        }
        cal.market.capacity_utilization = cuf;
        cal
    }
}

fn capacity_weighted_median_breakeven(
    projects: &[Project],
    cal: &Calibration,
) -> Result<Option<f64>> {
    let mut durations: Vec<(f64, f64)> = Vec::with_capacity(projects.len());
    for p in projects {
        let d = breakeven_support(p, cal)?
            .duration()
            .unwrap_or(f64::INFINITY);
        durations.push((d, p.installed_capacity));
    }
    durations.sort_by(|a, b| a.0.total_cmp(&b.0));
    let half: f64 = durations.iter().map(|(_, c)| c).sum::<f64>() / 2.0;
    let mut cum = 0.0;
    for &(d, c) in &durations {
        cum += c;
        if cum >= half {
            return Ok(if d.is_finite() { Some(d) } else { None });
        }
    }
    Ok(None)
}

fn sign_matches(model: f64, target: f64) -> bool {
    (model > 0.0) == (target > 0.0)
}

/// Baseline stage-3 and stage-4 NPVs per target. Avoids `evaluate_stages`
/// in the search loop: only two NPVs per project are needed, not the full
/// IRR/DPP bundles.
fn stage_npvs(
    projects: &[Project],
    targets: &[TargetRecord],
    cal: &Calibration,
) -> Result<Vec<(f64, f64)>> {
    let baseline = Scenario::baseline();
    let mut out = Vec::with_capacity(targets.len());
    for t in targets {
        let p = projects
            .iter()
            .find(|p| p.name == t.name)
            .ok_or_else(|| Error::UnknownProject(t.name.clone()))?;
        let (ledger, timeline) = scenario_ledger(p, cal, &baseline, RiskMode::WithRisk)?;
        let rate = cal.market.discount_rate;
        let s3 = npv(&ledger.truncate(timeline.t_support_end)?, rate)?.0;
        let s4 = npv(&ledger, rate)?.0;
        out.push((s3, s4));
    }
    Ok(out)
}

fn loss_of(
    projects: &[Project],
    targets: &[TargetRecord],
    cal: &Calibration,
    options: &CalibrateOptions,
) -> Result<Loss> {
    let npvs = stage_npvs(projects, targets, cal)?;
    let mut mismatches = 0;
    let mut err_sum = 0.0;
    for (t, &(m3, m4)) in targets.iter().zip(&npvs) {
        if !sign_matches(m3, t.npv_s3) {
            mismatches += 1;
        }
        if !sign_matches(m4, t.npv_s4) {
            mismatches += 1;
        }
        err_sum += (m3 - t.npv_s3).abs() / t.npv_s3.abs().max(1000.0);
        err_sum += (m4 - t.npv_s4).abs() / t.npv_s4.abs().max(1000.0);
    }

    let band_violation = match options.breakeven_band {
        None => 0.0,
        Some((lo, hi)) => match capacity_weighted_median_breakeven(projects, cal)? {
            Some(d) => (lo - d).max(0.0) + (d - hi).max(0.0),
            None => hi,
        },
    };

    Ok(Loss {
        sign_mismatches: mismatches,
        band_violation,
        value_error: err_sum / (2 * targets.len().max(1)) as f64,
    })
}

/// Fits market, support and risk-intensity knobs against the targets.
///
/// `template` supplies everything the search does not touch (risk factor
/// scores, support duration, price growth, lifetime, δ fallback); the fitted
/// knobs are seeded from it. Fails with `NoSignFeasiblePoint` when the best
/// point still mismatches a target sign.
pub fn calibrate(
    projects: &[Project],
    targets: &[TargetRecord],
    bounds: &CalibrationBounds,
    template: &Calibration,
    options: &CalibrateOptions,
) -> Result<FitOutcome> {
    if projects.is_empty() || targets.is_empty() {
        return Err(Error::InfeasibleBounds(
            "calibration needs at least one project and one target".into(),
        ));
    }
    composite_score(&template.risk)?;
    let space = Space::new(projects, bounds)?;

    let mut best_x = space.seed_from(template);
    let mut best_loss = loss_of(projects, targets, &space.realize(&best_x, template), options)?;
    let mut evaluations = 1;

    let mut steps: Vec<f64> = (0..space.dims())
        .map(|i| (space.hi[i] - space.lo[i]) / 8.0)
        .collect();

    'search: loop {
        let mut improved = false;
        for dim in 0..space.dims() {
            if steps[dim] == 0.0 {
                continue;
            }
            for dir in [1.0, -1.0] {
                let candidate =
                    (best_x[dim] + dir * steps[dim]).clamp(space.lo[dim], space.hi[dim]);
                if candidate == best_x[dim] {
                    continue;
                }
                let mut x = best_x.clone();
                x[dim] = candidate;
                let loss = loss_of(projects, targets, &space.realize(&x, template), options)?;
                evaluations += 1;
                if loss.better_than(&best_loss) {
                    best_x = x;
                    best_loss = loss;
                    improved = true;
                }
                if evaluations >= options.max_evaluations {
                    break 'search;
                }
            }
        }
        if !improved {
            let mut all_converged = true;
            for dim in 0..space.dims() {
                steps[dim] *= 0.5;
                let span = space.hi[dim] - space.lo[dim];
                if steps[dim] > span * 1e-4 {
                    all_converged = false;
                }
            }
            if all_converged {
                break;
            }
        }
    }

    if best_loss.sign_mismatches > 0 {
        return Err(Error::NoSignFeasiblePoint {
            mismatches: best_loss.sign_mismatches,
        });
    }

    let mut calibration = space.realize(&best_x, template);
    let (rows, class_matches, class_targets, margin) =
        finish_fit(projects, targets, &calibration, options)?;
    calibration.classification_margin = margin;

    let capacity_weighted_breakeven =
        capacity_weighted_median_breakeven(projects, &calibration)?;

    Ok(FitOutcome {
        calibration,
        loss: best_loss,
        rows,
        class_matches,
        class_targets,
        capacity_weighted_breakeven,
        evaluations,
    })
}

/// Picks the classification margin from the grid and builds the fit rows.
fn finish_fit(
    projects: &[Project],
    targets: &[TargetRecord],
    cal: &Calibration,
    options: &CalibrateOptions,
) -> Result<(Vec<FitRow>, usize, usize, f64)> {
    let baseline = Scenario::baseline();
    let mut reports = Vec::with_capacity(targets.len());
    for t in targets {
        let p = projects
            .iter()
            .find(|p| p.name == t.name)
            .ok_or_else(|| Error::UnknownProject(t.name.clone()))?;
        reports.push(evaluate_stages(p, cal, &baseline, RiskMode::WithRisk)?);
    }

    let class_targets = targets.iter().filter(|t| t.trajectory.is_some()).count();
    let mut margin = cal.classification_margin;
    if class_targets > 0 && !options.margin_grid.is_empty() {
        let matches_at = |m: f64| {
            targets
                .iter()
                .zip(&reports)
                .filter(|(t, rep)| t.trajectory == Some(classify(rep, m)))
                .count()
        };
        let mut best = (matches_at(margin), margin);
        for &m in &options.margin_grid {
            let score = matches_at(m);
            if score > best.0 || (score == best.0 && m < best.1) {
                best = (score, m);
            }
        }
        margin = best.1;
    }

    let mut rows = Vec::with_capacity(targets.len());
    let mut class_matches = 0;
    for (t, rep) in targets.iter().zip(&reports) {
        let model_class = classify(rep, margin);
        let class_match = t.trajectory.map(|tc| tc == model_class);
        if class_match == Some(true) {
            class_matches += 1;
        }
        let irr_of = |b: &MetricBundle| b.irr.rate;
        rows.push(FitRow {
            project: t.name.clone(),
            target_npv_s3: t.npv_s3,
            model_npv_s3: rep.stage3().npv.0,
            sign_ok_s3: sign_matches(rep.stage3().npv.0, t.npv_s3),
            target_npv_s4: t.npv_s4,
            model_npv_s4: rep.stage4().npv.0,
            sign_ok_s4: sign_matches(rep.stage4().npv.0, t.npv_s4),
            model_irr_s3: irr_of(rep.stage3()),
            model_irr_s4: irr_of(rep.stage4()),
            target_class: t.trajectory,
            model_class,
            class_match,
            ambiguous: rep.stage3().npv.0 <= 0.0 && rep.stage4().npv.0 >= 0.0,
        });
    }
    Ok((rows, class_matches, class_targets, margin))
}

/// Re-scores an existing calibration against targets without searching —
/// used to audit a shipped calibration file.
pub fn score_calibration(
    projects: &[Project],
    targets: &[TargetRecord],
    cal: &Calibration,
    options: &CalibrateOptions,
) -> Result<FitOutcome> {
    let loss = loss_of(projects, targets, cal, options)?;
    let grid = vec![cal.classification_margin];
    let opts = CalibrateOptions {
        margin_grid: grid,
        ..options.clone()
    };
    let (rows, class_matches, class_targets, margin) = finish_fit(projects, targets, cal, &opts)?;
    debug_assert_eq!(margin, cal.classification_margin);
    Ok(FitOutcome {
        calibration: cal.clone(),
        loss,
        rows,
        class_matches,
        class_targets,
        capacity_weighted_breakeven: capacity_weighted_median_breakeven(projects, cal)?,
        evaluations: 1,
    })
}
