//! Project, market and support-scheme data plus the staged timeline arithmetic
//! shared by the rest of the engine.
//!
//! All monetary values are carried in thousands of RUB. Time is measured in
//! years on a semi-annual (0.5-year) grid.

use crate::error::{Error, Result, Violation};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// Length of one ledger period, in years.
pub const PERIOD_YEARS: f64 = 0.5;

/// Hours in one semi-annual period (8760 / 2).
pub const HOURS_PER_PERIOD: f64 = 4380.0;

const GRID_EPS: f64 = 1e-9;

/// Monetary amount in thousands of RUB, reported with two fractional digits.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
pub struct MoneyK(pub f64);

impl MoneyK {
    pub fn value(self) -> f64 {
        self.0
    }

    /// Rounds to two fractional digits, ties away from zero.
    pub fn rounded2(self) -> f64 {
        (self.0 * 100.0).round() / 100.0
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }
}

impl fmt::Display for MoneyK {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.2}", self.rounded2())
    }
}

/// Wholesale price zone of the Russian electricity market.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PriceZone {
    First,
    Second,
}

impl fmt::Display for PriceZone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PriceZone::First => write!(f, "first"),
            PriceZone::Second => write!(f, "second"),
        }
    }
}

/// One solar project: capacity, specific capital cost and commissioning span.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Project {
    pub name: String,
    pub region: String,
    pub price_zone: PriceZone,
    pub initiator: String,
    /// Installed capacity, MW.
    pub installed_capacity: f64,
    /// Specific capital cost, thousands of RUB per kW.
    pub specific_capex: f64,
    /// Commissioning period, years; must be a multiple of 0.5 in (0, 10].
    pub commissioning_period: f64,
}

impl Project {
    /// Checks the project invariants, returning every violated one.
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if !(self.installed_capacity > 0.0) || !self.installed_capacity.is_finite() {
            out.push(Violation::NonPositiveCapacity);
        }
        if !(self.specific_capex > 0.0) || !self.specific_capex.is_finite() {
            out.push(Violation::NonPositiveCapex);
        }
        if !on_half_year_grid(self.commissioning_period)
            || self.commissioning_period <= 0.0
            || self.commissioning_period > 10.0
        {
            out.push(Violation::BadCommissioningGrid);
        }
        out
    }

    /// Total capital cost in thousands of RUB: specific capex times installed
    /// kilowatts.
    pub fn capex_total(&self) -> MoneyK {
        MoneyK(self.specific_capex * self.installed_capacity * 1000.0)
    }

    /// Returns a copy scaled to `k` times the installed capacity. Per-unit
    /// parameters are untouched.
    pub fn scaled_capacity(&self, k: f64) -> Project {
        Project {
            installed_capacity: self.installed_capacity * k,
            ..self.clone()
        }
    }
}

/// Validates a project, returning it on success or the full violation list.
pub fn validate_project(p: &Project) -> Result<&Project> {
    let violations = p.violations();
    if violations.is_empty() {
        Ok(p)
    } else {
        Err(Error::InvalidProject {
            name: p.name.clone(),
            violations,
        })
    }
}

/// Capacity-payment support scheme: duration, annuity return and multiplier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SupportScheme {
    /// Payment window length in years, on the 0.5 grid, within [0, 15].
    pub support_duration: f64,
    /// Annual rate used for the capital-recovery annuity on total capex.
    pub guaranteed_return: f64,
    /// Scales every capacity payment; 1.0 means full support.
    pub payment_multiplier: f64,
    /// Annuity horizon fixed at contract award, in years. `None` means the
    /// payment window itself — the baseline, where the annuity exactly spans
    /// the window. Early-termination overrides shorten `support_duration`
    /// while pinning this to the original term, so they truncate the
    /// contracted payment stream instead of re-sizing it: removing support
    /// only ever removes flows, which keeps lifetime NPV nondecreasing in
    /// the window length.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub recovery_term: Option<f64>,
}

impl Default for SupportScheme {
    fn default() -> Self {
        SupportScheme {
            support_duration: 15.0,
            guaranteed_return: 0.10,
            payment_multiplier: 1.0,
            recovery_term: None,
        }
    }
}

impl SupportScheme {
    /// The term the annuity is sized on: the contracted recovery term when
    /// pinned, otherwise the payment window.
    pub fn annuity_term(&self) -> f64 {
        self.recovery_term.unwrap_or(self.support_duration)
    }

    /// Returns the scheme with the payment window shortened to `window`
    /// years and the annuity level pinned to the current term, i.e. an early
    /// termination of the same contract.
    pub fn with_window(&self, window: f64) -> SupportScheme {
        SupportScheme {
            support_duration: window,
            recovery_term: Some(self.annuity_term()),
            ..*self
        }
    }

    /// Per-period capacity payment for a given total capex, before the
    /// payment multiplier: the semi-annual capital-recovery annuity that
    /// repays `capex` at `guaranteed_return` over the annuity term.
    pub fn payment_per_period(&self, capex: MoneyK) -> MoneyK {
        let n = periods_in(self.annuity_term());
        if n == 0 {
            return MoneyK(0.0);
        }
        let q = (1.0 + self.guaranteed_return).sqrt() - 1.0;
        let factor = if q.abs() < 1e-12 {
            1.0 / n as f64
        } else {
            q / (1.0 - (1.0 + q).powi(-(n as i32)))
        };
        MoneyK(capex.0 * factor)
    }

    /// Fraction of capex paid out per year, implied by the annuity.
    pub fn capacity_payment_share_of_capex(&self, capex: MoneyK) -> f64 {
        if capex.0 == 0.0 {
            return 0.0;
        }
        2.0 * self.payment_per_period(capex).0 / capex.0
    }
}

/// How total capex is distributed over the commissioning span.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CapexSchedule {
    /// Equal tranches at the start of every commissioning period.
    #[default]
    Uniform,
    /// Entire capex at the decision date.
    FrontLoaded,
}

/// Market-side assumptions: prices, utilization, opex and the discounting
/// convention inputs. Keys missing from a calibration file fall back to
/// these documented defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MarketAssumptions {
    /// Annual discount rate used for NPV/DPP.
    pub discount_rate: f64,
    /// Electricity price by zone, RUB per MWh, at the decision date.
    pub electricity_price: ZonePrices,
    /// Annual growth rate applied to the electricity price.
    pub price_growth: f64,
    /// Solar capacity utilization factor by region, each in (0, 0.35].
    pub capacity_utilization: BTreeMap<String, f64>,
    /// Fixed operating cost, thousands of RUB per kW per year.
    pub opex: f64,
    /// Operating lifetime in years, measured from the end of commissioning.
    pub lifetime: f64,
    /// Annual output degradation rate; 0 disables it.
    pub degradation: f64,
    /// Flat effective tax rate on positive pre-tax period income; 0 disables.
    pub tax_rate: f64,
    pub capex_schedule: CapexSchedule,
}

/// Electricity price per zone, RUB/MWh.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZonePrices {
    pub first: f64,
    pub second: f64,
}

impl ZonePrices {
    pub fn get(&self, zone: PriceZone) -> f64 {
        match zone {
            PriceZone::First => self.first,
            PriceZone::Second => self.second,
        }
    }
}

impl Default for MarketAssumptions {
    fn default() -> Self {
        MarketAssumptions {
            discount_rate: 0.12,
            electricity_price: ZonePrices {
                first: 1700.0,
                second: 1250.0,
            },
            price_growth: 0.05,
            capacity_utilization: BTreeMap::new(),
            opex: 0.7,
            lifetime: 25.0,
            degradation: 0.0,
            tax_rate: 0.0,
            capex_schedule: CapexSchedule::Uniform,
        }
    }
}

impl MarketAssumptions {
    /// Capacity utilization factor for a region.
    pub fn cuf_for(&self, region: &str) -> Result<f64> {
        self.capacity_utilization
            .get(region)
            .copied()
            .ok_or_else(|| Error::UnknownRegion(region.to_string()))
    }
}

/// Stage boundaries of a project, all in years from the decision date.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Timeline {
    pub t_decision: f64,
    pub t_operation_start: f64,
    pub t_support_end: f64,
    pub t_lifetime_end: f64,
    pub period_length: f64,
}

impl Timeline {
    /// The four stage boundaries in order.
    pub fn boundaries(&self) -> [f64; 4] {
        [
            self.t_decision,
            self.t_operation_start,
            self.t_support_end,
            self.t_lifetime_end,
        ]
    }

    /// Number of grid points in the full ledger, including t = 0.
    pub fn grid_len(&self) -> usize {
        periods_in(self.t_lifetime_end) + 1
    }
}

/// Computes the four stage boundaries for a project under a scheme and market.
///
/// Support and lifetime spans are measured from the end of commissioning.
pub fn stage_boundaries(
    p: &Project,
    s: &SupportScheme,
    m: &MarketAssumptions,
) -> Result<Timeline> {
    validate_project(p)?;
    if s.support_duration > m.lifetime {
        return Err(Error::SupportExceedsLifetime {
            support: s.support_duration,
            lifetime: m.lifetime,
        });
    }
    let t_op = p.commissioning_period;
    Ok(Timeline {
        t_decision: 0.0,
        t_operation_start: t_op,
        t_support_end: t_op + s.support_duration,
        t_lifetime_end: t_op + m.lifetime,
        period_length: PERIOD_YEARS,
    })
}

/// True when `t` is a nonnegative multiple of 0.5 years.
pub fn on_half_year_grid(t: f64) -> bool {
    if !t.is_finite() || t < 0.0 {
        return false;
    }
    let doubled = t * 2.0;
    (doubled - doubled.round()).abs() <= GRID_EPS
}

/// Number of whole semi-annual periods in `t` years; `t` must be on-grid.
pub fn periods_in(t: f64) -> usize {
    (t * 2.0).round() as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spp_2022_1() -> Project {
        Project {
            name: "SPP-2022-1".into(),
            region: "Stavropol Territory".into(),
            price_zone: PriceZone::First,
            initiator: "PJSC Forward Energo".into(),
            installed_capacity: 5.6,
            specific_capex: 49.788,
            commissioning_period: 2.5,
        }
    }

    #[test]
    fn table_row_is_valid() {
        assert!(validate_project(&spp_2022_1()).is_ok());
    }

    #[test]
    fn zero_capacity_is_rejected() {
        let mut p = spp_2022_1();
        p.installed_capacity = 0.0;
        assert_eq!(p.violations(), vec![Violation::NonPositiveCapacity]);
    }

    #[test]
    fn off_grid_commissioning_is_rejected() {
        let mut p = spp_2022_1();
        p.commissioning_period = 2.3;
        assert_eq!(p.violations(), vec![Violation::BadCommissioningGrid]);
    }

    #[test]
    fn capex_total_matches_hand_products() {
        assert!((spp_2022_1().capex_total().0 - 278_812.8).abs() < 1e-9);

        let spp_2018_2 = Project {
            name: "SPP-2018-2".into(),
            region: "Altai Republic".into(),
            price_zone: PriceZone::Second,
            initiator: "LLC Avelar Solar Technology".into(),
            installed_capacity: 5.0,
            specific_capex: 122.001,
            commissioning_period: 0.5,
        };
        assert!((spp_2018_2.capex_total().0 - 610_005.0).abs() < 1e-9);

        let unit = Project {
            installed_capacity: 1.0,
            specific_capex: 1.0,
            ..spp_2022_1()
        };
        assert!((unit.capex_total().0 - 1000.0).abs() < 1e-12);
    }

    #[test]
    fn stage_boundaries_from_commissioning() {
        let s = SupportScheme::default();
        let m = MarketAssumptions::default();
        let t = stage_boundaries(&spp_2022_1(), &s, &m).unwrap();
        assert_eq!(t.boundaries(), [0.0, 2.5, 17.5, 27.5]);

        let mut fast = spp_2022_1();
        fast.commissioning_period = 0.5;
        let t = stage_boundaries(&fast, &s, &m).unwrap();
        assert_eq!(t.boundaries(), [0.0, 0.5, 15.5, 25.5]);
    }

    #[test]
    fn zero_support_collapses_third_boundary() {
        let s = SupportScheme {
            support_duration: 0.0,
            ..SupportScheme::default()
        };
        let m = MarketAssumptions::default();
        let t = stage_boundaries(&spp_2022_1(), &s, &m).unwrap();
        assert_eq!(t.t_support_end, t.t_operation_start);
    }

    #[test]
    fn support_beyond_lifetime_is_an_error() {
        let s = SupportScheme {
            support_duration: 30.0,
            ..SupportScheme::default()
        };
        let m = MarketAssumptions::default();
        assert!(matches!(
            stage_boundaries(&spp_2022_1(), &s, &m),
            Err(Error::SupportExceedsLifetime { .. })
        ));
    }

    #[test]
    fn annuity_at_zero_return_is_straight_line() {
        let s = SupportScheme {
            support_duration: 15.0,
            guaranteed_return: 0.0,
            payment_multiplier: 1.0,
            recovery_term: None,
        };
        let pay = s.payment_per_period(MoneyK(300.0));
        assert!((pay.0 - 10.0).abs() < 1e-9);
    }

    #[test]
    fn annuity_repays_capex_at_its_own_rate() {
        // Discounting the annuity at the guaranteed return recovers capex.
        let s = SupportScheme {
            support_duration: 15.0,
            guaranteed_return: 0.11,
            payment_multiplier: 1.0,
            recovery_term: None,
        };
        let capex = 500_000.0;
        let pay = s.payment_per_period(MoneyK(capex)).0;
        let q = 1.11_f64.sqrt();
        let pv: f64 = (1..=30).map(|j| pay / q.powi(j)).sum();
        assert!((pv - capex).abs() / capex < 1e-12);
    }

    #[test]
    fn grid_predicate() {
        assert!(on_half_year_grid(0.0));
        assert!(on_half_year_grid(2.5));
        assert!(on_half_year_grid(27.5));
        assert!(!on_half_year_grid(2.3));
        assert!(!on_half_year_grid(-0.5));
    }

    #[test]
    fn early_termination_keeps_the_contracted_payment_level() {
        let base = SupportScheme::default();
        let cut = base.with_window(5.0);
        let capex = MoneyK(500_000.0);
        assert_eq!(cut.payment_per_period(capex), base.payment_per_period(capex));
        assert_eq!(cut.support_duration, 5.0);
        assert_eq!(cut.annuity_term(), 15.0);
        // Re-cutting keeps the original contracted term, not the last window.
        assert_eq!(cut.with_window(2.0).annuity_term(), 15.0);
        assert_eq!(
            cut.with_window(2.0).payment_per_period(capex),
            base.payment_per_period(capex)
        );
    }
}
