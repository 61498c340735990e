//! Semi-annual cash-flow ledger construction.
//!
//! A ledger is an ordered series of timestamped entries, each holding the
//! signed component breakdown of one period: capex tranches at period starts
//! during commissioning, then energy revenue, capacity payments, opex, risk
//! costs and optional tax at period ends during operation.

use crate::domain::{
    periods_in, stage_boundaries, CapexSchedule, MarketAssumptions, MoneyK, Project,
    SupportScheme, Timeline, HOURS_PER_PERIOD, PERIOD_YEARS,
};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// Kind of a signed cash-flow component within one period.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FlowKind {
    Capex,
    EnergyRevenue,
    CapacityPayment,
    Opex,
    RiskCost,
    Tax,
}

impl fmt::Display for FlowKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FlowKind::Capex => "capex",
            FlowKind::EnergyRevenue => "energy_revenue",
            FlowKind::CapacityPayment => "capacity_payment",
            FlowKind::Opex => "opex",
            FlowKind::RiskCost => "risk_cost",
            FlowKind::Tax => "tax",
        };
        f.write_str(s)
    }
}

/// One ledger period: grid index, time in years and its component breakdown.
///
/// The net flow is the sum of the components; zero-amount components are not
/// stored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub index: usize,
    /// Years from the decision date; always `index × period_length`.
    pub time: f64,
    pub net: MoneyK,
    pub components: BTreeMap<FlowKind, MoneyK>,
}

impl LedgerEntry {
    fn from_components(index: usize, time: f64, components: BTreeMap<FlowKind, MoneyK>) -> Self {
        let net = MoneyK(components.values().map(|m| m.0).sum());
        LedgerEntry {
            index,
            time,
            net,
            components,
        }
    }

    pub fn component(&self, kind: FlowKind) -> f64 {
        self.components.get(&kind).map_or(0.0, |m| m.0)
    }
}

/// Ordered series of period entries on the semi-annual grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CashFlowLedger {
    pub period_length: f64,
    pub entries: Vec<LedgerEntry>,
}

impl CashFlowLedger {
    /// Builds a bare ledger from `(time, net flow)` pairs, mapping positive
    /// nets to revenue and negative nets to capex so component invariants
    /// hold. Intended for synthetic ledgers in tests and metric inputs.
    pub fn from_net_flows(flows: &[(f64, f64)]) -> Result<CashFlowLedger> {
        let mut by_index: BTreeMap<usize, f64> = BTreeMap::new();
        for &(time, net) in flows {
            if !crate::domain::on_half_year_grid(time) {
                return Err(Error::OffGridTime(time));
            }
            *by_index.entry(periods_in(time)).or_insert(0.0) += net;
        }
        let entries = by_index
            .into_iter()
            .map(|(index, net)| {
                let mut components = BTreeMap::new();
                if net > 0.0 {
                    components.insert(FlowKind::EnergyRevenue, MoneyK(net));
                } else if net < 0.0 {
                    components.insert(FlowKind::Capex, MoneyK(net));
                }
                LedgerEntry::from_components(index, index as f64 * PERIOD_YEARS, components)
            })
            .collect();
        Ok(CashFlowLedger {
            period_length: PERIOD_YEARS,
            entries,
        })
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `(time, net flow)` pairs in order.
    pub fn flows(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.entries.iter().map(|e| (e.time, e.net.0))
    }

    /// Sum of absolute net flows; the IRR tolerance scale.
    pub fn sum_abs_flows(&self) -> f64 {
        self.entries.iter().map(|e| e.net.0.abs()).sum()
    }

    /// Total of one component kind over all periods.
    pub fn component_total(&self, kind: FlowKind) -> f64 {
        self.entries.iter().map(|e| e.component(kind)).sum()
    }

    /// Restricts the ledger to periods with end time ≤ `t`. No terminal or
    /// salvage value is added.
    pub fn truncate(&self, t: f64) -> Result<CashFlowLedger> {
        if !crate::domain::on_half_year_grid(t) {
            return Err(Error::OffGridTime(t));
        }
        Ok(CashFlowLedger {
            period_length: self.period_length,
            entries: self
                .entries
                .iter()
                .filter(|e| e.time <= t)
                .cloned()
                .collect(),
        })
    }
}

/// A risk stream of all zeros for the given timeline — the "classic
/// assessment" input.
pub fn zero_risk_stream(t: &Timeline) -> Vec<f64> {
    vec![0.0; t.grid_len()]
}

/// Builds the full-lifetime ledger of a project.
///
/// `risk_costs` must be aligned to the project grid (one nonnegative cost per
/// grid point, index 0 = decision date), as produced by
/// [`crate::risk::risk_cost_stream`].
pub fn build_ledger(
    p: &Project,
    m: &MarketAssumptions,
    s: &SupportScheme,
    risk_costs: &[f64],
) -> Result<CashFlowLedger> {
    let timeline = stage_boundaries(p, s, m)?;
    let n = timeline.grid_len();
    if risk_costs.len() != n {
        return Err(Error::MisalignedRiskStream {
            expected: n,
            got: risk_costs.len(),
        });
    }
    let cuf = m.cuf_for(&p.region)?;

    let capex_total = p.capex_total().0;
    let commissioning_periods = periods_in(timeline.t_operation_start);
    let price = m.electricity_price.get(p.price_zone);
    let payment = s.payment_per_period(p.capex_total()).0 * s.payment_multiplier;
    let opex_per_period = m.opex * p.installed_capacity * 1000.0 * PERIOD_YEARS;

    let mut entries = Vec::with_capacity(n);
    for i in 0..n {
        let time = i as f64 * PERIOD_YEARS;
        let mut components = BTreeMap::new();

        // Capex tranches sit at period starts within the commissioning span.
        let tranche = match m.capex_schedule {
            CapexSchedule::Uniform => {
                if i < commissioning_periods {
                    capex_total / commissioning_periods as f64
                } else {
                    0.0
                }
            }
            CapexSchedule::FrontLoaded => {
                if i == 0 {
                    capex_total
                } else {
                    0.0
                }
            }
        };
        if tranche != 0.0 {
            components.insert(FlowKind::Capex, MoneyK(-tranche));
        }

        // Operating flows sit at period ends, strictly after operation start.
        let operating = time > timeline.t_operation_start && time <= timeline.t_lifetime_end;
        if operating {
            let growth = (1.0 + m.price_growth).powf(time);
            let output_factor =
                (1.0 - m.degradation).powf(time - timeline.t_operation_start);
            let energy = p.installed_capacity * cuf * HOURS_PER_PERIOD * price * growth
                * output_factor
                / 1000.0;
            if energy != 0.0 {
                components.insert(FlowKind::EnergyRevenue, MoneyK(energy));
            }
            if time <= timeline.t_support_end && payment != 0.0 {
                components.insert(FlowKind::CapacityPayment, MoneyK(payment));
            }
            if opex_per_period != 0.0 {
                components.insert(FlowKind::Opex, MoneyK(-opex_per_period));
            }
        }
        if risk_costs[i] != 0.0 {
            components.insert(FlowKind::RiskCost, MoneyK(-risk_costs[i]));
        }

        if m.tax_rate > 0.0 {
            let pre_tax: f64 = components
                .iter()
                .filter(|(k, _)| **k != FlowKind::Capex)
                .map(|(_, m)| m.0)
                .sum();
            if pre_tax > 0.0 {
                components.insert(FlowKind::Tax, MoneyK(-m.tax_rate * pre_tax));
            }
        }

        if !components.is_empty() {
            entries.push(LedgerEntry::from_components(i, time, components));
        }
    }
    Ok(CashFlowLedger {
        period_length: PERIOD_YEARS,
        entries,
    })
}

/// Rebuilds the ledger with installed capacity scaled by `k`, the risk stream
/// scaled alongside (risk cost is per MW) and all per-unit parameters fixed.
pub fn scale_capacity(
    p: &Project,
    m: &MarketAssumptions,
    s: &SupportScheme,
    risk_costs: &[f64],
    k: f64,
) -> Result<CashFlowLedger> {
    let scaled_costs: Vec<f64> = risk_costs.iter().map(|c| c * k).collect();
    build_ledger(&p.scaled_capacity(k), m, s, &scaled_costs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::PriceZone;

    fn market_with(region: &str, cuf: f64) -> MarketAssumptions {
        let mut m = MarketAssumptions::default();
        m.capacity_utilization.insert(region.to_string(), cuf);
        m
    }

    fn unit_project() -> Project {
        Project {
            name: "unit".into(),
            region: "R".into(),
            price_zone: PriceZone::First,
            initiator: "I".into(),
            installed_capacity: 1.0,
            specific_capex: 50.0,
            commissioning_period: 2.5,
        }
    }

    fn build(p: &Project, m: &MarketAssumptions, s: &SupportScheme) -> CashFlowLedger {
        let t = stage_boundaries(p, s, m).unwrap();
        build_ledger(p, m, s, &zero_risk_stream(&t)).unwrap()
    }

    #[test]
    fn energy_revenue_hand_value() {
        // 1 MW × CUF 0.14 × 4380 h × 1000 RUB/MWh / 1000 = 613.2 per period.
        let p = unit_project();
        let mut m = market_with("R", 0.14);
        m.electricity_price.first = 1000.0;
        m.price_growth = 0.0;
        let ledger = build(&p, &m, &SupportScheme::default());
        let operating: Vec<_> = ledger
            .entries
            .iter()
            .filter(|e| e.time > 2.5)
            .collect();
        assert_eq!(operating.len(), 50);
        for e in operating {
            assert!((e.component(FlowKind::EnergyRevenue) - 613.2).abs() < 1e-9);
        }
    }

    #[test]
    fn capex_tranches_at_period_starts() {
        let p = unit_project();
        let m = market_with("R", 0.14);
        let ledger = build(&p, &m, &SupportScheme::default());
        let tranches: Vec<_> = ledger
            .entries
            .iter()
            .filter(|e| e.component(FlowKind::Capex) != 0.0)
            .collect();
        assert_eq!(tranches.len(), 5);
        let total = p.capex_total().0;
        for (j, e) in tranches.iter().enumerate() {
            assert_eq!(e.time, j as f64 * 0.5);
            assert!((e.component(FlowKind::Capex) + total / 5.0).abs() < 1e-9);
        }
    }

    #[test]
    fn front_loaded_capex_sits_at_decision_date() {
        let p = unit_project();
        let mut m = market_with("R", 0.14);
        m.capex_schedule = CapexSchedule::FrontLoaded;
        let ledger = build(&p, &m, &SupportScheme::default());
        assert!(
            (ledger.entries[0].component(FlowKind::Capex) + p.capex_total().0).abs() < 1e-9
        );
        assert_eq!(
            ledger
                .entries
                .iter()
                .filter(|e| e.component(FlowKind::Capex) != 0.0)
                .count(),
            1
        );
    }

    #[test]
    fn zero_payment_multiplier_removes_the_component() {
        let p = unit_project();
        let m = market_with("R", 0.14);
        let s = SupportScheme {
            payment_multiplier: 0.0,
            ..SupportScheme::default()
        };
        let ledger = build(&p, &m, &s);
        assert_eq!(ledger.component_total(FlowKind::CapacityPayment), 0.0);
        assert!(ledger
            .entries
            .iter()
            .all(|e| !e.components.contains_key(&FlowKind::CapacityPayment)));
    }

    #[test]
    fn capacity_payments_cover_exactly_the_support_window() {
        let p = unit_project();
        let m = market_with("R", 0.14);
        let s = SupportScheme::default();
        let ledger = build(&p, &m, &s);
        let times: Vec<f64> = ledger
            .entries
            .iter()
            .filter(|e| e.component(FlowKind::CapacityPayment) != 0.0)
            .map(|e| e.time)
            .collect();
        assert_eq!(times.len(), 30);
        assert_eq!(times.first().copied(), Some(3.0));
        assert_eq!(times.last().copied(), Some(17.5));
    }

    #[test]
    fn net_equals_component_sum() {
        let p = unit_project();
        let m = market_with("R", 0.14);
        let ledger = build(&p, &m, &SupportScheme::default());
        for e in &ledger.entries {
            let sum: f64 = e.components.values().map(|m| m.0).sum();
            assert!((e.net.0 - sum).abs() <= 1e-9 * sum.abs().max(1.0));
        }
    }

    #[test]
    fn truncate_at_zero_keeps_first_tranche_only() {
        let p = unit_project();
        let m = market_with("R", 0.14);
        let ledger = build(&p, &m, &SupportScheme::default());
        let head = ledger.truncate(0.0).unwrap();
        assert_eq!(head.entries.len(), 1);
        assert_eq!(head.entries[0].time, 0.0);
        assert!(head.entries[0].components.contains_key(&FlowKind::Capex));
    }

    #[test]
    fn truncate_at_lifetime_end_is_identity() {
        let p = unit_project();
        let m = market_with("R", 0.14);
        let ledger = build(&p, &m, &SupportScheme::default());
        assert_eq!(ledger.truncate(27.5).unwrap(), ledger);
    }

    #[test]
    fn truncate_rejects_off_grid_times() {
        let ledger = CashFlowLedger::from_net_flows(&[(0.0, -1.0)]).unwrap();
        assert!(matches!(ledger.truncate(1.23), Err(Error::OffGridTime(_))));
    }

    #[test]
    fn misaligned_risk_stream_is_rejected() {
        let p = unit_project();
        let m = market_with("R", 0.14);
        let err = build_ledger(&p, &m, &SupportScheme::default(), &[0.0; 3]).unwrap_err();
        assert!(matches!(err, Error::MisalignedRiskStream { expected: 56, got: 3 }));
    }

    #[test]
    fn scaling_capacity_scales_every_flow() {
        let p = unit_project();
        let m = market_with("R", 0.14);
        let s = SupportScheme::default();
        let t = stage_boundaries(&p, &s, &m).unwrap();
        let risk: Vec<f64> = (0..t.grid_len()).map(|i| if i > 5 { 30.0 } else { 0.0 }).collect();

        let base = build_ledger(&p, &m, &s, &risk).unwrap();
        let same = scale_capacity(&p, &m, &s, &risk, 1.0).unwrap();
        assert_eq!(base, same);

        let doubled = scale_capacity(&p, &m, &s, &risk, 2.0).unwrap();
        assert_eq!(base.entries.len(), doubled.entries.len());
        for (a, b) in base.entries.iter().zip(&doubled.entries) {
            assert!((b.net.0 - 2.0 * a.net.0).abs() <= 1e-9 * a.net.0.abs().max(1.0));
        }
    }

    #[test]
    fn sibling_projects_differ_only_by_capacity_scale() {
        // Same zone, same specific capex, 10 vs 5 MW: strict 2:1 ledgers.
        let big = Project {
            name: "SPP-2018-1".into(),
            region: "Altai Republic".into(),
            price_zone: PriceZone::Second,
            initiator: "LLC Avelar Solar Technology".into(),
            installed_capacity: 10.0,
            specific_capex: 122.0,
            commissioning_period: 0.5,
        };
        let small = Project {
            name: "SPP-2018-2".into(),
            installed_capacity: 5.0,
            specific_capex: 122.0,
            ..big.clone()
        };
        let m = market_with("Altai Republic", 0.137);
        let s = SupportScheme::default();
        let t = stage_boundaries(&big, &s, &m).unwrap();
        let risk: Vec<f64> = (0..t.grid_len()).map(|i| if i > 1 { 40.0 } else { 0.0 }).collect();
        let half_risk: Vec<f64> = risk.iter().map(|c| c / 2.0).collect();

        let lb = build_ledger(&big, &m, &s, &risk).unwrap();
        let ls = build_ledger(&small, &m, &s, &half_risk).unwrap();
        assert_eq!(lb.entries.len(), ls.entries.len());
        for (a, b) in lb.entries.iter().zip(&ls.entries) {
            assert!((a.net.0 - 2.0 * b.net.0).abs() <= 1e-9 * a.net.0.abs().max(1.0));
        }

        let rebuilt = scale_capacity(&big, &m, &s, &risk, 0.5).unwrap();
        assert_eq!(rebuilt.entries, ls.entries);
    }

    #[test]
    fn flat_tax_hits_only_positive_operating_income() {
        let p = unit_project();
        let mut m = market_with("R", 0.14);
        m.tax_rate = 0.20;
        let ledger = build(&p, &m, &SupportScheme::default());
        for e in &ledger.entries {
            let pre_tax: f64 = e
                .components
                .iter()
                .filter(|(k, _)| !matches!(k, FlowKind::Capex | FlowKind::Tax))
                .map(|(_, m)| m.0)
                .sum();
            let tax = e.component(FlowKind::Tax);
            if pre_tax > 0.0 {
                assert!((tax + 0.20 * pre_tax).abs() < 1e-9);
            } else {
                assert_eq!(tax, 0.0);
            }
        }
        // The decision-date entry is capex only: no tax there.
        assert_eq!(ledger.entries[0].component(FlowKind::Tax), 0.0);
    }
}
