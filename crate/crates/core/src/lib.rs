//! Deterministic techno-economic engine for capacity-supported solar
//! projects.
//!
//! The crate models a project's semi-annual cash-flow ledger — capex during
//! commissioning, then energy revenue, capacity payments, operating and
//! risk costs — and evaluates NPV, IRR and DPP at the four stage boundaries
//! (decision date, operation start, support end, lifetime end). On top of
//! that sit scenario sweeps, trajectory classification, break-even
//! support-duration solving and calibration against published targets.
//!
//! All monetary quantities are thousands of RUB; time is years on a
//! 0.5-year grid; everything is pure and deterministic.

pub mod calibrate;
pub mod cashflow;
pub mod domain;
pub mod error;
pub mod metrics;
pub mod risk;
pub mod scenario;

pub use calibrate::{
    calibrate, score_calibration, CalibrateOptions, CalibrationBounds, FitOutcome, FitRow, Loss,
    TargetRecord,
};
pub use cashflow::{
    build_ledger, scale_capacity, zero_risk_stream, CashFlowLedger, FlowKind, LedgerEntry,
};
pub use domain::{
    on_half_year_grid, periods_in, stage_boundaries, validate_project, CapexSchedule,
    MarketAssumptions, MoneyK, PriceZone, Project, SupportScheme, Timeline, ZonePrices,
    HOURS_PER_PERIOD, PERIOD_YEARS,
};
pub use error::{Error, Result, Violation};
pub use metrics::{
    cumulative_discounted, dpp, evaluate, irr, npv, DppOutcome, IrrOutcome, IrrStatus,
    MetricBundle,
};
pub use risk::{composite_score, risk_cost_stream, scale_risk, CompositeScore, RiskFactor, RiskProfile};
pub use scenario::{
    apply_scenario, breakeven_support, classify, default_scenarios, evaluate_stages,
    portfolio_breakeven, scenario_ledger, stage4_npv_at_duration, sweep, BreakEvenResult,
    Calibration, PortfolioBreakEven, RiskMode, Scenario, StageReport, TrajectoryClass,
    MAX_SUPPORT_YEARS,
};
