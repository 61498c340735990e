use thiserror::Error;

/// A single violated invariant found while validating a [`crate::domain::Project`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("installed capacity must be positive")]
    NonPositiveCapacity,
    #[error("specific capex must be positive")]
    NonPositiveCapex,
    #[error("commissioning period must lie on the 0.5-year grid in (0, 10]")]
    BadCommissioningGrid,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid project '{name}': {}", format_violations(.violations))]
    InvalidProject {
        name: String,
        violations: Vec<Violation>,
    },
    #[error("support duration {support} y exceeds lifetime {lifetime} y")]
    SupportExceedsLifetime { support: f64, lifetime: f64 },
    #[error("risk factor weights sum to {sum}, expected 1")]
    WeightsNotNormalized { sum: f64 },
    #[error("risk scale factor must be nonnegative, got {0}")]
    NegativeFactor(f64),
    #[error("risk stream has {got} entries, ledger grid needs {expected}")]
    MisalignedRiskStream { expected: usize, got: usize },
    #[error("time {0} is not a nonnegative multiple of 0.5 years")]
    OffGridTime(f64),
    #[error("discount rate {0} is outside (-1, inf)")]
    RateOutOfDomain(f64),
    #[error("ledger has no nonzero flow")]
    EmptyLedger,
    #[error("no capacity utilization factor configured for region '{0}'")]
    UnknownRegion(String),
    #[error("no project named '{0}' in the dataset")]
    UnknownProject(String),
    #[error("scenario '{id}' override out of domain: {what}")]
    OutOfDomainOverride { id: String, what: String },
    #[error("calibration bounds are infeasible: {0}")]
    InfeasibleBounds(String),
    #[error("no sign-feasible calibration point found ({mismatches} sign mismatches remain)")]
    NoSignFeasiblePoint { mismatches: usize },
}

fn format_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
