//! Shared fixtures for the benchmark suite.

use subsidyscope_core::{
    Calibration, MarketAssumptions, PriceZone, Project, RiskFactor, RiskProfile, SupportScheme,
    ZonePrices,
};

/// A representative mid-sized project on a 2.5-year build.
pub fn sample_project() -> Project {
    Project {
        name: "bench-spp".into(),
        region: "bench-region".into(),
        price_zone: PriceZone::First,
        initiator: "bench".into(),
        installed_capacity: 15.0,
        specific_capex: 62.0,
        commissioning_period: 2.5,
    }
}

/// A fully populated calibration covering `sample_project`'s region.
pub fn sample_calibration() -> Calibration {
    let mut market = MarketAssumptions {
        discount_rate: 0.12,
        electricity_price: ZonePrices {
            first: 1700.0,
            second: 1250.0,
        },
        price_growth: 0.05,
        opex: 0.7,
        ..MarketAssumptions::default()
    };
    market
        .capacity_utilization
        .insert("bench-region".into(), 0.18);
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
