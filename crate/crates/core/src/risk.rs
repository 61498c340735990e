//! Rating approach: weighted sector-risk scores collapsed into a composite
//! score that drives a linear per-MW cost stream during operation.
//!
//! The factor list shipped in the default calibration is a reconstruction —
//! only the aggregate cost effect is observable in the reference results —
//! so the model keeps the mapping deliberately simple: composite score ×
//! intensity × multiplier × capacity, accrued per operating period.

use crate::domain::{Project, Timeline, PERIOD_YEARS};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

const WEIGHT_SUM_EPS: f64 = 1e-9;

/// One scored risk factor. Weights across a profile sum to 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskFactor {
    pub id: String,
    pub weight: f64,
    pub score: f64,
}

/// A full risk profile: factor scores plus the cost-intensity calibration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskProfile {
    pub factors: Vec<RiskFactor>,
    /// Cost of full risk exposure, thousands of RUB per MW per year.
    pub intensity: f64,
    /// Scenario-controlled scaling of the whole stream; 1.0 by default.
    #[serde(default = "default_multiplier")]
    pub multiplier: f64,
}

fn default_multiplier() -> f64 {
    1.0
}

/// Weighted mean of factor scores, guaranteed to lie in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct CompositeScore(pub f64);

impl RiskProfile {
    fn check_factors(&self) -> Result<()> {
        if self.factors.is_empty() {
            return Err(Error::WeightsNotNormalized { sum: 0.0 });
        }
        let sum: f64 = self.factors.iter().map(|f| f.weight).sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_EPS {
            return Err(Error::WeightsNotNormalized { sum });
        }
        for f in &self.factors {
            if !(0.0..=1.0).contains(&f.score) || f.weight < 0.0 {
                return Err(Error::NegativeFactor(f.score.min(f.weight)));
            }
        }
        Ok(())
    }
}

/// Collapses a profile into its weighted mean score.
pub fn composite_score(profile: &RiskProfile) -> Result<CompositeScore> {
    profile.check_factors()?;
    let value = profile
        .factors
        .iter()
        .map(|f| f.weight * f.score)
        .sum::<f64>()
        .clamp(0.0, 1.0);
    Ok(CompositeScore(value))
}

/// Per-period risk cost over the project timeline, as a nonnegative series
/// aligned with the full semi-annual grid (index 0 = decision date).
///
/// Costs accrue only at operating-period ends, i.e. at grid times strictly
/// after operation start through lifetime end.
pub fn risk_cost_stream(
    profile: &RiskProfile,
    p: &Project,
    t: &Timeline,
) -> Result<Vec<f64>> {
    let score = composite_score(profile)?.0;
    let per_period =
        score * profile.intensity * profile.multiplier * p.installed_capacity * PERIOD_YEARS;
    let n = t.grid_len();
    let mut stream = vec![0.0; n];
    for (i, slot) in stream.iter_mut().enumerate() {
        let time = i as f64 * t.period_length;
        if time > t.t_operation_start && time <= t.t_lifetime_end {
            *slot = per_period;
        }
    }
    Ok(stream)
}

/// Returns the profile with its multiplier scaled by `k`; scores untouched.
pub fn scale_risk(profile: &RiskProfile, k: f64) -> Result<RiskProfile> {
    if !(k >= 0.0) {
        return Err(Error::NegativeFactor(k));
    }
    Ok(RiskProfile {
        multiplier: profile.multiplier * k,
        ..profile.clone()
    })
}
