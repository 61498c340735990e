//! Calibration and scenario file handling.
//!
//! The calibration file is TOML holding the market assumptions, default
//! support scheme, risk profile and classification margin; missing keys fall
//! back to the documented defaults of the corresponding types. Resolution
//! order: `--config` flag, then the `SUBSIDYSCOPE_CONFIG` environment
//! variable, then the embedded default.

use crate::error::{CliError, Result};
use std::path::{Path, PathBuf};
use subsidyscope_core::{
    composite_score, on_half_year_grid, Calibration, Scenario, MAX_SUPPORT_YEARS,
};

/// Environment variable pointing at a calibration file.
pub const ENV_CONFIG: &str = "SUBSIDYSCOPE_CONFIG";

/// Embedded default calibration, fitted against the bundled targets.
pub const DEFAULT_CALIBRATION: &str = include_str!("../data/calibration.toml");
/// Embedded default scenario set (S0–S9).
pub const DEFAULT_SCENARIOS: &str = include_str!("../data/scenarios.toml");
/// Embedded copy of the bundled project table (ru-decimal-comma).
pub const BUNDLED_PROJECTS: &str = include_str!("../data/projects.csv");
/// Embedded copy of the bundled targets table (ru-decimal-comma).
pub const BUNDLED_TARGETS: &str = include_str!("../data/targets.csv");

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Loads the calibration honoring the resolution order.
pub fn load_calibration(explicit: Option<&Path>) -> Result<Calibration> {
    let env_path = std::env::var_os(ENV_CONFIG).map(PathBuf::from);
    load_calibration_from(explicit, env_path.as_deref())
}

/// Resolution-order core, with the environment lookup made explicit so tests
/// can drive it without mutating process state.
pub fn load_calibration_from(
    explicit: Option<&Path>,
    env_path: Option<&Path>,
) -> Result<Calibration> {
    let text = match explicit.or(env_path) {
        Some(path) => read(path)?,
        None => DEFAULT_CALIBRATION.to_string(),
    };
    parse_calibration(&text)
}

/// Parses and validates a calibration file.
pub fn parse_calibration(text: &str) -> Result<Calibration> {
    let cal: Calibration =
        toml::from_str(text).map_err(|e| CliError::BadCalibration(e.to_string()))?;
    validate_calibration(&cal)?;
    Ok(cal)
}

/// Checks every calibration value against its domain.
pub fn validate_calibration(cal: &Calibration) -> Result<()> {
    let bad = |msg: &str| Err(CliError::BadCalibration(msg.to_string()));
    let m = &cal.market;
    if !m.discount_rate.is_finite() || m.discount_rate <= -1.0 {
        return bad("discount_rate must be a finite rate above -1");
    }
    if m.electricity_price.first < 0.0 || m.electricity_price.second < 0.0 {
        return bad("electricity prices must be nonnegative");
    }
    if !m.price_growth.is_finite() || m.price_growth <= -1.0 {
        return bad("price_growth must be a finite rate above -1");
    }
    for (region, cuf) in &m.capacity_utilization {
        if !(*cuf > 0.0 && *cuf <= 0.35) {
            return bad(&format!(
                "capacity utilization for '{region}' must lie in (0, 0.35]"
            ));
        }
    }
    if m.opex < 0.0 {
        return bad("opex must be nonnegative");
    }
    if !(m.lifetime > 0.0) || !on_half_year_grid(m.lifetime) {
        return bad("lifetime must be a positive multiple of 0.5 years");
    }
    if !(0.0..1.0).contains(&m.degradation) {
        return bad("degradation must lie in [0, 1)");
    }
    if !(0.0..1.0).contains(&m.tax_rate) {
        return bad("tax_rate must lie in [0, 1)");
    }

    let s = &cal.support;
    if !on_half_year_grid(s.support_duration) || s.support_duration > MAX_SUPPORT_YEARS {
        return bad("support_duration must lie on the 0.5-year grid in [0, 15]");
    }
    if s.support_duration > m.lifetime {
        return bad("support_duration must not exceed lifetime");
    }
    if !s.guaranteed_return.is_finite() || s.guaranteed_return <= -1.0 {
        return bad("guaranteed_return must be a finite rate above -1");
    }
    if !(0.0..=1.0).contains(&s.payment_multiplier) {
        return bad("payment_multiplier must lie in [0, 1]");
    }
    if let Some(term) = s.recovery_term {
        if !on_half_year_grid(term) || !(term > 0.0) || term > MAX_SUPPORT_YEARS {
            return bad("recovery_term must lie on the 0.5-year grid in (0, 15]");
        }
    }

    composite_score(&cal.risk).map_err(|e| CliError::BadCalibration(e.to_string()))?;
    if cal.risk.intensity < 0.0 || cal.risk.multiplier < 0.0 {
        return bad("risk intensity and multiplier must be nonnegative");
    }
    if !(cal.classification_margin >= 0.0) {
        return bad("classification_margin must be nonnegative");
    }
    Ok(())
}

/// Loads the scenario set from a file, or the embedded default set.
pub fn load_scenarios(path: Option<&Path>) -> Result<Vec<Scenario>> {
    match path {
        Some(p) => parse_scenarios(&read(p)?),
        None => parse_scenarios(DEFAULT_SCENARIOS),
    }
}

#[derive(serde::Deserialize)]
struct ScenarioFile {
    #[serde(default)]
    scenario: Vec<Scenario>,
}

/// Parses a scenario file: a TOML array-of-tables named `scenario`.
pub fn parse_scenarios(text: &str) -> Result<Vec<Scenario>> {
    let file: ScenarioFile =
        toml::from_str(text).map_err(|e| CliError::BadScenarioFile(e.to_string()))?;
    if file.scenario.is_empty() {
        return Err(CliError::BadScenarioFile(
            "file defines no [[scenario]] entries".into(),
        ));
    }
    let mut seen = std::collections::BTreeSet::new();
    for sc in &file.scenario {
        if sc.id.is_empty() {
            return Err(CliError::BadScenarioFile("scenario with empty id".into()));
        }
        if !seen.insert(sc.id.clone()) {
            return Err(CliError::BadScenarioFile(format!(
                "duplicate scenario id '{}'",
                sc.id
            )));
        }
    }
    Ok(file.scenario)
}
