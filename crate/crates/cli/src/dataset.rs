//! Dataset ingestion: the project table and the published-targets table.
//!
//! Both are CSV with a fixed header; `#` lines are comments. All numeric
//! cells go through the declared locale — see [`crate::locale`].

use crate::error::{CliError, Result};
use crate::locale::{parse_number, Locale};
use std::path::{Path, PathBuf};
use subsidyscope_core::{validate_project, PriceZone, Project, TargetRecord, TrajectoryClass};

/// Expected header of the projects table, in documented order.
pub const PROJECT_COLUMNS: [&str; 7] = [
    "name",
    "region",
    "price_zone",
    "initiator",
    "capacity_mw",
    "specific_capex_krub_kw",
    "commissioning_years",
];

/// Expected header of the targets table; `trajectory` is optional.
pub const TARGET_COLUMNS: [&str; 5] = ["name", "npv_s3", "irr_s3", "npv_s4", "irr_s4"];

/// A validated project table plus its provenance.
#[derive(Debug, Clone)]
pub struct ProjectDataset {
    pub projects: Vec<Project>,
    pub source: PathBuf,
    pub locale: Locale,
}

struct Columns {
    index: Vec<usize>,
    trajectory: Option<usize>,
}

fn reader_for(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(text.as_bytes())
}

fn resolve_columns(
    headers: &csv::StringRecord,
    required: &[&str],
    optional_trajectory: bool,
) -> Result<Columns> {
    let mut index = Vec::with_capacity(required.len());
    for name in required {
        let pos = headers
            .iter()
            .position(|h| h == *name)
            .ok_or_else(|| CliError::MissingColumn(name.to_string()))?;
        index.push(pos);
    }
    let trajectory = if optional_trajectory {
        headers.iter().position(|h| h == "trajectory")
    } else {
        None
    };
    Ok(Columns { index, trajectory })
}

fn read_source(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parse_zone(text: &str) -> std::result::Result<PriceZone, String> {
    match text.to_ascii_lowercase().as_str() {
        "first" => Ok(PriceZone::First),
        "second" => Ok(PriceZone::Second),
        other => Err(format!("unknown price zone '{other}' (expected first or second)")),
    }
}

fn parse_trajectory(text: &str) -> Result<TrajectoryClass> {
    match text {
        "maintained_within_csa" => Ok(TrajectoryClass::MaintainedWithinCsa),
        "remains_within_lifetime" => Ok(TrajectoryClass::RemainsWithinLifetime),
        "slowed_before_lifetime" => Ok(TrajectoryClass::SlowedBeforeLifetime),
        "initially_ineffective" => Ok(TrajectoryClass::InitiallyIneffective),
        other => Err(CliError::UnknownTrajectory(other.to_string())),
    }
}

/// Loads and validates the project table. Every bad row is reported, not
/// just the first.
pub fn load_projects(path: &Path, locale: Locale) -> Result<ProjectDataset> {
    parse_projects(&read_source(path)?, locale).map(|projects| ProjectDataset {
        projects,
        source: path.to_path_buf(),
        locale,
    })
}

/// Parses the project table from in-memory text (embedded datasets, tests).
pub fn parse_projects(text: &str, locale: Locale) -> Result<Vec<Project>> {
    let mut reader = reader_for(text);
    let headers = reader.headers().map_err(|_| header_missing())?.clone();
    if headers.len() == 0 || (headers.len() == 1 && headers[0].is_empty()) {
        return Err(header_missing());
    }
    let cols = resolve_columns(&headers, &PROJECT_COLUMNS, false)?;

    let mut projects = Vec::new();
    let mut failures: Vec<(usize, String)> = Vec::new();
    for (row_idx, record) in reader.records().enumerate() {
        let row = row_idx + 1;
        let record = record?;
        match parse_project_row(&record, &cols, locale) {
            Ok(p) => match validate_project(&p) {
                Ok(_) => projects.push(p),
                Err(e) => failures.push((row, e.to_string())),
            },
            Err(cause) => failures.push((row, cause)),
        }
    }
    if !failures.is_empty() {
        return Err(CliError::RowValidationFailed(failures));
    }
    if projects.is_empty() {
        return Err(CliError::EmptyDataset);
    }
    let mut seen = std::collections::BTreeSet::new();
    for p in &projects {
        if !seen.insert(p.name.clone()) {
            return Err(CliError::DuplicateProject(p.name.clone()));
        }
    }
    Ok(projects)
}

fn header_missing() -> CliError {
    CliError::MissingColumn(PROJECT_COLUMNS[0].to_string())
}

fn parse_project_row(
    record: &csv::StringRecord,
    cols: &Columns,
    locale: Locale,
) -> std::result::Result<Project, String> {
    let field = |i: usize| record.get(cols.index[i]).unwrap_or("").to_string();
    let number = |i: usize| {
        parse_number(record.get(cols.index[i]).unwrap_or(""), locale).map_err(|e| e.to_string())
    };
    Ok(Project {
        name: field(0),
        region: field(1),
        price_zone: parse_zone(&field(2))?,
        initiator: field(3),
        installed_capacity: number(4)?,
        specific_capex: number(5)?,
        commissioning_period: number(6)?,
    })
}

/// Loads the published-targets table. IRR cells are percentages in the file
/// and fractions in the returned records; the optional `trajectory` column
/// carries the published class.
pub fn load_targets(path: &Path, locale: Locale) -> Result<Vec<TargetRecord>> {
    parse_targets(&read_source(path)?, locale)
}

/// Parses the targets table from in-memory text.
pub fn parse_targets(text: &str, locale: Locale) -> Result<Vec<TargetRecord>> {
    let mut reader = reader_for(text);
    let headers = reader
        .headers()
        .map_err(|_| CliError::MissingColumn(TARGET_COLUMNS[0].to_string()))?
        .clone();
    let cols = resolve_columns(&headers, &TARGET_COLUMNS, true)?;

    let mut targets = Vec::new();
    let mut failures: Vec<(usize, String)> = Vec::new();
    for (row_idx, record) in reader.records().enumerate() {
        let row = row_idx + 1;
        let record = record?;
        let number = |i: usize| parse_number(record.get(cols.index[i]).unwrap_or(""), locale);
        let trajectory = match cols.trajectory {
            Some(t) => match record.get(t).filter(|s| !s.is_empty()) {
                Some(text) => match parse_trajectory(text) {
                    Ok(c) => Some(c),
                    Err(e) => {
                        failures.push((row, e.to_string()));
                        None
                    }
                },
                None => None,
            },
            None => None,
        };
        match (number(1), number(2), number(3), number(4)) {
            (Ok(npv_s3), Ok(irr_s3), Ok(npv_s4), Ok(irr_s4)) => targets.push(TargetRecord {
                name: record.get(cols.index[0]).unwrap_or("").to_string(),
                npv_s3,
                irr_s3: irr_s3 / 100.0,
                npv_s4,
                irr_s4: irr_s4 / 100.0,
                trajectory,
            }),
            (a, b, c, d) => {
                for res in [a.err(), b.err(), c.err(), d.err()].into_iter().flatten() {
                    failures.push((row, res.to_string()));
                }
            }
        }
    }
    if !failures.is_empty() {
        return Err(CliError::RowValidationFailed(failures));
    }
    if targets.is_empty() {
        return Err(CliError::EmptyDataset);
    }
    Ok(targets)
}
