//! Front-end error type: ingestion, configuration and reporting failures,
//! plus pass-through of engine errors.

use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("malformed number '{text}' for locale {locale}")]
    MalformedNumber { text: String, locale: &'static str },
    #[error("'{text}' mixes dot and comma separators; declare the file's locale correctly")]
    MixedSeparators { text: String },
    #[error("dataset is missing required column '{0}'")]
    MissingColumn(String),
    #[error("dataset rows failed validation:{}", format_rows(.0))]
    RowValidationFailed(Vec<(usize, String)>),
    #[error("duplicate project name '{0}' in dataset")]
    DuplicateProject(String),
    #[error("dataset contains no project rows")]
    EmptyDataset,
    #[error("unknown scenario '{0}'")]
    UnknownScenario(String),
    #[error("unknown trajectory class '{0}'")]
    UnknownTrajectory(String),
    #[error("report input is empty")]
    EmptyReport,
    #[error("calibration file invalid: {0}")]
    BadCalibration(String),
    #[error("scenario file invalid: {0}")]
    BadScenarioFile(String),
    #[error("break-even grid step {0} must be a positive multiple of 0.5 within (0, 15]")]
    BadGridStep(f64),
    #[error("cannot read '{path}': {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("CSV structure error: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Engine(#[from] subsidyscope_core::Error),
}

fn format_rows(rows: &[(usize, String)]) -> String {
    let mut out = String::new();
    for (row, cause) in rows {
        out.push_str(&format!("\n  row {row}: {cause}"));
    }
    out
}

pub type Result<T> = std::result::Result<T, CliError>;

/// Process exit code for an error: 2 for data/validation problems, 3 for
/// numerical failures. Usage errors (exit 1) never reach this function —
/// they come from argument parsing.
pub fn exit_code(err: &CliError) -> i32 {
    use subsidyscope_core::Error as E;
    match err {
        CliError::Engine(e) => match e {
            E::RateOutOfDomain(_) | E::EmptyLedger | E::NoSignFeasiblePoint { .. } => 3,
            _ => 2,
        },
        _ => 2,
    }
}
