//! Library side of the command-line front end: locale-aware number parsing,
//! dataset and configuration ingestion, and report emission.

pub mod config;
pub mod dataset;
pub mod error;
pub mod locale;
pub mod report;

pub use config::{load_calibration, load_scenarios};
pub use dataset::{load_projects, load_targets, ProjectDataset};
pub use error::{exit_code, CliError, Result};
pub use locale::Locale;
