//! Experiment harness for `vinolab-core`: configs, invariant suites and
//! byte-stable reports. The `vinolab` binary is a thin layer over this.

pub mod config;
pub mod report;
pub mod suite;

pub use config::{parse_cap, parse_positive_rational, parse_rational, resolve_cap, ExperimentConfig, CAP_ENV};
pub use report::{emit_report, j_sweep, render_report, to_sorted_json, Format, Report, SweepRow};
pub use suite::{run_suite, Status, SuiteCheck, SuiteResult, SUITES};

use vinolab_core::exactset::SetFileError;
use vinolab_core::Error;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(String),
    #[error(transparent)]
    SetFile(#[from] SetFileError),
    #[error(transparent)]
    Core(#[from] Error),
}

impl HarnessError {
    /// 2 for anything the caller got wrong, 3 when a resource cap was hit.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Core(Error::ResourceLimit { .. }) => 3,
            _ => 2,
        }
    }
}

pub fn read_set(path: &std::path::Path) -> Result<vinolab_core::GroundSet, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
    Ok(vinolab_core::GroundSet::from_json(&text)?)
}
