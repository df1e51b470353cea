//! Scenario files and reports for the `envelope` command.
//!
//! A scenario names a function, a domain or boundary curve, and a list of checks.
//! [`load`] parses and validates it; [`run_scenario`] produces a [`Report`] whose
//! exit code is 0 when every check agreed, 2 on a mathematical inconsistency and 1
//! on an operational error.

mod run;
mod scenario;

use std::path::Path;

pub use run::{run_scenario, CheckResult, Report, Status, Timing, Timings};
pub use scenario::{
    validate, Check, CurveSource, Diagnostic, Format, Input, Plan, ScenarioConfig, DEFAULT_GRID,
    DEFAULT_N_MAX, DEFAULT_RADII, DEFAULT_SAMPLES,
};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed scenario {path}: {source}")]
    Parse {
        path: String,
        source: serde_json::Error,
    },
    #[error("invalid scenario:\n{}", .0.iter().map(|d| format!("  {d}")).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<Diagnostic>),
}

/// Reads a scenario file without validating it.
pub fn read_config(path: &Path) -> Result<ScenarioConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| CliError::Parse {
        path: path.display().to_string(),
        source,
    })
}

/// Turns a config into a runnable plan, resolving CSV files next to `scenario_path`.
pub fn load(config: &ScenarioConfig, scenario_path: &Path) -> Result<Plan, CliError> {
    let base = scenario_path.parent().unwrap_or(Path::new("."));
    validate(config, base).map_err(CliError::Invalid)
}
