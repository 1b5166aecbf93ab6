//! Scenario-driven checks for twisted Dirac structures.

pub mod builtins;
pub mod report;
pub mod run;
pub mod scenario;

pub use report::{Report, Verdict};
pub use run::run;
pub use scenario::{Overrides, Prepared, Scenario, ScenarioError};

/// Loads, prepares and runs a scenario given by builtin name or path.
pub fn run_source(source: &str, overrides: &Overrides) -> Result<Report, ScenarioError> {
    let prepared = Prepared::new(Scenario::load(source)?, overrides)?;
    Ok(run(&prepared))
}
