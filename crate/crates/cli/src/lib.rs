//! Scenario runner for `collapse-core`: parses scenario files, executes the
//! named experiment and emits a replayable trace plus a summary.

pub mod runners;
pub mod scenario;
pub mod summary;

pub use runners::run_scenario;
pub use scenario::{ConfigError, ScenarioFile, SCENARIOS};
pub use summary::{emit_summary, Summary};
