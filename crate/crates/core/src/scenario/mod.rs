//! Scenario files: parsing, the check registry, execution and report output.

mod doc;
mod emit;
mod registry;
mod run;

pub use doc::{
    load_scenario, parse_scenario, validate, CheckRequest, EngineName, Scenario, ScenarioDoc, ScenarioError,
    SubmanifoldEntry,
};
pub use emit::{list_checks_text, report_json, report_text};
pub use registry::{known_ids, lookup, registry, Assertability, CheckSpec, Group};
pub use run::{run_checks, MatrixRow, ReportRow, RunOptions, ScenarioReport};
