//! Scenario runner, randomized verification and file formats for the reduced
//! bubble-concentration flows; the numerical core lives in `shadowflow-core`.

pub mod config;
pub mod quadverify;
pub mod report;
pub mod scenarios;

pub use config::{RunConfig, Scenario};
pub use report::{Check, ScenarioReport};
pub use scenarios::{run_scenario, verify_batteries, ScenarioRun};
