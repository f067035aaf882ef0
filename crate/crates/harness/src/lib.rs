//! Scenario files, Monte Carlo sampling and reports on top of `ifm-core`.

pub mod cli;
pub mod error;
pub mod report;
pub mod run;
pub mod sampling;
pub mod scenario;

pub use cli::{load_scenario, run_cli};
pub use error::{HarnessError, Result};
pub use run::{run_protocol, run_scenario, run_tsvf};
pub use sampling::{sample, sample_tasks, sample_with, standard_error, Counts, GENERATOR};
pub use scenario::{bundled, parse_scenario, serialize_scenario, ProtocolSpec, SamplingSpec, ScenarioSpec};
