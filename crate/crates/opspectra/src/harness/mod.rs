//! Experiment orchestration: configuration, CSV persistence, law curves,
//! and seeded reproducible runs for every experiment.

pub mod config;
pub mod csv;
pub mod curves;
pub mod run;

pub use config::{Experiment, ExperimentConfig, PhasesMode};
pub use run::{run, RunOutcome};
