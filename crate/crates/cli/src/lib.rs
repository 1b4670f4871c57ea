//! Scenario loading, sweeps, theorem reports and selftests behind the
//! `symcond` command-line tool.

pub mod error;
pub mod format;
pub mod report;
pub mod scenario;
pub mod selftest;

pub use error::CliError;
pub use format::Format;
pub use report::{check_theorems, reproduce_fig1, run_scenario, sweep_phase, SweepRecord, TheoremStatus};
pub use scenario::{load_scenario, parse_scenario, Experiment, Grid};
pub use selftest::{selftest, SelftestReport};
