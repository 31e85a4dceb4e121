//! Batch runner for the `mminf-core` laboratory: suite configuration,
//! parallel orchestration, a concurrent Mehler-law cache, and JSON/CSV output.

pub mod cache;
pub mod cli;
pub mod config;
pub mod error;
pub mod output;
pub mod parallel;
pub mod report;
pub mod suite;

pub use config::{SuiteConfig, SuiteKind};
pub use error::LabError;
pub use report::{exit_status, Check, MasterReport, SuiteReport};
pub use suite::{run, RunOutput};
