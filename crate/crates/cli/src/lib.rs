//! Task files, the example corpus and JSON reports for the `rigcoh` binary.

pub mod corpus;
pub mod run;
pub mod task;

pub use run::{run_task, Report, SCHEMA};
pub use task::{Backend, TaskError, TaskSpec};

/// Whether a finished report should make the process exit with failure.
pub fn failed(report: &Report, strict: bool) -> bool {
    !report.passed || (strict && !report.payload.unresolved.is_empty())
}
