//! Library surface of the batch front-end: configuration parsing, job
//! orchestration, and deterministic report export.

pub mod config;
pub mod run;

pub use config::{validate, AnalysisKind, JobConfig};
pub use run::{export_report, run_job, RunReport};
