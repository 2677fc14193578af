//! Experiment orchestration: configs, instance generation, verification
//! suites, question searches, JSON-lines persistence and replay.
//!
//! A run file starts with a manifest line, holds one record per line in
//! trial order and ends with a summary line. Without `record_runtime`, two
//! runs of the same config produce byte-identical files for exact suites.

pub mod canon;
mod config;
mod record;
mod run;
mod suites;

use thiserror::Error;

pub use config::{ExperimentConfig, Family, Suite, WeightSpec, EXHAUSTIVE_MAX};
pub use record::{digest, read_run, Instance, Line, Manifest, ResultRecord, RunFile, Summary, Verdict, CODE_VERSION};
pub use run::{question_search, replay, run_suite, run_suite_to, Question, ReplayReport, RunOutcome, PRESISTANCE_REPLAY_TOLERANCE};
pub use suites::evaluate;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("record file line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("no record with id {0}")]
    RecordNotFound(usize),
    #[error("record {id} does not replay: {detail}")]
    Mismatch { id: usize, detail: String },
    #[error(transparent)]
    Graph(#[from] crate::graph::GraphError),
    #[error(transparent)]
    Flow(#[from] crate::maxflow::FlowError),
    #[error(transparent)]
    Saw(#[from] crate::saw::SawError),
    #[error(transparent)]
    ClosedForm(#[from] crate::closedform::ClosedFormError),
}

/// Process exit codes shared by the command-line tool.
pub mod exit_code {
    pub const OK: i32 = 0;
    pub const VIOLATION: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const BUDGET: i32 = 3;
}
