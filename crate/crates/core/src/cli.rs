//! Library side of the `funcsel` command: configuration, CSV ingestion and
//! the select / bootstrap / simulate jobs.
//!
//! Exit codes follow [`Error::exit_code`](crate::Error::exit_code): 0 on
//! success, 1 for usage and configuration errors, 2 for data errors, 3 for
//! numerical failures.

pub mod config;
pub mod ingest;
pub mod jobs;

pub use config::{parse_config_text, read_config_file, JobConfig, Mode, OutputFormat, QSetting, SEED_ENV};
pub use ingest::{default_ids, ingest_long_csv, write_long_csv, IngestedData};
pub use jobs::{
    bootstrap_dataset, bootstrap_indices, run, run_bootstrap, run_select, run_simulate, select_dataset,
    with_threads, BootstrapReport, JobOutput, MethodRatios, Records, SelectReport, SimulateReport,
};
