//! File formats: dataset CSV, TOML study configuration and report output.

mod config;
mod dataset_csv;
mod report;

pub use config::{
    load_run_file, load_simulation_config, parse_run_file, ConfigError, ProbeSettings, RunFile,
};
pub use dataset_csv::{parse_dataset_csv, read_dataset_csv, write_dataset_csv, DataError};
pub use report::{
    emit_probe, emit_records, emit_selection, emit_study, read_study_summary, OutputFormat,
    ReportError, SelectionMeta,
};
