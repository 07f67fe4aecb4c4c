//! Experiment orchestration: configuration, seeded replication and reports.

pub mod config;
pub mod report;
pub mod run;
pub mod seeds;

pub use config::{ExperimentConfig, Regime};
pub use report::{
    emit_report, parse_csv, rows_to_csv, ExperimentReport, OutputFormat, Quantity, ReportRow,
};
pub use run::{
    build_report, read_raw_results, run_convergence_experiment, simulate_experiment,
    write_raw_results, RawBlock, RawResults, TimeSlice,
};
pub use seeds::{derive_seed, stream, StreamPurpose};
