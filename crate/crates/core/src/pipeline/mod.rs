//! End-to-end run: configuration, stage sequencing and artifacts.

pub mod config;
mod run;

pub use config::{RbSettings, RunConfig, Stage, SCHEMA_VERSION};
pub use run::{
    run_pipeline, unitary_fidelity, CrosstalkEstimate, StageReport, Summary, UnitaryFidelity, LOG_FILE, REPORT_FILE,
    SUMMARY_FILE,
};
