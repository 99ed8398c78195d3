//! Experiment configuration, replication harness and CSV emitters.

pub mod config;
pub mod csv;
pub mod figures;
pub mod run;

pub use config::{parse_config, ExperimentConfig};
pub use figures::{emit_figures, Figure};
pub use run::{run_experiment, write_experiment, CellReport, EstimateRecord, ExperimentOutput};
