//! Experiment configuration, drivers and tabular output.

pub mod config;
pub mod output;
pub mod runs;

pub use config::{Experiment, ExperimentConfig, Filling, LayerSpec, Mapping, ModelKind, RawConfig};
pub use runs::{
    correlation_relative_error, run_convergence, run_correlation, run_ed, run_plateau,
    run_plateau_serial, ConvergenceRecord, ConvergenceReport, CorrelationRecord, CorrelationReport,
    CorrelationSummary, EdRecord, PlateauAggregate, PlateauReport, PlateauSample, ReferenceInfo,
    RunStatus,
};
