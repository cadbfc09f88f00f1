//! Run configurations, the two worked examples, parameter sweeps with
//! self-convergence errors, and artifact output.

mod config;
mod runner;

pub use config::{parse_surface, parse_temporal, RunConfig, Sweep, SweepKind};
pub use runner::{
    fit_errors, frequency_study, mesh_for, profile_for, relative_error, run_example, run_time, source_for,
    sweep_and_fit, FitReport, PhysicalHistory, RunSummary, SweepOutcome, SweepPoint, TimeRun,
};
