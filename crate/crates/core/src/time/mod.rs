//! Implicit Euler time stepping of the PML system with probes and diagnostics.

mod output;
mod run;
mod source;
mod state;
mod stepper;

pub use output::{write_functionals_csv, write_probes_csv, write_vtk};
pub use run::{run, run_with, stability_functionals, RunSettings, StabilityFunctionals, StepRecord, Trajectory};
pub use source::{SourceTerm, Temporal};
pub use state::State;
pub use stepper::Stepper;
