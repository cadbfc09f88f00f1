//! Laplace-domain reference solutions: the half-circle DtN map, the
//! DtN-truncated problem, the PML problem, and their comparison.

mod modal;
mod solve;
mod study;

pub use modal::{dtn_apply, dtn_pairing, project_trace, ModalTrace};
pub use solve::{
    interface_projection, pml_extension_mode, relative_l2, solve_dtn_truncated, solve_pml_frequency, DtnSolution,
    DEFAULT_MODES,
};
pub use study::{
    convergence_study, floor_split, write_study_csv, StudyReport, StudyRow, StudySetup, SweepParam, FLOOR_TOLERANCE,
};
