//! Absorbing-layer coefficients and the assembled PML systems.

mod assemble;
mod coefficients;
mod profile;

pub(crate) use assemble::check_radii;
pub use assemble::{assemble_frequency_system, assemble_time_blocks, ComplexSystem, TimeBlocks};
pub use coefficients::{pml_matrices_at, pml_matrices_at_quad, ComplexTensor, PmlMatrices, Tensor};
pub use profile::{eval_profile, PmlProfile, ProfileKind, SigmaHatMode};
