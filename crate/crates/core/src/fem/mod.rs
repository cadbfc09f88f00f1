//! P1 finite elements: sparse storage, assembly, constraints and direct solves.

mod assemble;
mod dofs;
mod scalar;
mod solve;
mod sparse;

pub use assemble::{
    assemble_gradient_coupling, assemble_load, assemble_mass, assemble_stiffness, assemble_tensor_mass,
    identity_tensor, inner, mass_norm, QuadPoint,
};
pub use dofs::{apply_dirichlet, ConstrainedSystem, DofMap, Field};
pub use scalar::{norm2, Scalar};
pub use solve::{solve, LuSolver, RESIDUAL_TOL};
pub use sparse::{BlockBuilder, SparseMatrix};
