use super::coefficients::{pml_matrices_at_quad, Tensor};
use super::profile::PmlProfile;
use crate::error::{Error, Result};
use crate::fem::{
    apply_dirichlet, assemble_gradient_coupling, assemble_mass, assemble_stiffness, assemble_tensor_mass,
    ConstrainedSystem, LuSolver, QuadPoint, SparseMatrix,
};
use crate::geometry::{Mesh, Region};
use crate::special::ComplexFrequency;
use num_complex::Complex64;

/// Real FEM blocks of the first-order time-domain PML system.
#[derive(Debug, Clone)]
pub struct TimeBlocks {
    /// Plain mass matrix `(u, v)`.
    pub mass: SparseMatrix<f64>,
    /// Mass over physical triangles only; maps nodal source data to load vectors.
    pub source_mass: SparseMatrix<f64>,
    /// `((sigma + sigma_hat) u, v)`.
    pub m_sigma_sum: SparseMatrix<f64>,
    /// `(sigma u, v)`, drives `u*`.
    pub m_sigma: SparseMatrix<f64>,
    /// `(sigma_hat u*, v)`, the `u*` feedback into the `u` equation.
    pub m_coupling: SparseMatrix<f64>,
    /// `(Lambda1 p, q)` as 2x2 blocks over the components of `p`.
    pub m_lambda1: [[SparseMatrix<f64>; 2]; 2],
    pub m_lambda2: [[SparseMatrix<f64>; 2]; 2],
    /// `(B_x)_ij = \int phi_j d(phi_i)/dx`.
    pub bx: SparseMatrix<f64>,
    pub by: SparseMatrix<f64>,
}

pub(crate) fn check_radii(mesh: &Mesh, profile: &PmlProfile) -> Result<()> {
    let tol = 1e-8 * profile.outer_radius;
    if (mesh.inner_radius - profile.inner_radius).abs() > tol
        || (mesh.outer_radius - profile.outer_radius).abs() > tol
    {
        return Err(Error::InvalidInput(format!(
            "mesh radii ({}, {}) differ from profile radii ({}, {})",
            mesh.inner_radius, mesh.outer_radius, profile.inner_radius, profile.outer_radius
        )));
    }
    Ok(())
}

pub fn assemble_time_blocks(mesh: &Mesh, profile: &PmlProfile) -> Result<TimeBlocks> {
    check_radii(mesh, profile)?;
    let coef = |q: &QuadPoint| pml_matrices_at_quad(profile, q, None);
    let (bx, by) = assemble_gradient_coupling(mesh);
    Ok(TimeBlocks {
        mass: assemble_mass(mesh, |_| 1.0),
        source_mass: assemble_mass(mesh, |q| if q.region == Region::Physical { 1.0 } else { 0.0 }),
        m_sigma_sum: assemble_mass(mesh, |q| {
            let c = coef(q);
            c.sigma + c.sigma_hat
        }),
        m_sigma: assemble_mass(mesh, |q| coef(q).sigma),
        m_coupling: assemble_mass(mesh, |q| coef(q).sigma_hat),
        m_lambda1: assemble_tensor_mass::<f64>(mesh, |q| coef(q).lambda1 as Tensor),
        m_lambda2: assemble_tensor_mass::<f64>(mesh, |q| coef(q).lambda2 as Tensor),
        bx,
        by,
    })
}

/// Complex PML Helmholtz system on the full mesh before constraints.
#[derive(Debug, Clone)]
pub struct ComplexSystem {
    /// `\int A grad u . grad v + s^2 alpha beta u v`.
    pub matrix: SparseMatrix<Complex64>,
    /// `s M_phys f_L`.
    pub rhs: Vec<Complex64>,
    /// True on SURFACE and OUTER vertices.
    pub dirichlet_mask: Vec<bool>,
}

impl ComplexSystem {
    pub fn constrained(&self) -> Result<ConstrainedSystem<Complex64>> {
        apply_dirichlet(&self.matrix, &self.rhs, &self.dirichlet_mask)
    }

    /// Solves with homogeneous Dirichlet data; returns the full nodal field.
    pub fn solve(&self) -> Result<Vec<Complex64>> {
        let sys = self.constrained()?;
        let x = LuSolver::new(&sys.matrix)?.solve(&sys.rhs)?;
        Ok(sys.expand(&x))
    }

    /// `ã(v, w)` for full-length nodal vectors, conjugating `w`.
    pub fn form(&self, v: &[Complex64], w: &[Complex64]) -> Complex64 {
        self.matrix.triplets().map(|(i, j, a)| w[i].conj() * a * v[j]).sum()
    }
}

/// Assembles the Laplace-domain PML problem. `f_l` is nodal source data; it is
/// integrated over the physical triangles only.
pub fn assemble_frequency_system(
    mesh: &Mesh,
    profile: &PmlProfile,
    s: ComplexFrequency,
    f_l: &[Complex64],
) -> Result<ComplexSystem> {
    check_radii(mesh, profile)?;
    if f_l.len() != mesh.num_vertices() {
        return Err(Error::DimensionMismatch {
            expected: mesh.num_vertices(),
            got: f_l.len(),
        });
    }
    let sv = s.value();
    let stiff = assemble_stiffness(mesh, |q| pml_matrices_at_quad(profile, q, Some(s)).a);
    let mass = assemble_mass(mesh, |q| {
        let c = pml_matrices_at_quad(profile, q, Some(s));
        sv * sv * c.alpha * c.beta
    });
    let source_mass = assemble_mass(mesh, |q| if q.region == Region::Physical { 1.0 } else { 0.0 });
    let rhs = source_mass.to_complex().matvec(f_l)?.into_iter().map(|v| v * sv).collect();
    Ok(ComplexSystem {
        matrix: stiff.add(&mass)?,
        rhs,
        dirichlet_mask: mesh.boundary_mask(),
    })
}
