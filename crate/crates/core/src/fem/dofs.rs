use super::scalar::Scalar;
use super::sparse::SparseMatrix;
use crate::error::{Error, Result};
use crate::geometry::Mesh;

/// Unknown fields of the first-order PML system, in storage order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    U,
    Px,
    Py,
    UStar,
    PStarX,
    PStarY,
}

impl Field {
    pub const ALL: [Field; 6] = [Field::U, Field::Px, Field::Py, Field::UStar, Field::PStarX, Field::PStarY];
}

/// Global numbering of the six P1 scalar fields. `u` is numbered over its
/// free vertices only; every other field carries one unknown per vertex.
#[derive(Debug, Clone)]
pub struct DofMap {
    pub num_vertices: usize,
    pub dirichlet_mask: Vec<bool>,
    pub free_u: Vec<usize>,
    u_index: Vec<Option<usize>>,
}

impl DofMap {
    /// Dirichlet on every SURFACE and OUTER vertex.
    pub fn new(mesh: &Mesh) -> Self {
        Self::with_mask(mesh.boundary_mask())
    }

    pub fn with_mask(dirichlet_mask: Vec<bool>) -> Self {
        let mut u_index = vec![None; dirichlet_mask.len()];
        let mut free_u = Vec::new();
        for (v, &fixed) in dirichlet_mask.iter().enumerate() {
            if !fixed {
                u_index[v] = Some(free_u.len());
                free_u.push(v);
            }
        }
        DofMap {
            num_vertices: dirichlet_mask.len(),
            dirichlet_mask,
            free_u,
            u_index,
        }
    }

    pub fn num_free_u(&self) -> usize {
        self.free_u.len()
    }

    pub fn total(&self) -> usize {
        self.free_u.len() + 5 * self.num_vertices
    }

    pub fn offset(&self, field: Field) -> usize {
        let nu = self.free_u.len();
        let n = self.num_vertices;
        match field {
            Field::U => 0,
            Field::Px => nu,
            Field::Py => nu + n,
            Field::UStar => nu + 2 * n,
            Field::PStarX => nu + 3 * n,
            Field::PStarY => nu + 4 * n,
        }
    }

    pub fn index(&self, field: Field, vertex: usize) -> Option<usize> {
        match field {
            Field::U => self.u_index[vertex],
            f => Some(self.offset(f) + vertex),
        }
    }

    /// Scatters a global vector into per-vertex arrays of one field (zero on constrained `u`).
    pub fn extract<T: Scalar>(&self, x: &[T], field: Field) -> Vec<T> {
        (0..self.num_vertices)
            .map(|v| self.index(field, v).map_or(T::zero(), |k| x[k]))
            .collect()
    }
}

/// A system with constrained unknowns eliminated.
#[derive(Debug, Clone)]
pub struct ConstrainedSystem<T> {
    pub matrix: SparseMatrix<T>,
    pub rhs: Vec<T>,
    pub free: Vec<usize>,
    pub full_size: usize,
}

impl<T: Scalar> ConstrainedSystem<T> {
    /// Lifts a reduced solution back to full size with zeros on constrained entries.
    pub fn expand(&self, x: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.full_size];
        for (k, &i) in self.free.iter().enumerate() {
            out[i] = x[k];
        }
        out
    }
}

/// Homogeneous Dirichlet conditions by symmetric removal of masked rows and columns.
pub fn apply_dirichlet<T: Scalar>(
    matrix: &SparseMatrix<T>,
    rhs: &[T],
    mask: &[bool],
) -> Result<ConstrainedSystem<T>> {
    let n = matrix.nrows();
    if matrix.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: matrix.ncols() });
    }
    if mask.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: mask.len() });
    }
    if rhs.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: rhs.len() });
    }
    let free: Vec<usize> = (0..n).filter(|&i| !mask[i]).collect();
    Ok(ConstrainedSystem {
        matrix: matrix.select(&free, &free),
        rhs: free.iter().map(|&i| rhs[i]).collect(),
        free,
        full_size: n,
    })
}
