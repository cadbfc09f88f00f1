//! P1 element matrices with the three-point edge-midpoint rule.

use super::scalar::Scalar;
use super::sparse::SparseMatrix;
use crate::geometry::{Mesh, Point, Region};

/// A quadrature point handed to coefficient callbacks.
#[derive(Debug, Clone, Copy)]
pub struct QuadPoint {
    pub x: Point,
    pub triangle: usize,
    pub region: Region,
}

/// Basis values at the three edge midpoints: row `q` holds `phi_i(q)`.
const PHI: [[f64; 3]; 3] = [[0.0, 0.5, 0.5], [0.5, 0.0, 0.5], [0.5, 0.5, 0.0]];

pub(crate) struct Element {
    pub vertices: [usize; 3],
    pub area: f64,
    pub grads: [[f64; 2]; 3],
    pub quad: [QuadPoint; 3],
}

pub(crate) fn element(mesh: &Mesh, t: usize) -> Element {
    let tri = mesh.triangles[t];
    let p = mesh.triangle_points(t);
    let area = mesh.triangle_area(t);
    let mut grads = [[0.0; 2]; 3];
    for i in 0..3 {
        let (b, c) = (p[(i + 1) % 3], p[(i + 2) % 3]);
        grads[i] = [(b[1] - c[1]) / (2.0 * area), (c[0] - b[0]) / (2.0 * area)];
    }
    let mid = |a: Point, b: Point| [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
    let region = mesh.regions[t];
    let q = |x| QuadPoint { x, triangle: t, region };
    Element {
        vertices: tri,
        area,
        grads,
        quad: [q(mid(p[1], p[2])), q(mid(p[2], p[0])), q(mid(p[0], p[1]))],
    }
}

/// `M_ij = \int w phi_j phi_i`.
pub fn assemble_mass<T: Scalar>(mesh: &Mesh, weight: impl Fn(&QuadPoint) -> T) -> SparseMatrix<T> {
    let n = mesh.num_vertices();
    let mut trip = Vec::with_capacity(9 * mesh.num_triangles());
    for t in 0..mesh.num_triangles() {
        let e = element(mesh, t);
        let w: [T; 3] = e.quad.map(|q| weight(&q));
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = T::zero();
                for q in 0..3 {
                    acc += w[q] * T::from_real(PHI[q][i] * PHI[q][j]);
                }
                trip.push((e.vertices[i], e.vertices[j], acc * T::from_real(e.area / 3.0)));
            }
        }
    }
    SparseMatrix::from_triplets(n, n, &trip).expect("mesh indices in range")
}

/// Mass matrices for a 2x2 tensor weight acting on a vector field:
/// block `[a][b]` pairs component `b` of the trial with component `a` of the test function.
pub fn assemble_tensor_mass<T: Scalar>(
    mesh: &Mesh,
    tensor: impl Fn(&QuadPoint) -> [[T; 2]; 2],
) -> [[SparseMatrix<T>; 2]; 2] {
    let n = mesh.num_vertices();
    let mut trip: [[Vec<(usize, usize, T)>; 2]; 2] = Default::default();
    for t in 0..mesh.num_triangles() {
        let e = element(mesh, t);
        let w = e.quad.map(|q| tensor(&q));
        for a in 0..2 {
            for b in 0..2 {
                for i in 0..3 {
                    for j in 0..3 {
                        let mut acc = T::zero();
                        for q in 0..3 {
                            acc += w[q][a][b] * T::from_real(PHI[q][i] * PHI[q][j]);
                        }
                        trip[a][b].push((e.vertices[i], e.vertices[j], acc * T::from_real(e.area / 3.0)));
                    }
                }
            }
        }
    }
    trip.map(|row| row.map(|t| SparseMatrix::from_triplets(n, n, &t).expect("mesh indices in range")))
}

/// `K_ij = \int (A grad phi_j) . grad phi_i`.
pub fn assemble_stiffness<T: Scalar>(
    mesh: &Mesh,
    tensor: impl Fn(&QuadPoint) -> [[T; 2]; 2],
) -> SparseMatrix<T> {
    let n = mesh.num_vertices();
    let mut trip = Vec::with_capacity(9 * mesh.num_triangles());
    for t in 0..mesh.num_triangles() {
        let e = element(mesh, t);
        let mut a = [[T::zero(); 2]; 2];
        for q in &e.quad {
            let aq = tensor(q);
            for r in 0..2 {
                for c in 0..2 {
                    a[r][c] += aq[r][c];
                }
            }
        }
        let scale = T::from_real(e.area / 3.0);
        for i in 0..3 {
            let gi = e.grads[i].map(T::from_real);
            for j in 0..3 {
                let gj = e.grads[j].map(T::from_real);
                let v = gi[0] * (a[0][0] * gj[0] + a[0][1] * gj[1]) + gi[1] * (a[1][0] * gj[0] + a[1][1] * gj[1]);
                trip.push((e.vertices[i], e.vertices[j], v * scale));
            }
        }
    }
    SparseMatrix::from_triplets(n, n, &trip).expect("mesh indices in range")
}

pub fn identity_tensor<T: Scalar>(_: &QuadPoint) -> [[T; 2]; 2] {
    [[T::from_real(1.0), T::zero()], [T::zero(), T::from_real(1.0)]]
}

/// `(B_x)_ij = \int phi_j d(phi_i)/dx`, likewise `B_y`.
pub fn assemble_gradient_coupling(mesh: &Mesh) -> (SparseMatrix<f64>, SparseMatrix<f64>) {
    let n = mesh.num_vertices();
    let mut tx = Vec::with_capacity(9 * mesh.num_triangles());
    let mut ty = Vec::with_capacity(9 * mesh.num_triangles());
    for t in 0..mesh.num_triangles() {
        let e = element(mesh, t);
        for i in 0..3 {
            for j in 0..3 {
                tx.push((e.vertices[i], e.vertices[j], e.grads[i][0] * e.area / 3.0));
                ty.push((e.vertices[i], e.vertices[j], e.grads[i][1] * e.area / 3.0));
            }
        }
    }
    (
        SparseMatrix::from_triplets(n, n, &tx).expect("mesh indices in range"),
        SparseMatrix::from_triplets(n, n, &ty).expect("mesh indices in range"),
    )
}

/// `F_i = \int f phi_i`.
pub fn assemble_load<T: Scalar>(mesh: &Mesh, f: impl Fn(&QuadPoint) -> T) -> Vec<T> {
    let mut out = vec![T::zero(); mesh.num_vertices()];
    for t in 0..mesh.num_triangles() {
        let e = element(mesh, t);
        let fq = e.quad.map(|q| f(&q));
        for i in 0..3 {
            let mut acc = T::zero();
            for q in 0..3 {
                acc += fq[q] * T::from_real(PHI[q][i]);
            }
            out[e.vertices[i]] += acc * T::from_real(e.area / 3.0);
        }
    }
    out
}

/// Hermitian form `x^H M y` for a real symmetric matrix.
pub fn inner<T: Scalar>(m: &SparseMatrix<f64>, x: &[T], y: &[T]) -> T {
    let mut acc = T::zero();
    for (i, j, v) in m.triplets() {
        acc += x[i].conjugate() * T::from_real(v) * y[j];
    }
    acc
}

/// `sqrt(x^H M x)` for a real symmetric positive semi-definite `M`.
pub fn mass_norm<T: Scalar>(m: &SparseMatrix<f64>, x: &[T]) -> f64 {
    inner(m, x, x).to_complex().re.max(0.0).sqrt()
}
