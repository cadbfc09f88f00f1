use super::scalar::{norm2, Scalar};
use super::sparse::SparseMatrix;
use crate::error::{Error, Result};
use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::Lu;
use faer::Mat;

/// Relative residual accepted by [`LuSolver::solve`].
pub const RESIDUAL_TOL: f64 = 1e-9;

/// Sparse LU factorization, computed once and reused for many right-hand sides.
pub struct LuSolver<T: Scalar> {
    matrix: SparseMatrix<T>,
    lu: Lu<usize, T>,
}

impl<T: Scalar> std::fmt::Debug for LuSolver<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LuSolver")
            .field("n", &self.matrix.nrows())
            .field("nnz", &self.matrix.nnz())
            .finish()
    }
}

impl<T: Scalar> LuSolver<T> {
    pub fn new(matrix: &SparseMatrix<T>) -> Result<Self> {
        let n = matrix.nrows();
        if matrix.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: matrix.ncols() });
        }
        if let Some(v) = matrix.values().iter().find(|v| !v.finite()) {
            return Err(Error::Singular(format!("matrix has a non-finite entry {v:?}")));
        }
        let lu = matrix
            .to_faer()?
            .sp_lu()
            .map_err(|e| Error::Singular(format!("LU factorization of {n}x{n} matrix failed: {e:?}")))?;
        Ok(LuSolver { matrix: matrix.clone(), lu })
    }

    pub fn size(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &SparseMatrix<T> {
        &self.matrix
    }

    /// Solves without checking the residual.
    pub fn solve_unchecked(&self, b: &[T]) -> Result<Vec<T>> {
        let n = self.size();
        if b.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: b.len() });
        }
        let mut x = Mat::from_fn(n, 1, |i, _| b[i]);
        self.lu.solve_in_place(x.as_mut());
        Ok((0..n).map(|i| x[(i, 0)]).collect())
    }

    /// Solves and verifies `|A x - b| <= RESIDUAL_TOL |b|`, refining once if needed.
    pub fn solve(&self, b: &[T]) -> Result<Vec<T>> {
        let mut x = self.solve_unchecked(b)?;
        let bnorm = norm2(b);
        let mut rel = self.residual(&x, b)? / bnorm.max(f64::MIN_POSITIVE);
        if rel > RESIDUAL_TOL && rel.is_finite() {
            let ax = self.matrix.matvec(&x)?;
            let r: Vec<T> = b.iter().zip(&ax).map(|(&bi, &ai)| bi - ai).collect();
            let dx = self.solve_unchecked(&r)?;
            for (xi, d) in x.iter_mut().zip(dx) {
                *xi += d;
            }
            rel = self.residual(&x, b)? / bnorm.max(f64::MIN_POSITIVE);
        }
        if bnorm == 0.0 {
            rel = norm2(&x);
        }
        if !(rel <= RESIDUAL_TOL) {
            return Err(Error::Singular(format!(
                "relative residual {rel:e} after solve of size {} (matrix numerically singular)",
                self.size()
            )));
        }
        Ok(x)
    }

    fn residual(&self, x: &[T], b: &[T]) -> Result<f64> {
        let ax = self.matrix.matvec(x)?;
        Ok(ax.iter().zip(b).map(|(&a, &bi)| (a - bi).modulus().powi(2)).sum::<f64>().sqrt())
    }
}

/// One-shot factor-and-solve.
pub fn solve<T: Scalar>(matrix: &SparseMatrix<T>, b: &[T]) -> Result<Vec<T>> {
    LuSolver::new(matrix)?.solve(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn small_systems() {
        let id = SparseMatrix::<f64>::identity(3);
        assert_eq!(solve(&id, &[1.0, 2.0, 3.0]).unwrap(), vec![1.0, 2.0, 3.0]);
        let a = SparseMatrix::from_triplets(2, 2, &[(0, 0, 2.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 2.0)]).unwrap();
        let x = solve(&a, &[1.0, 1.0]).unwrap();
        assert!((x[0] - 1.0 / 3.0).abs() < 1e-15 && (x[1] - 1.0 / 3.0).abs() < 1e-15);
        let z = Complex64::new(1.0, 1.0);
        let c = SparseMatrix::diagonal(&[z; 3]);
        let b = [Complex64::new(2.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(-1.0, 3.0)];
        let x = solve(&c, &b).unwrap();
        for (xi, bi) in x.iter().zip(&b) {
            assert!((xi - bi / z).norm() < 1e-15);
        }
    }

    #[test]
    fn singular_is_reported() {
        let a = SparseMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 1.0)]).unwrap();
        assert!(matches!(solve(&a, &[1.0, 2.0]), Err(Error::Singular(_))));
        let z = SparseMatrix::<f64>::zeros(2, 2);
        assert!(matches!(solve(&z, &[1.0, 0.0]), Err(Error::Singular(_))));
    }
}
