use super::scalar::Scalar;
use crate::error::{Error, Result};
use faer::sparse::{SparseColMat, Triplet};
use num_complex::Complex64;
use std::io::Write;

/// Compressed sparse row matrix. Duplicate triplets are summed; the pattern
/// keeps every assembled position even where contributions cancel.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix<T> {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<T>,
}

impl<T: Scalar> SparseMatrix<T> {
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, T)]) -> Result<Self> {
        if let Some(&(i, j, _)) = triplets.iter().find(|t| t.0 >= nrows || t.1 >= ncols) {
            return Err(Error::InvalidInput(format!(
                "triplet ({i}, {j}) outside a {nrows}x{ncols} matrix"
            )));
        }
        let mut counts = vec![0usize; nrows + 1];
        for t in triplets {
            counts[t.0 + 1] += 1;
        }
        for i in 0..nrows {
            counts[i + 1] += counts[i];
        }
        let mut order = vec![0usize; triplets.len()];
        let mut next = counts.clone();
        for (k, t) in triplets.iter().enumerate() {
            order[next[t.0]] = k;
            next[t.0] += 1;
        }
        let mut row_ptr = Vec::with_capacity(nrows + 1);
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        row_ptr.push(0);
        for i in 0..nrows {
            let slice = &mut order[counts[i]..counts[i + 1]];
            // stable sort keeps the summation order of duplicates fixed
            slice.sort_by_key(|&k| triplets[k].1);
            let mut last = usize::MAX;
            for &k in slice.iter() {
                let (_, j, v) = triplets[k];
                if j == last {
                    *values.last_mut().unwrap() += v;
                } else {
                    col_idx.push(j);
                    values.push(v);
                    last = j;
                }
            }
            row_ptr.push(col_idx.len());
        }
        Ok(SparseMatrix {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        })
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        SparseMatrix {
            nrows,
            ncols,
            row_ptr: vec![0; nrows + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![T::from_real(1.0); n])
    }

    pub fn diagonal(d: &[T]) -> Self {
        SparseMatrix {
            nrows: d.len(),
            ncols: d.len(),
            row_ptr: (0..=d.len()).collect(),
            col_idx: (0..d.len()).collect(),
            values: d.to_vec(),
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// `(column, value)` pairs of row `i`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[r.clone()].iter().copied().zip(self.values[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.col_idx[r.clone()].binary_search(&j) {
            Ok(k) => self.values[r.start + k],
            Err(_) => T::zero(),
        }
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.nrows).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn matvec(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.ncols {
            return Err(Error::DimensionMismatch {
                expected: self.ncols,
                got: x.len(),
            });
        }
        Ok((0..self.nrows)
            .map(|i| {
                let mut acc = T::zero();
                for (j, v) in self.row(i) {
                    acc += v * x[j];
                }
                acc
            })
            .collect())
    }

    pub fn transpose(&self) -> Self {
        let t: Vec<_> = self.triplets().map(|(i, j, v)| (j, i, v)).collect();
        Self::from_triplets(self.ncols, self.nrows, &t).expect("indices in range")
    }

    pub fn scale(&self, a: T) -> Self {
        let mut out = self.clone();
        for v in &mut out.values {
            *v *= a;
        }
        out
    }

    /// `self + other`, patterns merged.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if (self.nrows, self.ncols) != (other.nrows, other.ncols) {
            return Err(Error::DimensionMismatch {
                expected: self.nrows,
                got: other.nrows,
            });
        }
        let t: Vec<_> = self.triplets().chain(other.triplets()).collect();
        Self::from_triplets(self.nrows, self.ncols, &t)
    }

    /// Submatrix with the given row and column index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut col_map = vec![usize::MAX; self.ncols];
        for (k, &j) in cols.iter().enumerate() {
            col_map[j] = k;
        }
        let t: Vec<_> = rows
            .iter()
            .enumerate()
            .flat_map(|(ri, &i)| {
                let col_map = &col_map;
                self.row(i)
                    .filter(move |&(j, _)| col_map[j] != usize::MAX)
                    .map(move |(j, v)| (ri, col_map[j], v))
            })
            .collect();
        Self::from_triplets(rows.len(), cols.len(), &t).expect("indices in range")
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.modulus()).fold(0.0, f64::max)
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.nrows == self.ncols
            && self.triplets().all(|(i, j, v)| (v - self.get(j, i)).modulus() <= tol)
    }

    pub fn to_faer(&self) -> Result<SparseColMat<usize, T>> {
        let t: Vec<_> = self.triplets().map(|(i, j, v)| Triplet::new(i, j, v)).collect();
        SparseColMat::try_new_from_triplets(self.nrows, self.ncols, &t)
            .map_err(|e| Error::InvalidInput(format!("sparse conversion failed: {e:?}")))
    }

    /// Writes `row col value` lines (0-based), preceded by a `rows cols nnz` header.
    pub fn write_coo<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{} {} {}", self.nrows, self.ncols, self.nnz())?;
        for (i, j, v) in self.triplets() {
            let z = v.to_complex();
            if z.im == 0.0 {
                writeln!(w, "{i} {j} {}", z.re)?;
            } else {
                writeln!(w, "{i} {j} {} {}", z.re, z.im)?;
            }
        }
        Ok(())
    }
}

impl SparseMatrix<f64> {
    pub fn to_complex(&self) -> SparseMatrix<Complex64> {
        SparseMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            row_ptr: self.row_ptr.clone(),
            col_idx: self.col_idx.clone(),
            values: self.values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        }
    }
}

/// Triplet accumulator for block systems.
#[derive(Debug, Clone, Default)]
pub struct BlockBuilder<T> {
    pub triplets: Vec<(usize, usize, T)>,
}

impl<T: Scalar> BlockBuilder<T> {
    pub fn new() -> Self {
        BlockBuilder { triplets: Vec::new() }
    }

    /// Adds `scale * block` at offset `(row0, col0)`.
    pub fn add(&mut self, block: &SparseMatrix<T>, row0: usize, col0: usize, scale: T) {
        self.triplets
            .extend(block.triplets().map(|(i, j, v)| (row0 + i, col0 + j, v * scale)));
    }

    pub fn build(&self, nrows: usize, ncols: usize) -> Result<SparseMatrix<T>> {
        SparseMatrix::from_triplets(nrows, ncols, &self.triplets)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_are_summed() {
        let m = SparseMatrix::from_triplets(2, 3, &[(0, 2, 1.0), (1, 0, 2.0), (0, 2, 3.0), (0, 0, -1.0)]).unwrap();
        assert_eq!(m.nnz(), 3);
        assert_eq!(m.get(0, 2), 4.0);
        assert_eq!(m.get(1, 1), 0.0);
        assert_eq!(m.matvec(&[1.0, 1.0, 1.0]).unwrap(), vec![3.0, 2.0]);
        assert_eq!(m.transpose().get(2, 0), 4.0);
        assert!(SparseMatrix::from_triplets(2, 2, &[(2, 0, 1.0)]).is_err());
    }

    #[test]
    fn select_and_add() {
        let m = SparseMatrix::from_triplets(3, 3, &[(0, 0, 1.0), (1, 1, 2.0), (2, 2, 3.0), (0, 2, 5.0)]).unwrap();
        let s = m.select(&[0, 2], &[0, 2]);
        assert_eq!(s.get(0, 1), 5.0);
        assert_eq!(s.get(1, 1), 3.0);
        let sum = m.add(&SparseMatrix::identity(3)).unwrap();
        assert_eq!(sum.get(1, 1), 3.0);
        assert!(!m.is_symmetric(0.0));
    }

    #[test]
    fn coo_export() {
        let m = SparseMatrix::from_triplets(2, 2, &[(0, 1, 0.5), (1, 0, 2.0)]).unwrap();
        let mut buf = Vec::new();
        m.write_coo(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "2 2 2\n0 1 0.5\n1 0 2\n");
    }
}
