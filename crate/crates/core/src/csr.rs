use alloc::vec;
use alloc::vec::Vec;

use crate::matrix::Matrix;

/// Compressed sparse row matrix. Column indices within a row are ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<u32>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Panics if the arrays do not describe a valid CSR layout.
    pub fn new(rows: usize, cols: usize, row_ptr: Vec<usize>, col_idx: Vec<u32>, values: Vec<f64>) -> Self {
        assert_eq!(row_ptr.len(), rows + 1, "row_ptr length");
        assert_eq!(col_idx.len(), values.len(), "col_idx/values length");
        assert_eq!(*row_ptr.last().unwrap_or(&0), values.len(), "row_ptr tail");
        debug_assert!(col_idx.iter().all(|&c| (c as usize) < cols));
        Self { rows, cols, row_ptr, col_idx, values }
    }

    /// Keeps only the nonzero entries of a dense row-major buffer.
    pub fn from_dense(rows: usize, cols: usize, dense: &[f64]) -> Self {
        assert_eq!(dense.len(), rows * cols);
        let mut row_ptr = Vec::with_capacity(rows + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for r in 0..rows {
            for (c, &v) in dense[r * cols..(r + 1) * cols].iter().enumerate() {
                if v != 0.0 {
                    col_idx.push(c as u32);
                    values.push(v);
                }
            }
            row_ptr.push(values.len());
        }
        Self { rows, cols, row_ptr, col_idx, values }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[u32] {
        &self.col_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Range of storage positions holding row `r`.
    #[inline]
    pub fn row_range(&self, r: usize) -> core::ops::Range<usize> {
        self.row_ptr[r]..self.row_ptr[r + 1]
    }

    /// Entry `(r, c)`, zero when not stored.
    pub fn get(&self, r: usize, c: usize) -> f64 {
        let range = self.row_range(r);
        match self.col_idx[range.clone()].binary_search(&(c as u32)) {
            Ok(k) => self.values[range.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn to_dense(&self) -> Matrix {
        let mut out = Matrix::zeros(self.rows, self.cols);
        for r in 0..self.rows {
            for k in self.row_range(r) {
                out.set(r, self.col_idx[k] as usize, self.values[k]);
            }
        }
        out
    }

    /// `self · rhs` using `values` in place of the stored values.
    pub fn mul_dense_with(&self, values: &[f64], rhs: &Matrix) -> Matrix {
        assert_eq!(values.len(), self.values.len());
        assert_eq!(self.cols, rhs.rows(), "spmm inner dimension");
        let mut out = Matrix::zeros(self.rows, rhs.cols());
        for r in 0..self.rows {
            let o = out.row_mut(r);
            for k in self.row_range(r) {
                let a = values[k];
                if a == 0.0 {
                    continue;
                }
                for (dst, &b) in o.iter_mut().zip(rhs.row(self.col_idx[k] as usize)) {
                    *dst += a * b;
                }
            }
        }
        out
    }

    pub fn mul_dense(&self, rhs: &Matrix) -> Matrix {
        self.mul_dense_with(&self.values, rhs)
    }

    /// `selfᵀ · rhs` using `values` in place of the stored values.
    pub fn t_mul_dense_with(&self, values: &[f64], rhs: &Matrix) -> Matrix {
        assert_eq!(values.len(), self.values.len());
        assert_eq!(self.rows, rhs.rows(), "spmm_t row count");
        let mut out = Matrix::zeros(self.cols, rhs.cols());
        for r in 0..self.rows {
            let src = rhs.row(r);
            for k in self.row_range(r) {
                let a = values[k];
                if a == 0.0 {
                    continue;
                }
                for (dst, &b) in out.row_mut(self.col_idx[k] as usize).iter_mut().zip(src) {
                    *dst += a * b;
                }
            }
        }
        out
    }

    pub fn t_mul_dense(&self, rhs: &Matrix) -> Matrix {
        self.t_mul_dense_with(&self.values, rhs)
    }

    /// Scales every row to unit L1 norm; all-zero rows stay zero.
    pub fn row_normalized(&self) -> Self {
        let mut values = vec![0.0; self.values.len()];
        for r in 0..self.rows {
            let range = self.row_range(r);
            let sum: f64 = self.values[range.clone()].iter().map(|v| v.abs()).sum();
            if sum > 0.0 {
                for k in range {
                    values[k] = self.values[k] / sum;
                }
            }
        }
        Self { values, ..self.clone() }
    }
}
