//! Minimal dense and CSR matrices used by the classifiers.
//!
//! Everything is `f64` and row-major. Only the handful of products the
//! training code needs are provided.

use serde::{Deserialize, Serialize};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dense {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Dense {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "dense buffer length");
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend_from_slice(r);
        }
        Self {
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// `self · rhs`
    pub fn matmul(&self, rhs: &Dense) -> Dense {
        assert_eq!(self.cols, rhs.rows, "matmul inner dimension");
        let mut out = Dense::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for (p, &a) in self.row(i).iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                axpy(a, rhs.row(p), out_row);
            }
        }
        out
    }

    /// `selfᵀ · rhs`
    pub fn t_matmul(&self, rhs: &Dense) -> Dense {
        assert_eq!(self.rows, rhs.rows, "t_matmul row dimension");
        let mut out = Dense::zeros(self.cols, rhs.cols);
        for i in 0..self.rows {
            let r = rhs.row(i);
            for (p, &a) in self.row(i).iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                axpy(a, r, out.row_mut(p));
            }
        }
        out
    }

    /// `self · rhsᵀ`
    pub fn matmul_t(&self, rhs: &Dense) -> Dense {
        assert_eq!(self.cols, rhs.cols, "matmul_t inner dimension");
        // row-wise axpy over the transposed operand vectorizes better than
        // short dot products
        self.matmul(&rhs.transpose())
    }

    pub fn transpose(&self) -> Dense {
        let mut out = Dense::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for (j, &v) in self.row(i).iter().enumerate() {
                out.data[j * self.rows + i] = v;
            }
        }
        out
    }

    /// Adds `bias` to every row.
    pub fn add_row_vector(&mut self, bias: &[f64]) {
        assert_eq!(bias.len(), self.cols);
        for r in self.data.chunks_exact_mut(self.cols.max(1)) {
            for (x, b) in r.iter_mut().zip(bias) {
                *x += b;
            }
        }
    }

    /// Column sums.
    pub fn column_sums(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        for r in self.data.chunks_exact(self.cols.max(1)) {
            for (o, x) in out.iter_mut().zip(r) {
                *o += x;
            }
        }
        out
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum()
    }
}

#[inline]
pub(crate) fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// Compressed sparse row matrix with real values.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    rows: usize,
    cols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds from raw parts. Column indices within a row must be strictly increasing.
    pub fn from_parts(
        rows: usize,
        cols: usize,
        indptr: Vec<usize>,
        indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Self {
        assert_eq!(indptr.len(), rows + 1);
        assert_eq!(indices.len(), values.len());
        assert_eq!(*indptr.last().unwrap(), indices.len());
        debug_assert!(indices.iter().all(|&c| c < cols));
        Self {
            rows,
            cols,
            indptr,
            indices,
            values,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            rows: n,
            cols: n,
            indptr: (0..=n).collect(),
            indices: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    pub fn from_dense(m: &Dense) -> Self {
        let mut indptr = Vec::with_capacity(m.rows() + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        indptr.push(0);
        for r in 0..m.rows() {
            for (c, &v) in m.row(r).iter().enumerate() {
                if v != 0.0 {
                    indices.push(c);
                    values.push(v);
                }
            }
            indptr.push(indices.len());
        }
        Self::from_parts(m.rows(), m.cols(), indptr, indices, values)
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

    pub fn indptr(&self) -> &[usize] {
        &self.indptr
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column indices and values of one row.
    #[inline]
    pub fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let span = self.indptr[r]..self.indptr[r + 1];
        (&self.indices[span.clone()], &self.values[span])
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let (idx, val) = self.row(r);
        idx.binary_search(&c).map_or(0.0, |p| val[p])
    }

    pub fn to_dense(&self) -> Dense {
        let mut out = Dense::zeros(self.rows, self.cols);
        for r in 0..self.rows {
            let (idx, val) = self.row(r);
            for (&c, &v) in idx.iter().zip(val) {
                out.set(r, c, v);
            }
        }
        out
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.rows).map(|r| self.row(r).1.iter().sum()).collect()
    }

    /// `self · rhs` with a dense right-hand side.
    pub fn matmul_dense(&self, rhs: &Dense) -> Dense {
        assert_eq!(self.cols, rhs.rows(), "spmm inner dimension");
        let mut out = Dense::zeros(self.rows, rhs.cols());
        for r in 0..self.rows {
            let (idx, val) = self.row(r);
            let out_row = out.row_mut(r);
            for (&c, &v) in idx.iter().zip(val) {
                axpy(v, rhs.row(c), out_row);
            }
        }
        out
    }

    /// `selfᵀ · rhs` with a dense right-hand side.
    pub fn t_matmul_dense(&self, rhs: &Dense) -> Dense {
        assert_eq!(self.rows, rhs.rows(), "spmm_t row dimension");
        let mut out = Dense::zeros(self.cols, rhs.cols());
        for r in 0..self.rows {
            let (idx, val) = self.row(r);
            let src = rhs.row(r);
            for (&c, &v) in idx.iter().zip(val) {
                axpy(v, src, out.row_mut(c));
            }
        }
        out
    }

    /// Sparse-sparse product (row-wise accumulation with a dense scratch row).
    pub fn matmul_sparse(&self, rhs: &CsrMatrix) -> CsrMatrix {
        assert_eq!(self.cols, rhs.rows, "spgemm inner dimension");
        let mut acc = vec![0.0; rhs.cols];
        let mut touched = vec![false; rhs.cols];
        let mut pattern: Vec<usize> = Vec::new();
        let mut indptr = Vec::with_capacity(self.rows + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        indptr.push(0);
        for r in 0..self.rows {
            let (idx, val) = self.row(r);
            for (&k, &a) in idx.iter().zip(val) {
                let (ridx, rval) = rhs.row(k);
                for (&c, &b) in ridx.iter().zip(rval) {
                    if !touched[c] {
                        touched[c] = true;
                        pattern.push(c);
                    }
                    acc[c] += a * b;
                }
            }
            pattern.sort_unstable();
            for &c in &pattern {
                let v = acc[c];
                if v != 0.0 {
                    indices.push(c);
                    values.push(v);
                }
                acc[c] = 0.0;
                touched[c] = false;
            }
            pattern.clear();
            indptr.push(indices.len());
        }
        CsrMatrix::from_parts(self.rows, rhs.cols, indptr, indices, values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Dense {
        Dense::from_rows(&[vec![1.0, 0.0, 2.0], vec![0.0, 3.0, 0.0]])
    }

    #[test]
    fn dense_products_agree_with_hand_values() {
        let a = sample();
        let b = Dense::from_rows(&[vec![1.0, 1.0], vec![0.0, 2.0], vec![1.0, 0.0]]);
        assert_eq!(a.matmul(&b), Dense::from_rows(&[vec![3.0, 1.0], vec![0.0, 6.0]]));
        let at_a = a.t_matmul(&a);
        assert_eq!(at_a.get(0, 2), 2.0);
        assert_eq!(at_a.get(1, 1), 9.0);
        let a_at = a.matmul_t(&a);
        assert_eq!(a_at, Dense::from_rows(&[vec![5.0, 0.0], vec![0.0, 9.0]]));
    }

    #[test]
    fn sparse_products_match_dense() {
        let a = sample();
        let s = CsrMatrix::from_dense(&a);
        assert_eq!(s.nnz(), 3);
        let b = Dense::from_rows(&[vec![1.0, 1.0], vec![0.0, 2.0], vec![1.0, 0.0]]);
        assert_eq!(s.matmul_dense(&b), a.matmul(&b));
        let c = Dense::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]);
        assert_eq!(s.t_matmul_dense(&c), a.t_matmul(&c));
        let sb = CsrMatrix::from_dense(&b);
        assert_eq!(s.matmul_sparse(&sb).to_dense(), a.matmul(&b));
    }

    #[test]
    fn identity_is_neutral() {
        let s = CsrMatrix::from_dense(&sample());
        assert_eq!(CsrMatrix::identity(2).matmul_sparse(&s), s);
    }
}
