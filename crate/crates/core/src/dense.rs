//! Column-major dense matrices.

use std::fmt;
use std::ops::{Index, IndexMut, Range};

use crate::error::{check_dim, Error, Result};
use crate::mem;

/// Dense `n_rows × n_cols` matrix stored column by column.
pub struct DenseMatrix {
    n_rows: usize,
    n_cols: usize,
    values: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self::from_vec_unchecked(n_rows, n_cols, vec![0.0; n_rows * n_cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Builds a matrix from column-major values.
    pub fn from_col_major(n_rows: usize, n_cols: usize, values: Vec<f64>) -> Result<Self> {
        check_dim("DenseMatrix::from_col_major", n_rows * n_cols, values.len())?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("DenseMatrix::from_col_major"));
        }
        Ok(Self::from_vec_unchecked(n_rows, n_cols, values))
    }

    /// Builds a matrix from a slice of rows. Handy in tests.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, |r| r.len());
        let mut m = Self::zeros(n_rows, n_cols);
        for (i, row) in rows.iter().enumerate() {
            check_dim("DenseMatrix::from_rows", n_cols, row.len())?;
            for (j, &v) in row.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        if !m.is_finite() {
            return Err(Error::NonFinite("DenseMatrix::from_rows"));
        }
        Ok(m)
    }

    pub fn from_fn(n_rows: usize, n_cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut values = Vec::with_capacity(n_rows * n_cols);
        for j in 0..n_cols {
            for i in 0..n_rows {
                values.push(f(i, j));
            }
        }
        Self::from_vec_unchecked(n_rows, n_cols, values)
    }

    pub fn diag(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub(crate) fn from_vec_unchecked(n_rows: usize, n_cols: usize, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), n_rows * n_cols);
        mem::track_alloc(values.len());
        DenseMatrix {
            n_rows,
            n_cols,
            values,
        }
    }

    #[inline]
    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    #[inline]
    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.n_rows, self.n_cols)
    }

    /// Column-major storage.
    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.values
    }

    #[inline]
    pub fn col(&self, j: usize) -> &[f64] {
        &self.values[j * self.n_rows..(j + 1) * self.n_rows]
    }

    #[inline]
    pub fn col_mut(&mut self, j: usize) -> &mut [f64] {
        let m = self.n_rows;
        &mut self.values[j * m..(j + 1) * m]
    }

    /// Two distinct columns borrowed mutably at once.
    pub fn col_pair_mut(&mut self, a: usize, b: usize) -> (&mut [f64], &mut [f64]) {
        assert!(a != b && a < self.n_cols && b < self.n_cols);
        let m = self.n_rows;
        if a < b {
            let (lo, hi) = self.values.split_at_mut(b * m);
            (&mut lo[a * m..(a + 1) * m], &mut hi[..m])
        } else {
            let (lo, hi) = self.values.split_at_mut(a * m);
            (&mut hi[..m], &mut lo[b * m..(b + 1) * m])
        }
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// Zeroes entries smaller than `ε²` times the largest magnitude.
    ///
    /// Repeated shrinkage decays entries outside the dominant subspace
    /// geometrically; left alone they reach the subnormal range, where
    /// arithmetic is very slow. Entries this small are far below the
    /// rounding error of the matrix itself.
    pub fn flush_negligible(&mut self) {
        let max = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let cutoff = f64::EPSILON * f64::EPSILON * max;
        for v in &mut self.values {
            if v.abs() < cutoff {
                *v = 0.0;
            }
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        norm2(&self.values)
    }

    pub fn transpose(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.n_cols, self.n_rows, |i, j| self[(j, i)])
    }

    /// Copy of the columns in `range`.
    pub fn columns(&self, range: Range<usize>) -> DenseMatrix {
        assert!(range.end <= self.n_cols);
        let m = self.n_rows;
        let values = self.values[range.start * m..range.end * m].to_vec();
        DenseMatrix::from_vec_unchecked(m, range.len(), values)
    }

    /// Drops every column from `k` on.
    pub fn truncate_cols(&mut self, k: usize) {
        if k >= self.n_cols {
            return;
        }
        let before = self.values.len();
        self.values.truncate(k * self.n_rows);
        self.values.shrink_to_fit();
        mem::track_free(before - self.values.len());
        self.n_cols = k;
    }

    /// `[a, b]`.
    pub fn hconcat(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
        check_dim("DenseMatrix::hconcat", a.n_rows, b.n_rows)?;
        let mut values = Vec::with_capacity(a.values.len() + b.values.len());
        values.extend_from_slice(&a.values);
        values.extend_from_slice(&b.values);
        Ok(DenseMatrix::from_vec_unchecked(
            a.n_rows,
            a.n_cols + b.n_cols,
            values,
        ))
    }

    /// Stacks `a` on top of `b`.
    pub fn vconcat(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
        check_dim("DenseMatrix::vconcat", a.n_cols, b.n_cols)?;
        let rows = a.n_rows + b.n_rows;
        let mut values = Vec::with_capacity(rows * a.n_cols);
        for j in 0..a.n_cols {
            values.extend_from_slice(a.col(j));
            values.extend_from_slice(b.col(j));
        }
        Ok(DenseMatrix::from_vec_unchecked(rows, a.n_cols, values))
    }

    /// Rows `range` of every column.
    pub fn row_block(&self, range: Range<usize>) -> DenseMatrix {
        assert!(range.end <= self.n_rows);
        let mut values = Vec::with_capacity(range.len() * self.n_cols);
        for j in 0..self.n_cols {
            values.extend_from_slice(&self.col(j)[range.clone()]);
        }
        DenseMatrix::from_vec_unchecked(range.len(), self.n_cols, values)
    }

    pub fn scale_col(&mut self, j: usize, s: f64) {
        for v in self.col_mut(j) {
            *v *= s;
        }
    }

    /// `self · other`.
    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        check_dim("DenseMatrix::matmul", self.n_cols, other.n_rows)?;
        let mut out = DenseMatrix::zeros(self.n_rows, other.n_cols);
        for j in 0..other.n_cols {
            let bj = other.col(j);
            let oj = out.col_mut(j);
            for (k, &b) in bj.iter().enumerate() {
                if b != 0.0 {
                    axpy(b, self.col(k), oj);
                }
            }
        }
        Ok(out)
    }

    /// `selfᵀ · other`.
    pub fn matmul_tn(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        check_dim("DenseMatrix::matmul_tn", self.n_rows, other.n_rows)?;
        let mut out = DenseMatrix::zeros(self.n_cols, other.n_cols);
        for j in 0..other.n_cols {
            let bj = other.col(j);
            for i in 0..self.n_cols {
                out[(i, j)] = dot(self.col(i), bj);
            }
        }
        Ok(out)
    }

    /// `self · otherᵀ`.
    pub fn matmul_nt(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        check_dim("DenseMatrix::matmul_nt", self.n_cols, other.n_cols)?;
        let mut out = DenseMatrix::zeros(self.n_rows, other.n_rows);
        for k in 0..self.n_cols {
            let ak = self.col(k);
            let bk = other.col(k);
            for (j, &b) in bk.iter().enumerate() {
                if b != 0.0 {
                    axpy(b, ak, out.col_mut(j));
                }
            }
        }
        Ok(out)
    }

    /// `self · v`.
    pub fn matvec(&self, v: &[f64]) -> Result<Vec<f64>> {
        check_dim("DenseMatrix::matvec", self.n_cols, v.len())?;
        let mut out = vec![0.0; self.n_rows];
        for (j, &x) in v.iter().enumerate() {
            if x != 0.0 {
                axpy(x, self.col(j), &mut out);
            }
        }
        Ok(out)
    }

    /// `selfᵀ · v`.
    pub fn matvec_t(&self, v: &[f64]) -> Result<Vec<f64>> {
        check_dim("DenseMatrix::matvec_t", self.n_rows, v.len())?;
        Ok((0..self.n_cols).map(|j| dot(self.col(j), v)).collect())
    }

    pub fn sub(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        check_dim("DenseMatrix::sub", self.n_rows, other.n_rows)?;
        check_dim("DenseMatrix::sub", self.n_cols, other.n_cols)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        Ok(DenseMatrix::from_vec_unchecked(
            self.n_rows,
            self.n_cols,
            values,
        ))
    }

    /// Largest absolute entry difference.
    pub fn max_abs_diff(&self, other: &DenseMatrix) -> f64 {
        assert_eq!(self.shape(), other.shape());
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl Clone for DenseMatrix {
    fn clone(&self) -> Self {
        DenseMatrix::from_vec_unchecked(self.n_rows, self.n_cols, self.values.clone())
    }
}

impl Drop for DenseMatrix {
    fn drop(&mut self) {
        mem::track_free(self.values.len());
    }
}

impl PartialEq for DenseMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.shape() == other.shape() && self.values == other.values
    }
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix {}x{} [", self.n_rows, self.n_cols)?;
        for i in 0..self.n_rows.min(8) {
            let row: Vec<String> = (0..self.n_cols.min(8))
                .map(|j| format!("{:10.4e}", self[(i, j)]))
                .collect();
            writeln!(f, "  {}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.n_rows && j < self.n_cols);
        &self.values[j * self.n_rows + i]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.n_rows && j < self.n_cols);
        &mut self.values[j * self.n_rows + i]
    }
}

/// Row-major block with few columns; the layout the sparse-times-dense
/// kernels want, since each stored nonzero touches one contiguous row.
pub(crate) struct RowBlock {
    pub(crate) n_rows: usize,
    pub(crate) n_cols: usize,
    pub(crate) data: Vec<f64>,
}

impl RowBlock {
    pub(crate) fn zeros(n_rows: usize, n_cols: usize) -> Self {
        mem::track_alloc(n_rows * n_cols);
        RowBlock {
            n_rows,
            n_cols,
            data: vec![0.0; n_rows * n_cols],
        }
    }

    pub(crate) fn from_dense(a: &DenseMatrix) -> Self {
        let mut out = RowBlock::zeros(a.n_rows, a.n_cols);
        let c = a.n_cols;
        for j in 0..c {
            for (i, &v) in a.col(j).iter().enumerate() {
                out.data[i * c + j] = v;
            }
        }
        out
    }

    pub(crate) fn to_dense(&self) -> DenseMatrix {
        let c = self.n_cols;
        DenseMatrix::from_fn(self.n_rows, c, |i, j| self.data[i * c + j])
    }

    #[inline]
    pub(crate) fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n_cols..(i + 1) * self.n_cols]
    }

    #[inline]
    pub(crate) fn row_mut(&mut self, i: usize) -> &mut [f64] {
        let c = self.n_cols;
        &mut self.data[i * c..(i + 1) * c]
    }
}

impl Drop for RowBlock {
    fn drop(&mut self) {
        mem::track_free(self.data.len());
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    // four accumulators; fixed order keeps results reproducible
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        let k = 4 * c;
        acc[0] += a[k] * b[k];
        acc[1] += a[k + 1] * b[k + 1];
        acc[2] += a[k + 2] * b[k + 2];
        acc[3] += a[k + 3] * b[k + 3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for k in 4 * chunks..a.len() {
        s += a[k] * b[k];
    }
    s
}

/// `y += alpha · x`.
#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

#[inline]
pub fn norm2(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}
