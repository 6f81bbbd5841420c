//! Compressed sparse column storage, column views and the pending-column
//! buffer that drives the SCOD trigger.

use std::fmt;

use crate::dense::{axpy, DenseMatrix, RowBlock};
use crate::error::{check_dim, Error, Result};
use crate::mem;

/// Borrowed sparse column.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SparseColumnView<'a> {
    pub n_rows: usize,
    pub row_indices: &'a [usize],
    pub values: &'a [f64],
}

impl<'a> SparseColumnView<'a> {
    #[inline]
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n_rows];
        for (&i, &v) in self.row_indices.iter().zip(self.values) {
            out[i] = v;
        }
        out
    }

    pub fn to_owned(&self) -> SparseColumn {
        SparseColumn {
            n_rows: self.n_rows,
            row_indices: self.row_indices.to_vec(),
            values: self.values.to_vec(),
        }
    }

    /// Adds `alpha · self` into the dense vector `y`.
    #[inline]
    pub fn axpy_into(&self, alpha: f64, y: &mut [f64]) {
        for (&i, &v) in self.row_indices.iter().zip(self.values) {
            y[i] += alpha * v;
        }
    }

    /// `selfᵀ · y`.
    #[inline]
    pub fn dot_dense(&self, y: &[f64]) -> f64 {
        self.row_indices
            .iter()
            .zip(self.values)
            .map(|(&i, &v)| v * y[i])
            .sum()
    }
}

/// Owned sparse column with strictly increasing row indices and no stored zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseColumn {
    n_rows: usize,
    row_indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseColumn {
    pub fn new(n_rows: usize, row_indices: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        validate_column(n_rows, &row_indices, &values)?;
        Ok(SparseColumn {
            n_rows,
            row_indices,
            values,
        })
    }

    pub fn zeros(n_rows: usize) -> Self {
        SparseColumn {
            n_rows,
            row_indices: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Keeps the nonzero entries of a dense vector.
    pub fn from_dense(v: &[f64]) -> Self {
        let (row_indices, values) = v
            .iter()
            .enumerate()
            .filter(|(_, &x)| x != 0.0)
            .map(|(i, &x)| (i, x))
            .unzip();
        SparseColumn {
            n_rows: v.len(),
            row_indices,
            values,
        }
    }

    pub fn view(&self) -> SparseColumnView<'_> {
        SparseColumnView {
            n_rows: self.n_rows,
            row_indices: &self.row_indices,
            values: &self.values,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }
}

fn validate_column(n_rows: usize, idx: &[usize], vals: &[f64]) -> Result<()> {
    if idx.len() != vals.len() {
        return Err(Error::InvalidStructure(format!(
            "{} row indices but {} values",
            idx.len(),
            vals.len()
        )));
    }
    for w in idx.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::InvalidStructure(format!(
                "row indices not strictly increasing: {} then {}",
                w[0], w[1]
            )));
        }
    }
    if let Some(&last) = idx.last() {
        if last >= n_rows {
            return Err(Error::InvalidStructure(format!(
                "row index {last} out of bounds for {n_rows} rows"
            )));
        }
    }
    for &v in vals {
        if v == 0.0 {
            return Err(Error::InvalidStructure("explicit zero stored".into()));
        }
        if !v.is_finite() {
            return Err(Error::NonFinite("sparse column"));
        }
    }
    Ok(())
}

/// Compressed sparse column matrix.
pub struct SparseMatrix {
    n_rows: usize,
    n_cols: usize,
    col_offsets: Vec<usize>,
    row_indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Validates and wraps raw CSC arrays.
    pub fn new(
        n_rows: usize,
        n_cols: usize,
        col_offsets: Vec<usize>,
        row_indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        check_dim("SparseMatrix::new (offsets)", n_cols + 1, col_offsets.len())?;
        if col_offsets[0] != 0 || col_offsets[n_cols] != values.len() {
            return Err(Error::InvalidStructure(
                "column offsets must start at 0 and end at nnz".into(),
            ));
        }
        if col_offsets.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidStructure(
                "column offsets must be non-decreasing".into(),
            ));
        }
        for j in 0..n_cols {
            let r = col_offsets[j]..col_offsets[j + 1];
            validate_column(n_rows, &row_indices[r.clone()], &values[r])?;
        }
        Ok(Self::from_parts(n_rows, n_cols, col_offsets, row_indices, values))
    }

    fn from_parts(
        n_rows: usize,
        n_cols: usize,
        col_offsets: Vec<usize>,
        row_indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Self {
        mem::track_alloc(values.len());
        SparseMatrix {
            n_rows,
            n_cols,
            col_offsets,
            row_indices,
            values,
        }
    }

    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self::from_parts(n_rows, n_cols, vec![0; n_cols + 1], Vec::new(), Vec::new())
    }

    /// Builds a matrix from `(row, col, value)` triplets in any order.
    /// Duplicates are summed and entries that end up zero are dropped.
    pub fn from_triplets(
        n_rows: usize,
        n_cols: usize,
        triplets: &[(usize, usize, f64)],
    ) -> Result<Self> {
        let mut sorted: Vec<(usize, usize, f64)> = triplets.to_vec();
        for &(i, j, v) in &sorted {
            if i >= n_rows || j >= n_cols {
                return Err(Error::InvalidStructure(format!(
                    "entry ({i}, {j}) outside {n_rows}x{n_cols}"
                )));
            }
            if !v.is_finite() {
                return Err(Error::NonFinite("SparseMatrix::from_triplets"));
            }
        }
        sorted.sort_by_key(|&(i, j, _)| (j, i));
        let mut col_offsets = vec![0usize; n_cols + 1];
        let mut row_indices = Vec::with_capacity(sorted.len());
        let mut values: Vec<f64> = Vec::with_capacity(sorted.len());
        let mut cols = Vec::with_capacity(sorted.len());
        let mut k = 0;
        while k < sorted.len() {
            let (i, j, mut v) = sorted[k];
            k += 1;
            while k < sorted.len() && sorted[k].0 == i && sorted[k].1 == j {
                v += sorted[k].2;
                k += 1;
            }
            if v != 0.0 {
                row_indices.push(i);
                values.push(v);
                cols.push(j);
            }
        }
        for &j in &cols {
            col_offsets[j + 1] += 1;
        }
        for j in 0..n_cols {
            col_offsets[j + 1] += col_offsets[j];
        }
        Ok(Self::from_parts(n_rows, n_cols, col_offsets, row_indices, values))
    }

    /// Builds a matrix by stacking columns left to right.
    pub fn from_columns<'a, I>(n_rows: usize, columns: I) -> Result<Self>
    where
        I: IntoIterator<Item = SparseColumnView<'a>>,
    {
        let mut m = SparseMatrix::zeros(n_rows, 0);
        for c in columns {
            m.push_column(c)?;
        }
        Ok(m)
    }

    /// Keeps the nonzero entries of a dense matrix.
    pub fn from_dense(a: &DenseMatrix) -> Self {
        let mut m = SparseMatrix::zeros(a.n_rows(), 0);
        for j in 0..a.n_cols() {
            let c = SparseColumn::from_dense(a.col(j));
            m.push_column(c.view()).expect("rows match");
        }
        m
    }

    /// Appends a column on the right.
    pub fn push_column(&mut self, c: SparseColumnView<'_>) -> Result<()> {
        check_dim("SparseMatrix::push_column", self.n_rows, c.n_rows)?;
        self.row_indices.extend_from_slice(c.row_indices);
        self.values.extend_from_slice(c.values);
        self.col_offsets.push(self.values.len());
        self.n_cols += 1;
        mem::track_alloc(c.values.len());
        Ok(())
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
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn col_offsets(&self) -> &[usize] {
        &self.col_offsets
    }

    pub fn row_indices(&self) -> &[usize] {
        &self.row_indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn column(&self, j: usize) -> SparseColumnView<'_> {
        let r = self.col_offsets[j]..self.col_offsets[j + 1];
        SparseColumnView {
            n_rows: self.n_rows,
            row_indices: &self.row_indices[r.clone()],
            values: &self.values[r],
        }
    }

    pub fn columns(&self) -> impl Iterator<Item = SparseColumnView<'_>> + '_ {
        (0..self.n_cols).map(move |j| self.column(j))
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.n_rows, self.n_cols);
        for (j, c) in self.columns().enumerate() {
            for (&i, &v) in c.row_indices.iter().zip(c.values) {
                out[(i, j)] = v;
            }
        }
        out
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut counts = vec![0usize; self.n_rows + 1];
        for &i in &self.row_indices {
            counts[i + 1] += 1;
        }
        for i in 0..self.n_rows {
            counts[i + 1] += counts[i];
        }
        let offsets = counts.clone();
        let mut next = counts;
        let mut row_indices = vec![0usize; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        for (j, c) in self.columns().enumerate() {
            for (&i, &v) in c.row_indices.iter().zip(c.values) {
                let p = next[i];
                row_indices[p] = j;
                values[p] = v;
                next[i] += 1;
            }
        }
        Self::from_parts(self.n_cols, self.n_rows, offsets, row_indices, values)
    }

    /// Copy of the columns in `range`.
    pub fn column_range(&self, range: std::ops::Range<usize>) -> SparseMatrix {
        assert!(range.end <= self.n_cols);
        let lo = self.col_offsets[range.start];
        let hi = self.col_offsets[range.end];
        let offsets = self.col_offsets[range.start..=range.end]
            .iter()
            .map(|o| o - lo)
            .collect();
        Self::from_parts(
            self.n_rows,
            range.len(),
            offsets,
            self.row_indices[lo..hi].to_vec(),
            self.values[lo..hi].to_vec(),
        )
    }

    /// Euclidean norm of every column.
    pub fn column_norms(&self) -> Vec<f64> {
        self.columns().map(|c| c.norm()).collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// `A · v`.
    pub fn matvec(&self, v: &[f64]) -> Result<Vec<f64>> {
        check_dim("SparseMatrix::matvec", self.n_cols, v.len())?;
        let mut out = vec![0.0; self.n_rows];
        for (j, c) in self.columns().enumerate() {
            if v[j] != 0.0 {
                c.axpy_into(v[j], &mut out);
            }
        }
        Ok(out)
    }

    /// `Aᵀ · v`.
    pub fn matvec_t(&self, v: &[f64]) -> Result<Vec<f64>> {
        check_dim("SparseMatrix::matvec_t", self.n_rows, v.len())?;
        Ok(self.columns().map(|c| c.dot_dense(v)).collect())
    }

    /// `A · B` for a dense column-major `B`.
    pub fn mul_dense(&self, b: &DenseMatrix) -> Result<DenseMatrix> {
        check_dim("SparseMatrix::mul_dense", self.n_cols, b.n_rows())?;
        let mut out = DenseMatrix::zeros(self.n_rows, b.n_cols());
        for k in 0..b.n_cols() {
            let bk = b.col(k);
            let ok = out.col_mut(k);
            for (j, c) in self.columns().enumerate() {
                if bk[j] != 0.0 {
                    c.axpy_into(bk[j], ok);
                }
            }
        }
        Ok(out)
    }

    /// `Aᵀ · B` for a dense column-major `B`.
    pub fn mul_dense_t(&self, b: &DenseMatrix) -> Result<DenseMatrix> {
        check_dim("SparseMatrix::mul_dense_t", self.n_rows, b.n_rows())?;
        let mut out = DenseMatrix::zeros(self.n_cols, b.n_cols());
        for k in 0..b.n_cols() {
            let bk = b.col(k);
            for (j, c) in self.columns().enumerate() {
                out[(j, k)] = c.dot_dense(bk);
            }
        }
        Ok(out)
    }

    /// `A · B` with row-major operands.
    pub(crate) fn mul_rows(&self, b: &RowBlock) -> RowBlock {
        debug_assert_eq!(self.n_cols, b.n_rows);
        let mut out = RowBlock::zeros(self.n_rows, b.n_cols);
        for (j, c) in self.columns().enumerate() {
            let src = b.row(j);
            for (&i, &v) in c.row_indices.iter().zip(c.values) {
                axpy(v, src, out.row_mut(i));
            }
        }
        out
    }

    /// `Aᵀ · B` with row-major operands.
    pub(crate) fn mul_rows_t(&self, b: &RowBlock) -> RowBlock {
        debug_assert_eq!(self.n_rows, b.n_rows);
        let mut out = RowBlock::zeros(self.n_cols, b.n_cols);
        for (j, c) in self.columns().enumerate() {
            let dst = out.row_mut(j);
            for (&i, &v) in c.row_indices.iter().zip(c.values) {
                axpy(v, b.row(i), dst);
            }
        }
        out
    }
}

impl Clone for SparseMatrix {
    fn clone(&self) -> Self {
        Self::from_parts(
            self.n_rows,
            self.n_cols,
            self.col_offsets.clone(),
            self.row_indices.clone(),
            self.values.clone(),
        )
    }
}

impl Drop for SparseMatrix {
    fn drop(&mut self) {
        mem::track_free(self.values.len());
    }
}

impl PartialEq for SparseMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.n_rows == other.n_rows
            && self.n_cols == other.n_cols
            && self.col_offsets == other.col_offsets
            && self.row_indices == other.row_indices
            && self.values == other.values
    }
}

impl fmt::Debug for SparseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "SparseMatrix {}x{} (nnz {})",
            self.n_rows,
            self.n_cols,
            self.nnz()
        )
    }
}

/// Pending columns of X and Y, appended pairwise, with running nonzero counts.
#[derive(Debug, Clone)]
pub struct ColumnBufferPair {
    s_x: SparseMatrix,
    s_y: SparseMatrix,
}

impl ColumnBufferPair {
    pub fn new(m_x: usize, m_y: usize) -> Self {
        ColumnBufferPair {
            s_x: SparseMatrix::zeros(m_x, 0),
            s_y: SparseMatrix::zeros(m_y, 0),
        }
    }

    /// Appends `x` to S_X and `y` to S_Y.
    pub fn append_pair(&mut self, x: SparseColumnView<'_>, y: SparseColumnView<'_>) -> Result<()> {
        check_dim("ColumnBufferPair::append_pair (x rows)", self.s_x.n_rows, x.n_rows)?;
        check_dim("ColumnBufferPair::append_pair (y rows)", self.s_y.n_rows, y.n_rows)?;
        self.s_x.push_column(x)?;
        self.s_y.push_column(y)?;
        Ok(())
    }

    /// `nnz(S_X) ≥ ℓm or nnz(S_Y) ≥ ℓm or cols(S_X) = m`.
    pub fn is_full(&self, l: usize, m: usize) -> bool {
        buffer_full(self.nnz_x(), self.nnz_y(), self.n_cols(), l, m)
    }

    pub fn nnz_x(&self) -> usize {
        self.s_x.nnz()
    }

    pub fn nnz_y(&self) -> usize {
        self.s_y.nnz()
    }

    pub fn n_cols(&self) -> usize {
        self.s_x.n_cols
    }

    pub fn is_empty(&self) -> bool {
        self.n_cols() == 0
    }

    pub fn s_x(&self) -> &SparseMatrix {
        &self.s_x
    }

    pub fn s_y(&self) -> &SparseMatrix {
        &self.s_y
    }

    /// Hands the buffered columns over as CSC matrices and resets the buffer.
    pub fn take(&mut self) -> (SparseMatrix, SparseMatrix) {
        let m_x = self.s_x.n_rows;
        let m_y = self.s_y.n_rows;
        (
            std::mem::replace(&mut self.s_x, SparseMatrix::zeros(m_x, 0)),
            std::mem::replace(&mut self.s_y, SparseMatrix::zeros(m_y, 0)),
        )
    }
}

/// The SCOD buffer trigger on raw counters.
pub fn buffer_full(nnz_x: usize, nnz_y: usize, n_cols: usize, l: usize, m: usize) -> bool {
    let cap = l * m;
    nnz_x >= cap || nnz_y >= cap || n_cols >= m
}
