use crate::cod::SketchPair;
use crate::dense::DenseMatrix;
use crate::error::{check_dim, Error, Result};
use crate::linalg::{svd_small, thin_qr};
use crate::sparse::{SparseColumnView, SparseMatrix};
use crate::stream::{sketch_stream, StreamingSketch};

/// Frequent directions on the stacked columns `[x_i; y_i]`; the sketch of
/// `X Yᵀ` is the pair of row blocks of the stacked sketch.
#[derive(Debug, Clone)]
pub struct FdSketcher {
    m_x: usize,
    b: DenseMatrix,
    cursor: usize,
    shrinks: usize,
}

impl FdSketcher {
    pub fn new(m_x: usize, m_y: usize, l: usize) -> Result<Self> {
        if l < 2 || !l.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "FD needs an even sketch width >= 2, got {l}"
            )));
        }
        if l > m_x + m_y {
            return Err(Error::InvalidParameter(format!(
                "sketch width {l} exceeds m_x + m_y = {}",
                m_x + m_y
            )));
        }
        Ok(FdSketcher {
            m_x,
            b: DenseMatrix::zeros(m_x + m_y, l),
            cursor: 0,
            shrinks: 0,
        })
    }

    /// Subtracts the squared `ℓ/2`-th singular value from every squared
    /// singular value, which zeroes columns `ℓ/2 - 1..`.
    fn shrink(&mut self) -> Result<()> {
        let l = self.b.n_cols();
        let qr = thin_qr(&self.b)?;
        let svd = svd_small(&qr.r)?;
        let floor = svd.sigma[l / 2 - 1].powi(2);
        let mut w = svd.u;
        for (j, s) in svd.sigma.iter().enumerate() {
            w.scale_col(j, (s * s - floor).max(0.0).sqrt());
        }
        self.b = qr.q.matmul(&w)?;
        self.b.flush_negligible();
        self.cursor = l / 2;
        self.shrinks += 1;
        Ok(())
    }
}

impl StreamingSketch for FdSketcher {
    fn update(&mut self, x: SparseColumnView<'_>, y: SparseColumnView<'_>) -> Result<()> {
        check_dim("FdSketcher::update (x rows)", self.m_x, x.n_rows)?;
        check_dim("FdSketcher::update (y rows)", self.b.n_rows() - self.m_x, y.n_rows)?;
        if self.cursor == self.b.n_cols() {
            self.shrink()?;
        }
        let m_x = self.m_x;
        let col = self.b.col_mut(self.cursor);
        x.axpy_into(1.0, &mut col[..m_x]);
        y.axpy_into(1.0, &mut col[m_x..]);
        self.cursor += 1;
        Ok(())
    }

    fn triggers(&self) -> usize {
        self.shrinks
    }

    fn finalize(self) -> Result<SketchPair> {
        let m = self.b.n_rows();
        SketchPair::new(self.b.row_block(0..self.m_x), self.b.row_block(self.m_x..m))
    }
}

/// Runs FD over the stacked column streams of `x` and `y`.
pub fn fd_sketch(x: &SparseMatrix, y: &SparseMatrix, l: usize) -> Result<SketchPair> {
    sketch_stream(FdSketcher::new(x.n_rows(), y.n_rows(), l)?, x, y)
}
