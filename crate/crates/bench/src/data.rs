//! Loading a single matrix market file and splitting it into `(X, Y)`.

use std::path::Path;

use scod_core::mtx::read_mtx_file;
use scod_core::SparseMatrix;

use crate::error::{BenchError, Result};

/// Where to cut the columns of the loaded matrix `M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Split {
    /// First `⌊cols/2⌋` columns go to X.
    FrontHalf,
    /// First `k` columns go to X.
    At(usize),
}

/// Splits `M` column-wise into `[M_1, M_2]` and returns `(M_1ᵀ, M_2ᵀ)`, so
/// both factors have one column per row of `M`.
pub fn split_matrix(m: &SparseMatrix, split: Split) -> Result<(SparseMatrix, SparseMatrix)> {
    if m.nnz() == 0 || m.n_rows() == 0 || m.n_cols() < 2 {
        return Err(BenchError::Data(format!(
            "cannot split an empty or single-column matrix ({}x{}, {} nonzeros)",
            m.n_rows(),
            m.n_cols(),
            m.nnz()
        )));
    }
    let k = match split {
        Split::FrontHalf => m.n_cols() / 2,
        Split::At(k) => k,
    };
    if k == 0 || k >= m.n_cols() {
        return Err(BenchError::Data(format!(
            "split index {k} must lie in 1..{}",
            m.n_cols()
        )));
    }
    let x = m.column_range(0..k).transpose();
    let y = m.column_range(k..m.n_cols()).transpose();
    Ok((x, y))
}

pub fn load_and_split(path: impl AsRef<Path>, split: Split) -> Result<(SparseMatrix, SparseMatrix)> {
    let m = read_mtx_file(path)?;
    split_matrix(&m, split)
}
