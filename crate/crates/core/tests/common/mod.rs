#![allow(dead_code)]

use nalgebra::DMatrix;
use scod_core::linalg::Rng;
use scod_core::{DenseMatrix, SketchPair, SparseMatrix};

pub fn na(a: &DenseMatrix) -> DMatrix<f64> {
    DMatrix::from_column_slice(a.n_rows(), a.n_cols(), a.as_slice())
}

pub fn na_sparse(a: &SparseMatrix) -> DMatrix<f64> {
    na(&a.to_dense())
}

/// Singular values, non-increasing.
pub fn singular_values(a: &DMatrix<f64>) -> Vec<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = a.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|x, y| y.partial_cmp(x).unwrap());
    s
}

pub fn spectral(a: &DMatrix<f64>) -> f64 {
    singular_values(a).first().copied().unwrap_or(0.0)
}

/// `X Yᵀ`.
pub fn product(x: &SparseMatrix, y: &SparseMatrix) -> DMatrix<f64> {
    na_sparse(x) * na_sparse(y).transpose()
}

pub fn sketch_product(s: &SketchPair) -> DMatrix<f64> {
    na(&s.b_x) * na(&s.b_y).transpose()
}

/// Bernoulli(density) support with standard normal values.
pub fn random_sparse(rows: usize, cols: usize, density: f64, rng: &mut Rng) -> SparseMatrix {
    let mut t = Vec::new();
    for j in 0..cols {
        for i in 0..rows {
            if rng.uniform() < density {
                t.push((i, j, rng.normal()));
            }
        }
    }
    SparseMatrix::from_triplets(rows, cols, &t).unwrap()
}

pub fn random_dense(rows: usize, cols: usize, rng: &mut Rng) -> DenseMatrix {
    DenseMatrix::from_fn(rows, cols, |_, _| rng.normal())
}

/// Sparse pair whose product has rank at most `r`: columns of X and Y are
/// sparse combinations of `r` fixed sparse atoms.
pub fn low_rank_pair(m_x: usize, m_y: usize, d: usize, r: usize, rng: &mut Rng) -> (SparseMatrix, SparseMatrix) {
    let ax = random_sparse(m_x, r, 0.3, rng).to_dense();
    let ay = random_sparse(m_y, r, 0.3, rng).to_dense();
    let cx = random_dense(r, d, rng);
    let cy = random_dense(r, d, rng);
    let x = SparseMatrix::from_dense(&ax.matmul(&cx).unwrap());
    let y = SparseMatrix::from_dense(&ay.matmul(&cy).unwrap());
    (x, y)
}
