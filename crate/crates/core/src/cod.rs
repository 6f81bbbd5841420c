//! Dense shrinkage and the co-occurring directions (COD) streaming sketch.

use crate::dense::DenseMatrix;
use crate::error::{check_dim, Error, Result};
use crate::linalg::{svd_small, thin_qr, QrResult};
use crate::sparse::{SparseColumnView, SparseMatrix};
use crate::stream::{sketch_stream, StreamingSketch};

/// The co-sketch `(B_X, B_Y)`; both factors have the same number of columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SketchPair {
    pub b_x: DenseMatrix,
    pub b_y: DenseMatrix,
}

impl SketchPair {
    pub fn zeros(m_x: usize, m_y: usize, l: usize) -> Self {
        SketchPair {
            b_x: DenseMatrix::zeros(m_x, l),
            b_y: DenseMatrix::zeros(m_y, l),
        }
    }

    pub fn new(b_x: DenseMatrix, b_y: DenseMatrix) -> Result<Self> {
        check_dim("SketchPair::new", b_x.n_cols(), b_y.n_cols())?;
        Ok(SketchPair { b_x, b_y })
    }

    /// Sketch width ℓ.
    pub fn width(&self) -> usize {
        self.b_x.n_cols()
    }

    pub fn m_x(&self) -> usize {
        self.b_x.n_rows()
    }

    pub fn m_y(&self) -> usize {
        self.b_y.n_rows()
    }

    /// `B_X B_Yᵀ`, materialized. Only sensible for small dimensions.
    pub fn product(&self) -> DenseMatrix {
        self.b_x.matmul_nt(&self.b_y).expect("equal widths")
    }

    /// `B_X (B_Yᵀ v)`.
    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        let t = self.b_y.matvec_t(v)?;
        self.b_x.matvec(&t)
    }

    /// `B_Y (B_Xᵀ u)`.
    pub fn apply_t(&self, u: &[f64]) -> Result<Vec<f64>> {
        let t = self.b_x.matvec_t(u)?;
        self.b_y.matvec(&t)
    }
}

/// Bookkeeping from one shrinkage step.
#[derive(Debug, Clone, PartialEq)]
pub struct ShrinkReport {
    /// The subtracted singular value γ.
    pub gamma: f64,
    /// Nuclear norm of the input product, `tr(Σ)`.
    pub nuclear_before: f64,
    /// Nuclear norm of the output product, `tr(Σ̃)`.
    pub nuclear_after: f64,
    /// `Σ̃ = max(Σ - γ, 0)`, non-increasing.
    pub shrunk: Vec<f64>,
}

/// Dense shrinkage: QR both factors, SVD the core `R_X R_Yᵀ`, subtract the
/// `ℓ′/2`-th singular value from every singular value and rebuild the
/// factors as `Q_X U √Σ̃` and `Q_Y V √Σ̃`.
///
/// The output keeps the input width `ℓ′`; every column from index `ℓ′/2 - 1`
/// on is zero.
pub fn dense_shrink(b_x: &DenseMatrix, b_y: &DenseMatrix) -> Result<(SketchPair, ShrinkReport)> {
    let width = b_x.n_cols();
    check_dim("dense_shrink (widths)", width, b_y.n_cols())?;
    if width == 0 || !width.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "dense shrinkage needs an even positive width, got {width}"
        )));
    }
    shrink(b_x.clone(), b_y.clone(), width / 2, width)
}

/// Merges a width-ℓ block `(C_X, C_Y)` into a width-ℓ sketch: shrinks the
/// width-2ℓ concatenation by its ℓ-th singular value and keeps the ℓ leading
/// columns, which are the only ones that can be nonzero.
pub fn merge_shrink(
    sketch: SketchPair,
    c_x: DenseMatrix,
    c_y: DenseMatrix,
) -> Result<(SketchPair, ShrinkReport)> {
    let l = sketch.width();
    check_dim("merge_shrink (C_X width)", l, c_x.n_cols())?;
    check_dim("merge_shrink (C_Y width)", l, c_y.n_cols())?;
    check_dim("merge_shrink (C_X rows)", sketch.m_x(), c_x.n_rows())?;
    check_dim("merge_shrink (C_Y rows)", sketch.m_y(), c_y.n_rows())?;
    let SketchPair { b_x, b_y } = sketch;
    let d_x = DenseMatrix::hconcat(&b_x, &c_x)?;
    drop((b_x, c_x));
    let d_y = DenseMatrix::hconcat(&b_y, &c_y)?;
    drop((b_y, c_y));
    shrink(d_x, d_y, l, l)
}

/// Shared body of the two shrinkage entry points. `rank` is the 1-based
/// index of the singular value used as γ; the output has `out_width` columns.
fn shrink(
    d_x: DenseMatrix,
    d_y: DenseMatrix,
    rank: usize,
    out_width: usize,
) -> Result<(SketchPair, ShrinkReport)> {
    let (m_x, width) = d_x.shape();
    let m_y = d_y.n_rows();
    if width > m_x.min(m_y) {
        return Err(Error::InvalidParameter(format!(
            "shrinkage width {width} exceeds min(m_x, m_y) = {}",
            m_x.min(m_y)
        )));
    }
    if d_x.is_zero() || d_y.is_zero() {
        return Ok((
            SketchPair::zeros(m_x, m_y, out_width),
            ShrinkReport {
                gamma: 0.0,
                nuclear_before: 0.0,
                nuclear_after: 0.0,
                shrunk: vec![0.0; width],
            },
        ));
    }
    let QrResult { q: q_x, r: r_x } = thin_qr(&d_x)?;
    drop(d_x);
    let QrResult { q: q_y, r: r_y } = thin_qr(&d_y)?;
    drop(d_y);
    let core = r_x.matmul_nt(&r_y)?;
    let svd = svd_small(&core)?;

    let gamma = svd.sigma[rank - 1];
    let shrunk: Vec<f64> = svd.sigma.iter().map(|&s| (s - gamma).max(0.0)).collect();
    let keep = shrunk.iter().take_while(|&&s| s > 0.0).count();

    let scale_cols = |basis: &DenseMatrix| {
        let mut w = basis.columns(0..keep);
        for (j, s) in shrunk[..keep].iter().enumerate() {
            w.scale_col(j, s.sqrt());
        }
        w
    };
    let w_x = scale_cols(&svd.u);
    let w_y = scale_cols(&svd.v);
    let mut b_x = widen(q_x.matmul(&w_x)?, out_width);
    drop(q_x);
    let mut b_y = widen(q_y.matmul(&w_y)?, out_width);
    b_x.flush_negligible();
    b_y.flush_negligible();

    let report = ShrinkReport {
        gamma,
        nuclear_before: svd.sigma.iter().sum(),
        nuclear_after: shrunk.iter().sum(),
        shrunk,
    };
    Ok((SketchPair { b_x, b_y }, report))
}

/// Pads `a` with zero columns up to `width`.
fn widen(a: DenseMatrix, width: usize) -> DenseMatrix {
    if a.n_cols() == width {
        return a;
    }
    let pad = DenseMatrix::zeros(a.n_rows(), width - a.n_cols());
    DenseMatrix::hconcat(&a, &pad).expect("same rows")
}

/// Streaming COD with sketch width ℓ.
///
/// Columns go into the leftmost free slot; when a column arrives and no slot
/// is free, the sketch is shrunk first, which frees slots `ℓ/2..ℓ`.
#[derive(Debug, Clone)]
pub struct CodSketcher {
    sketch: SketchPair,
    cursor: usize,
    shrinks: usize,
}

impl CodSketcher {
    pub fn new(m_x: usize, m_y: usize, l: usize) -> Result<Self> {
        if l < 2 || !l.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "COD needs an even sketch width >= 2, got {l}"
            )));
        }
        if l > m_x.min(m_y) {
            return Err(Error::InvalidParameter(format!(
                "sketch width {l} exceeds min(m_x, m_y) = {}",
                m_x.min(m_y)
            )));
        }
        Ok(CodSketcher {
            sketch: SketchPair::zeros(m_x, m_y, l),
            cursor: 0,
            shrinks: 0,
        })
    }

    /// Number of shrinkage steps so far.
    pub fn shrinks(&self) -> usize {
        self.shrinks
    }

    pub fn sketch(&self) -> &SketchPair {
        &self.sketch
    }
}

impl StreamingSketch for CodSketcher {
    fn update(&mut self, x: SparseColumnView<'_>, y: SparseColumnView<'_>) -> Result<()> {
        check_dim("CodSketcher::update (x rows)", self.sketch.m_x(), x.n_rows)?;
        check_dim("CodSketcher::update (y rows)", self.sketch.m_y(), y.n_rows)?;
        let l = self.sketch.width();
        if self.cursor == l {
            let (shrunk, _) = dense_shrink(&self.sketch.b_x, &self.sketch.b_y)?;
            self.sketch = shrunk;
            self.cursor = l / 2;
            self.shrinks += 1;
        }
        x.axpy_into(1.0, self.sketch.b_x.col_mut(self.cursor));
        y.axpy_into(1.0, self.sketch.b_y.col_mut(self.cursor));
        self.cursor += 1;
        Ok(())
    }

    fn triggers(&self) -> usize {
        self.shrinks
    }

    fn finalize(self) -> Result<SketchPair> {
        Ok(self.sketch)
    }
}

/// Runs COD over the column streams of `x` and `y`.
pub fn cod_sketch(x: &SparseMatrix, y: &SparseMatrix, l: usize) -> Result<SketchPair> {
    let sk = CodSketcher::new(x.n_rows(), y.n_rows(), l)?;
    sketch_stream(sk, x, y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_inputs_shrink_to_zero() {
        let (out, rep) = dense_shrink(&DenseMatrix::zeros(5, 4), &DenseMatrix::zeros(6, 4)).unwrap();
        assert!(out.b_x.is_zero() && out.b_y.is_zero());
        assert_eq!(out.width(), 4);
        assert_eq!(rep.gamma, 0.0);
    }

    #[test]
    fn rank_one_pair_is_wiped() {
        let mut b_x = DenseMatrix::zeros(3, 2);
        let mut b_y = DenseMatrix::zeros(4, 2);
        b_x.col_mut(0).copy_from_slice(&[1.0, 2.0, 2.0]);
        b_y.col_mut(0).copy_from_slice(&[0.0, 3.0, 0.0, 4.0]);
        let (out, rep) = dense_shrink(&b_x, &b_y).unwrap();
        assert!((rep.gamma - 15.0).abs() < 1e-12);
        assert!(out.product().frobenius_norm() < 1e-12);
        assert!((rep.nuclear_before - 15.0).abs() < 1e-12);
        assert_eq!(rep.nuclear_after, 0.0);
    }

    #[test]
    fn odd_width_rejected() {
        let e = dense_shrink(&DenseMatrix::zeros(5, 3), &DenseMatrix::zeros(5, 3)).unwrap_err();
        assert!(matches!(e, Error::InvalidParameter(_)));
        assert!(dense_shrink(&DenseMatrix::zeros(5, 2), &DenseMatrix::zeros(5, 4)).is_err());
    }

    #[test]
    fn too_wide_rejected() {
        let mut a = DenseMatrix::zeros(3, 4);
        a[(0, 0)] = 1.0;
        assert!(dense_shrink(&a, &a).is_err());
    }

    #[test]
    fn cod_rejects_bad_width() {
        assert!(CodSketcher::new(10, 10, 3).is_err());
        assert!(CodSketcher::new(10, 4, 6).is_err());
        assert!(CodSketcher::new(10, 10, 0).is_err());
    }

    #[test]
    fn merge_with_low_rank_block_is_exact() {
        let sketch = SketchPair::zeros(7, 6, 3);
        let c_x = DenseMatrix::from_fn(7, 3, |i, j| if j < 2 { (i + j) as f64 - 2.0 } else { 0.0 });
        let c_y = DenseMatrix::from_fn(6, 3, |i, j| if j < 2 { (i * j) as f64 + 1.0 } else { 0.0 });
        let expect = c_x.matmul_nt(&c_y).unwrap();
        let (out, rep) = merge_shrink(sketch, c_x, c_y).unwrap();
        assert_eq!(out.width(), 3);
        assert!(rep.gamma.abs() < 1e-12 * expect.frobenius_norm());
        assert!(out.product().max_abs_diff(&expect) < 1e-12 * expect.frobenius_norm());
    }
}
