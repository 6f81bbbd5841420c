use crate::dense::{DenseMatrix, RowBlock};
use crate::error::{check_dim, Error, Result};
use crate::linalg::{orthonormalize, Rng};
use crate::sparse::SparseMatrix;

/// Parameters of simultaneous iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiConfig {
    /// Target rank ℓ.
    pub l: usize,
    /// Accuracy ε in `(0, 1)`.
    pub epsilon: f64,
    /// Multiplier in `q = ⌈c · ln(m_x) / ε⌉`.
    pub power_constant: f64,
}

impl SiConfig {
    pub fn new(l: usize, epsilon: f64, power_constant: f64) -> Result<Self> {
        if l == 0 {
            return Err(Error::InvalidParameter("SI rank must be positive".into()));
        }
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "SI epsilon must lie in (0, 1), got {epsilon}"
            )));
        }
        if !(power_constant > 0.0 && power_constant.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "SI power constant must be positive, got {power_constant}"
            )));
        }
        Ok(SiConfig {
            l,
            epsilon,
            power_constant,
        })
    }

    /// Number of power iterations for an `m_x`-row left factor, at least one.
    pub fn power_iterations(&self, m_x: usize) -> usize {
        let q = (self.power_constant * (m_x.max(1) as f64).ln() / self.epsilon).ceil();
        (q as usize).max(1)
    }
}

/// Rank-ℓ factorization `(Q, S_Y S_Xᵀ Q)` of `S_X S_Yᵀ` by randomized
/// subspace iteration, where `Q` (`m_x × ℓ`) has orthonormal columns.
///
/// Only sparse-times-dense products touch `S_X` and `S_Y`; the product
/// itself is never formed. The iterate is re-orthonormalized after every
/// multiplication by `S_X S_Yᵀ S_Y S_Xᵀ`, which leaves its span unchanged
/// but keeps it from overflowing or collapsing onto the top direction.
pub fn simultaneous_iteration(
    s_x: &SparseMatrix,
    s_y: &SparseMatrix,
    cfg: &SiConfig,
    rng: &mut Rng,
) -> Result<(DenseMatrix, DenseMatrix)> {
    check_dim("simultaneous_iteration (columns)", s_x.n_cols(), s_y.n_cols())?;
    let (m_x, m_y) = (s_x.n_rows(), s_y.n_rows());
    let l = cfg.l;
    if l > m_x.min(m_y) {
        return Err(Error::InvalidParameter(format!(
            "SI rank {l} exceeds min(m_x, m_y) = {}",
            m_x.min(m_y)
        )));
    }
    if s_x.values().iter().chain(s_y.values()).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("simultaneous_iteration"));
    }

    let mut g = RowBlock::zeros(m_y, l);
    for i in 0..m_y {
        rng.fill_normal(g.row_mut(i));
    }
    let t = s_y.mul_rows_t(&g);
    drop(g);
    let mut k = s_x.mul_rows(&t);
    drop(t);

    for _ in 0..cfg.power_iterations(m_x) {
        let q = RowBlock::from_dense(&orthonormalize(&k.to_dense())?);
        drop(k);
        let t1 = s_x.mul_rows_t(&q);
        drop(q);
        let t2 = s_y.mul_rows(&t1);
        drop(t1);
        let t3 = s_y.mul_rows_t(&t2);
        drop(t2);
        k = s_x.mul_rows(&t3);
    }

    let q = orthonormalize(&k.to_dense())?;
    drop(k);
    let t = s_x.mul_rows_t(&RowBlock::from_dense(&q));
    let c_y = s_y.mul_rows(&t).to_dense();
    Ok((q, c_y))
}
