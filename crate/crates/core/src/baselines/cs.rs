use std::sync::Arc;

use crate::cod::SketchPair;
use crate::error::{check_dim, Error, Result};
use crate::linalg::Rng;
use crate::mem;
use crate::sparse::{SparseColumn, SparseColumnView, SparseMatrix};
use crate::stream::{sketch_stream, StreamingSketch};

/// A retained column pair and its sampling weight `‖x‖ ‖y‖`.
#[derive(Debug)]
struct Kept {
    x: SparseColumn,
    y: SparseColumn,
    weight: f64,
}

impl Kept {
    fn new(x: SparseColumnView<'_>, y: SparseColumnView<'_>, weight: f64) -> Self {
        mem::track_alloc(x.nnz() + y.nnz());
        Kept {
            x: x.to_owned(),
            y: y.to_owned(),
            weight,
        }
    }
}

impl Drop for Kept {
    fn drop(&mut self) {
        mem::track_free(self.x.nnz() + self.y.nnz());
    }
}

/// Column sampling: ℓ draws with replacement, column `i` picked with
/// probability `p_i ∝ ‖x_i‖ ‖y_i‖` and rescaled by `1 / √(ℓ p_i)`, so that
/// `E[B_X B_Yᵀ] = X Yᵀ`.
///
/// Each of the ℓ draws is a one-item weighted reservoir. Instead of a coin
/// flip per item, a slot last replaced at total weight `W` draws `u ~ U(0, 1]`
/// and is next replaced by the first item that lifts the running total above
/// `W / u`; this has the same distribution and costs O(1) per item that
/// replaces nothing.
#[derive(Debug, Clone)]
pub struct CsSketcher {
    m_x: usize,
    m_y: usize,
    slots: Vec<Option<Arc<Kept>>>,
    thresholds: Vec<f64>,
    min_threshold: f64,
    total: f64,
    rng: Rng,
}

impl CsSketcher {
    pub fn new(m_x: usize, m_y: usize, l: usize, seed: u64) -> Result<Self> {
        if l == 0 {
            return Err(Error::InvalidParameter("sketch width must be positive".into()));
        }
        Ok(CsSketcher {
            m_x,
            m_y,
            slots: vec![None; l],
            thresholds: vec![0.0; l],
            min_threshold: 0.0,
            total: 0.0,
            rng: Rng::new(seed),
        })
    }
}

impl StreamingSketch for CsSketcher {
    fn update(&mut self, x: SparseColumnView<'_>, y: SparseColumnView<'_>) -> Result<()> {
        check_dim("CsSketcher::update (x rows)", self.m_x, x.n_rows)?;
        check_dim("CsSketcher::update (y rows)", self.m_y, y.n_rows)?;
        let weight = x.norm() * y.norm();
        if !weight.is_finite() {
            return Err(Error::NonFinite("CsSketcher::update"));
        }
        if weight == 0.0 {
            return Ok(());
        }
        self.total += weight;
        if self.total <= self.min_threshold {
            return Ok(());
        }
        let kept = Arc::new(Kept::new(x, y, weight));
        for (slot, t) in self.slots.iter_mut().zip(self.thresholds.iter_mut()) {
            if self.total > *t {
                *slot = Some(Arc::clone(&kept));
                *t = self.total / self.rng.uniform_open0();
            }
        }
        self.min_threshold = self.thresholds.iter().copied().fold(f64::INFINITY, f64::min);
        Ok(())
    }

    fn finalize(self) -> Result<SketchPair> {
        let l = self.slots.len();
        let mut out = SketchPair::zeros(self.m_x, self.m_y, l);
        for (k, slot) in self.slots.iter().enumerate() {
            if let Some(kept) = slot {
                let p = kept.weight / self.total;
                let scale = 1.0 / (l as f64 * p).sqrt();
                kept.x.view().axpy_into(scale, out.b_x.col_mut(k));
                kept.y.view().axpy_into(scale, out.b_y.col_mut(k));
            }
        }
        Ok(out)
    }
}

pub fn cs_sketch(x: &SparseMatrix, y: &SparseMatrix, l: usize, seed: u64) -> Result<SketchPair> {
    sketch_stream(CsSketcher::new(x.n_rows(), y.n_rows(), l, seed)?, x, y)
}
