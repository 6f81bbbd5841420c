use crate::cod::SketchPair;
use crate::dense::DenseMatrix;
use crate::error::{check_dim, Error, Result};
use crate::linalg::Rng;
use crate::sparse::{SparseColumnView, SparseMatrix};
use crate::stream::{sketch_stream, StreamingSketch};

/// Gaussian random projection: `B_X = X Gᵀ / √ℓ`, `B_Y = Y Gᵀ / √ℓ` with
/// `G` an `ℓ × n` standard normal matrix.
///
/// Column `i` of `G` comes from its own generator stream, so the result does
/// not depend on how the stream is chunked and `G` is never stored.
#[derive(Debug, Clone)]
pub struct RpSketcher {
    sketch: SketchPair,
    seed: u64,
    index: u64,
    g: Vec<f64>,
}

impl RpSketcher {
    pub fn new(m_x: usize, m_y: usize, l: usize, seed: u64) -> Result<Self> {
        if l == 0 {
            return Err(Error::InvalidParameter("sketch width must be positive".into()));
        }
        Ok(RpSketcher {
            sketch: SketchPair::zeros(m_x, m_y, l),
            seed,
            index: 0,
            g: vec![0.0; l],
        })
    }
}

fn add_outer(b: &mut DenseMatrix, x: SparseColumnView<'_>, g: &[f64]) {
    for (k, &gk) in g.iter().enumerate() {
        x.axpy_into(gk, b.col_mut(k));
    }
}

impl StreamingSketch for RpSketcher {
    fn update(&mut self, x: SparseColumnView<'_>, y: SparseColumnView<'_>) -> Result<()> {
        check_dim("RpSketcher::update (x rows)", self.sketch.m_x(), x.n_rows)?;
        check_dim("RpSketcher::update (y rows)", self.sketch.m_y(), y.n_rows)?;
        let scale = 1.0 / (self.g.len() as f64).sqrt();
        let mut rng = Rng::stream(self.seed, self.index);
        rng.fill_normal(&mut self.g);
        self.g.iter_mut().for_each(|v| *v *= scale);
        add_outer(&mut self.sketch.b_x, x, &self.g);
        add_outer(&mut self.sketch.b_y, y, &self.g);
        self.index += 1;
        Ok(())
    }

    fn finalize(self) -> Result<SketchPair> {
        Ok(self.sketch)
    }
}

pub fn rp_sketch(x: &SparseMatrix, y: &SparseMatrix, l: usize, seed: u64) -> Result<SketchPair> {
    sketch_stream(RpSketcher::new(x.n_rows(), y.n_rows(), l, seed)?, x, y)
}
