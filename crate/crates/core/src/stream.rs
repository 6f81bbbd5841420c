//! Common interface of the streaming co-sketches.

use crate::cod::SketchPair;
use crate::error::{Error, Result};
use crate::sparse::{SparseColumnView, SparseMatrix};

/// A sketch that consumes column pairs `(x_i, y_i)` one at a time.
pub trait StreamingSketch {
    fn update(&mut self, x: SparseColumnView<'_>, y: SparseColumnView<'_>) -> Result<()>;

    /// Number of compression steps performed so far (shrinks or buffer
    /// flushes, depending on the algorithm).
    fn triggers(&self) -> usize {
        0
    }

    fn finalize(self) -> Result<SketchPair>;
}

/// Feeds every column pair of `x` and `y` to `sketch` and finalizes it.
pub fn sketch_stream<S: StreamingSketch>(
    mut sketch: S,
    x: &SparseMatrix,
    y: &SparseMatrix,
) -> Result<SketchPair> {
    check_stream_lengths(x, y)?;
    for (cx, cy) in x.columns().zip(y.columns()) {
        sketch.update(cx, cy)?;
    }
    sketch.finalize()
}

pub(crate) fn check_stream_lengths(x: &SparseMatrix, y: &SparseMatrix) -> Result<()> {
    if x.n_cols() != y.n_cols() {
        return Err(Error::StreamLength {
            x: x.n_cols(),
            y: y.n_cols(),
        });
    }
    Ok(())
}
