//! Streaming co-sketches for approximating `X Yᵀ` from sparse column streams.
//!
//! The main entry point is [`ScodSketcher`], which buffers sparse columns and
//! compresses the buffer with a randomized low-rank step before merging it into
//! a dense sketch. [`CodSketcher`] is the dense streaming counterpart and the
//! [`baselines`] module holds the comparison sketches.

pub mod baselines;
pub mod cod;
pub mod dense;
pub mod error;
pub mod linalg;
pub mod mem;
pub mod mtx;
pub mod scod;
pub mod sparse;
pub mod stream;

pub use cod::{cod_sketch, dense_shrink, merge_shrink, CodSketcher, ShrinkReport, SketchPair};
pub use dense::DenseMatrix;
pub use error::{Error, Result};
pub use linalg::Rng;
pub use mem::PeakScope;
pub use scod::{scod_sketch, ScodConfig, ScodMode, ScodSketcher, ScodTelemetry};
pub use sparse::{ColumnBufferPair, SparseColumn, SparseColumnView, SparseMatrix};
pub use stream::{sketch_stream, StreamingSketch};
