//! Comparison sketches: frequent directions on the stacked matrix, column
//! sampling and Gaussian random projection.

mod cs;
mod fd;
mod rp;

pub use cs::{cs_sketch, CsSketcher};
pub use fd::{fd_sketch, FdSketcher};
pub use rp::{rp_sketch, RpSketcher};
