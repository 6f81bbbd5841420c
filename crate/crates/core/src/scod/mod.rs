//! Sparse co-occurring directions (SCOD) and its randomized low-rank step.

mod bsi;
mod si;
mod sketcher;

pub use bsi::{
    boosted_si, residual_scale, verification_power, verify_residual, BsiOutcome, BsiState,
    BSI_EPSILON, DEFAULT_RETRY_CAP,
};
pub use si::{simultaneous_iteration, SiConfig};
pub use sketcher::{scod_sketch, ScodConfig, ScodMode, ScodSketcher, ScodTelemetry};
