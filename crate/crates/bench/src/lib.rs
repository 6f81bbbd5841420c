//! Synthetic datasets, error metrics and the experiment runner used to
//! compare the streaming co-sketches.

pub mod config;
pub mod data;
pub mod error;
pub mod metrics;
pub mod runner;
pub mod synthetic;

pub use config::{Algorithm, Dataset, RunConfig};
pub use error::{BenchError, Result};
pub use metrics::{approx_error, projection_error, stable_rank, MetricsContext};
pub use runner::{aggregate, run_experiment, run_grid, sketch_with, Aggregate, BenchReport};
pub use synthetic::{generate_lowrank, random_sparse, SyntheticSpec};
