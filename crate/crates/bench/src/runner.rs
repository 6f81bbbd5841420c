//! Runs grids of sketching cells and writes the results as CSV.

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use scod_core::baselines::{CsSketcher, FdSketcher, RpSketcher};
use scod_core::linalg::{derive_seed, SpectralEstimate};
use scod_core::{
    CodSketcher, PeakScope, ScodConfig, ScodMode, ScodSketcher, SketchPair,
    SparseMatrix, StreamingSketch,
};

use crate::config::{Algorithm, RunConfig};
use crate::error::Result;
use crate::metrics::{approx_error, projection_error, MetricsContext};

pub const CSV_HEADER: [&str; 9] = [
    "algorithm",
    "l",
    "seed",
    "approx_error",
    "projection_error",
    "wall_time_s",
    "peak_aux_scalars",
    "triggers",
    "status",
];

/// Outcome of one (algorithm, ℓ, trial) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub algorithm: Algorithm,
    pub l: usize,
    pub seed: u64,
    pub approx_error: f64,
    pub projection_error: f64,
    /// Seconds spent sketching, excluding data generation and metrics.
    pub wall_time: f64,
    pub peak_aux_scalars: usize,
    pub triggers: usize,
    /// `ok`, `nonconverged` (a metric hit its iteration cap) or `error: ...`.
    pub status: String,
}

impl BenchReport {
    pub fn is_ok(&self) -> bool {
        !self.status.starts_with("error")
    }
}

/// A finished sketch with its cost measurements.
#[derive(Debug)]
pub struct SketchRun {
    pub sketch: SketchPair,
    pub wall_time: f64,
    pub peak_aux_scalars: usize,
    pub triggers: usize,
}

/// Per-cell settings that are not part of the grid coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellSettings {
    pub delta: f64,
    pub mode: ScodMode,
    pub metrics: MetricsContext,
}

fn run_stream<S: StreamingSketch>(
    mut sk: S,
    x: &SparseMatrix,
    y: &SparseMatrix,
) -> scod_core::Result<(SketchPair, usize)> {
    for (cx, cy) in x.columns().zip(y.columns()) {
        sk.update(cx, cy)?;
    }
    let triggers = sk.triggers();
    Ok((sk.finalize()?, triggers))
}

/// Sketches `(x, y)` with `algo`, timing and metering only the sketching.
pub fn sketch_with(
    algo: Algorithm,
    x: &SparseMatrix,
    y: &SparseMatrix,
    l: usize,
    seed: u64,
    delta: f64,
    mode: ScodMode,
) -> Result<SketchRun> {
    let (m_x, m_y) = (x.n_rows(), y.n_rows());
    let scope = PeakScope::start();
    let started = Instant::now();
    let (sketch, triggers) = match algo {
        Algorithm::Scod => {
            let cfg = ScodConfig::new(l).delta(delta).mode(mode).seed(seed);
            let mut sk = ScodSketcher::new(m_x, m_y, cfg)?;
            for (cx, cy) in x.columns().zip(y.columns()) {
                sk.update(cx, cy)?;
            }
            let (sketch, tel) = sk.finalize_with_telemetry()?;
            (sketch, tel.triggers)
        }
        Algorithm::Cod => run_stream(CodSketcher::new(m_x, m_y, l)?, x, y)?,
        Algorithm::Fd => run_stream(FdSketcher::new(m_x, m_y, l)?, x, y)?,
        Algorithm::Cs => run_stream(CsSketcher::new(m_x, m_y, l, seed)?, x, y)?,
        Algorithm::Rp => run_stream(RpSketcher::new(m_x, m_y, l, seed)?, x, y)?,
    };
    let wall_time = started.elapsed().as_secs_f64();
    Ok(SketchRun {
        sketch,
        wall_time,
        peak_aux_scalars: scope.peak(),
        triggers,
    })
}

fn evaluate(
    algo: Algorithm,
    x: &SparseMatrix,
    y: &SparseMatrix,
    l: usize,
    seed: u64,
    settings: &CellSettings,
) -> Result<(SketchRun, SpectralEstimate, SpectralEstimate)> {
    let run = sketch_with(algo, x, y, l, seed, settings.delta, settings.mode)?;
    let ctx = settings.metrics.for_width(l);
    let approx = approx_error(x, y, &run.sketch, &ctx)?;
    let proj = projection_error(x, y, &run.sketch, &ctx)?;
    Ok((run, approx, proj))
}

/// Runs one cell; failures become an `error: ...` status instead of aborting.
pub fn run_cell(
    algo: Algorithm,
    x: &SparseMatrix,
    y: &SparseMatrix,
    l: usize,
    trial: u64,
    seed: u64,
    settings: &CellSettings,
) -> BenchReport {
    match evaluate(algo, x, y, l, seed, settings) {
        Ok((run, approx, proj)) => BenchReport {
            algorithm: algo,
            l,
            seed: trial,
            approx_error: approx.value,
            projection_error: proj.value,
            wall_time: run.wall_time,
            peak_aux_scalars: run.peak_aux_scalars,
            triggers: run.triggers,
            status: if approx.converged && proj.converged {
                "ok".into()
            } else {
                "nonconverged".into()
            },
        },
        Err(e) => BenchReport {
            algorithm: algo,
            l,
            seed: trial,
            approx_error: f64::NAN,
            projection_error: f64::NAN,
            wall_time: f64::NAN,
            peak_aux_scalars: 0,
            triggers: 0,
            status: format!("error: {e}"),
        },
    }
}

/// Seed of one cell, derived from the master seed and the grid coordinates.
pub fn cell_seed(master: u64, algo: Algorithm, l: usize, trial: u64) -> u64 {
    derive_seed(&[master, algo as u64, l as u64, trial])
}

/// Runs every (algorithm, ℓ, trial) cell in parallel. Reports come back in
/// grid order regardless of scheduling.
pub fn run_grid(
    x: &SparseMatrix,
    y: &SparseMatrix,
    algorithms: &[Algorithm],
    l_grid: &[usize],
    trials: usize,
    master_seed: u64,
    settings: &CellSettings,
) -> Vec<BenchReport> {
    let cells: Vec<(Algorithm, usize, u64)> = algorithms
        .iter()
        .flat_map(|&a| l_grid.iter().flat_map(move |&l| (0..trials as u64).map(move |t| (a, l, t))))
        .collect();
    cells
        .par_iter()
        .map(|&(a, l, t)| run_cell(a, x, y, l, t, cell_seed(master_seed, a, l, t), settings))
        .collect()
}

/// Mean and sample standard deviation of each metric over the successful
/// cells of one (algorithm, ℓ) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub algorithm: Algorithm,
    pub l: usize,
    pub count: usize,
    pub mean: [f64; 5],
    pub std: [f64; 5],
}

impl Aggregate {
    pub fn mean_approx(&self) -> f64 {
        self.mean[0]
    }

    pub fn std_approx(&self) -> f64 {
        self.std[0]
    }

    pub fn mean_projection(&self) -> f64 {
        self.mean[1]
    }

    pub fn mean_time(&self) -> f64 {
        self.mean[2]
    }
}

fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    if v.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Aggregates in order of first appearance of each (algorithm, ℓ) pair.
pub fn aggregate(reports: &[BenchReport]) -> Vec<Aggregate> {
    let mut keys: Vec<(Algorithm, usize)> = Vec::new();
    for r in reports {
        if !keys.contains(&(r.algorithm, r.l)) {
            keys.push((r.algorithm, r.l));
        }
    }
    keys.into_iter()
        .map(|(algorithm, l)| {
            let ok: Vec<&BenchReport> = reports
                .iter()
                .filter(|r| r.algorithm == algorithm && r.l == l && r.is_ok())
                .collect();
            let mut mean = [0.0; 5];
            let mut std = [0.0; 5];
            let fields: [fn(&BenchReport) -> f64; 5] = [
                |r| r.approx_error,
                |r| r.projection_error,
                |r| r.wall_time,
                |r| r.peak_aux_scalars as f64,
                |r| r.triggers as f64,
            ];
            for (i, f) in fields.iter().enumerate() {
                let vals: Vec<f64> = ok.iter().map(|r| f(r)).collect();
                (mean[i], std[i]) = mean_std(&vals);
            }
            Aggregate {
                algorithm,
                l,
                count: ok.len(),
                mean,
                std,
            }
        })
        .collect()
}

fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        format!("{v:e}")
    }
}

/// Writes the per-cell rows followed by a `mean` and a `std` row per
/// (algorithm, ℓ) pair.
pub fn write_csv<W: Write>(out: W, reports: &[BenchReport], aggregates: &[Aggregate]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in reports {
        w.write_record([
            r.algorithm.name().to_string(),
            r.l.to_string(),
            r.seed.to_string(),
            fmt_f64(r.approx_error),
            fmt_f64(r.projection_error),
            fmt_f64(r.wall_time),
            r.peak_aux_scalars.to_string(),
            r.triggers.to_string(),
            r.status.clone(),
        ])?;
    }
    for a in aggregates {
        for (label, v) in [("mean", &a.mean), ("std", &a.std)] {
            w.write_record([
                a.algorithm.name().to_string(),
                a.l.to_string(),
                label.to_string(),
                fmt_f64(v[0]),
                fmt_f64(v[1]),
                fmt_f64(v[2]),
                fmt_f64(v[3]),
                fmt_f64(v[4]),
                "aggregate".to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Loads or generates the dataset, runs the grid and writes the CSV.
pub fn run_experiment<W: Write>(cfg: &RunConfig, out: W) -> Result<Vec<BenchReport>> {
    cfg.validate()?;
    let (x, y) = cfg.load_data()?;
    let settings = CellSettings {
        delta: cfg.delta,
        mode: cfg.mode,
        metrics: MetricsContext {
            k: cfg.k,
            ..MetricsContext::default()
        },
    };
    let reports = run_grid(&x, &y, &cfg.algorithms, &cfg.l_grid, cfg.seeds, cfg.master_seed, &settings);
    write_csv(out, &reports, &aggregate(&reports))?;
    Ok(reports)
}
