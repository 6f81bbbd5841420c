use std::fs::File;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use scod_bench::config::parse_mode;
use scod_bench::runner::{aggregate, run_grid, write_csv, CellSettings};
use scod_bench::{run_experiment, Algorithm, BenchError, MetricsContext, RunConfig, SyntheticSpec};
use scod_core::mtx::{read_mtx_file, write_mtx_file};

#[derive(Parser)]
#[command(name = "sketch", version, about = "Streaming sketches for sparse matrix products")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    Lowrank,
    Noisy,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment grid described by a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// CSV destination; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a synthetic pair as X.mtx and Y.mtx.
    Gen {
        #[arg(long, value_enum)]
        preset: Preset,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Sketch a pair of matrix market files and report errors.
    Eval {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
        #[arg(long)]
        algo: String,
        #[arg(long)]
        l: usize,
        #[arg(long, default_value_t = 1)]
        seeds: usize,
        #[arg(long, default_value = "verified")]
        mode: String,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        #[arg(long, default_value_t = 8)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        master_seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn output(path: Option<&PathBuf>) -> Result<Box<dyn Write>, BenchError> {
    Ok(match path {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn execute(cli: Cli) -> Result<(), BenchError> {
    match cli.command {
        Command::Run { config, out } => {
            let cfg = RunConfig::from_file(&config)?;
            let reports = run_experiment(&cfg, output(out.as_ref())?)?;
            let failed = reports.iter().filter(|r| !r.is_ok()).count();
            if failed > 0 {
                return Err(BenchError::Numerical(format!("{failed} cells failed")));
            }
        }
        Command::Gen { preset, out, seed } => {
            let mut spec = match preset {
                Preset::Lowrank => SyntheticSpec::lowrank_preset(),
                Preset::Noisy => SyntheticSpec::noisy_preset(),
            };
            if let Some(s) = seed {
                spec.seed = s;
            }
            let (x, y) = spec.generate()?;
            std::fs::create_dir_all(&out)?;
            write_mtx_file(&x, out.join("X.mtx"))?;
            write_mtx_file(&y, out.join("Y.mtx"))?;
        }
        Command::Eval {
            x,
            y,
            algo,
            l,
            seeds,
            mode,
            delta,
            k,
            master_seed,
            out,
        } => {
            let algo: Algorithm = algo.parse()?;
            let mode = parse_mode(&mode)?;
            if seeds == 0 {
                return Err(BenchError::Config("seeds must be positive".into()));
            }
            if !(delta > 0.0 && delta < 1.0) {
                return Err(BenchError::Config("delta must lie in (0, 1)".into()));
            }
            let x = read_mtx_file(&x)?;
            let y = read_mtx_file(&y)?;
            if x.n_cols() != y.n_cols() {
                return Err(BenchError::Data(format!(
                    "X has {} columns but Y has {}",
                    x.n_cols(),
                    y.n_cols()
                )));
            }
            let settings = CellSettings {
                delta,
                mode,
                metrics: MetricsContext {
                    k,
                    ..MetricsContext::default()
                },
            };
            let reports = run_grid(&x, &y, &[algo], &[l], seeds, master_seed, &settings);
            write_csv(File::create(&out)?, &reports, &aggregate(&reports))?;
            if let Some(bad) = reports.iter().find(|r| !r.is_ok()) {
                return Err(classify(&bad.status));
            }
        }
    }
    Ok(())
}

/// Maps a failed cell's status back to an error class.
fn classify(status: &str) -> BenchError {
    let msg = status.trim_start_matches("error: ").to_string();
    if msg.starts_with("config error") {
        BenchError::Config(msg)
    } else if msg.starts_with("data error") {
        BenchError::Data(msg)
    } else {
        BenchError::Numerical(msg)
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sketch: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
