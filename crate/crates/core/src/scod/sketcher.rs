use std::time::{Duration, Instant};

use crate::cod::{merge_shrink, SketchPair};
use crate::error::{check_dim, Error, Result};
use crate::linalg::Rng;
use crate::sparse::{ColumnBufferPair, SparseColumnView, SparseMatrix};
use crate::stream::{sketch_stream, StreamingSketch};

use super::bsi::{boosted_si, BsiState, BSI_EPSILON, DEFAULT_RETRY_CAP};
use super::si::{simultaneous_iteration, SiConfig};

/// How the buffer is compressed before each merge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScodMode {
    /// Boosted SI with residual verification; carries the error guarantee.
    #[default]
    Verified,
    /// A single SI call at ε = 1/10 without verification.
    Practical,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScodConfig {
    pub l: usize,
    pub delta: f64,
    pub power_constant: f64,
    pub retry_cap: usize,
    pub mode: ScodMode,
    pub seed: u64,
}

impl ScodConfig {
    pub fn new(l: usize) -> Self {
        ScodConfig {
            l,
            delta: 0.1,
            power_constant: 1.0,
            retry_cap: DEFAULT_RETRY_CAP,
            mode: ScodMode::Verified,
            seed: 0,
        }
    }

    pub fn mode(mut self, mode: ScodMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn power_constant(mut self, c: f64) -> Self {
        self.power_constant = c;
        self
    }
}

/// Counters and phase timers collected while sketching.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScodTelemetry {
    /// Buffer compressions, including the final flush.
    pub triggers: usize,
    pub si_calls: usize,
    pub verify_calls: usize,
    pub si_time: Duration,
    pub shrink_time: Duration,
}

/// Sparse co-occurring directions.
///
/// Incoming column pairs are buffered in sparse form. Once either buffer
/// holds `ℓm` nonzeros or `m` columns (`m = max(m_x, m_y)`), the buffer is
/// compressed to a rank-ℓ pair and merged into the sketch by dense
/// shrinkage of the width-2ℓ concatenation.
#[derive(Debug)]
pub struct ScodSketcher {
    config: ScodConfig,
    m: usize,
    sketch: SketchPair,
    buffer: ColumnBufferPair,
    bsi: BsiState,
    rng: Rng,
    telemetry: ScodTelemetry,
}

impl ScodSketcher {
    pub fn new(m_x: usize, m_y: usize, config: ScodConfig) -> Result<Self> {
        let l = config.l;
        if l == 0 || 2 * l > m_x.min(m_y) {
            return Err(Error::InvalidParameter(format!(
                "SCOD needs 1 <= 2l <= min(m_x, m_y) = {}, got l = {l}",
                m_x.min(m_y)
            )));
        }
        let bsi = BsiState::new(config.delta, config.power_constant)?.with_retry_cap(config.retry_cap);
        SiConfig::new(l, BSI_EPSILON, config.power_constant)?;
        Ok(ScodSketcher {
            config,
            m: m_x.max(m_y),
            sketch: SketchPair::zeros(m_x, m_y, l),
            buffer: ColumnBufferPair::new(m_x, m_y),
            bsi,
            rng: Rng::new(config.seed),
            telemetry: ScodTelemetry::default(),
        })
    }

    pub fn config(&self) -> &ScodConfig {
        &self.config
    }

    pub fn telemetry(&self) -> &ScodTelemetry {
        &self.telemetry
    }

    /// Current sketch, not including buffered columns.
    pub fn sketch(&self) -> &SketchPair {
        &self.sketch
    }

    pub fn buffer(&self) -> &ColumnBufferPair {
        &self.buffer
    }

    /// Compresses the buffer and merges it into the sketch.
    fn flush(&mut self) -> Result<()> {
        let (s_x, s_y) = self.buffer.take();
        let l = self.config.l;
        let started = Instant::now();
        let (c_x, c_y) = match self.config.mode {
            ScodMode::Verified => {
                let out = boosted_si(&mut self.bsi, &s_x, &s_y, l, &mut self.rng)?;
                self.telemetry.si_calls += out.attempts;
                self.telemetry.verify_calls += out.verify_calls;
                (out.c_x, out.c_y)
            }
            ScodMode::Practical => {
                let cfg = SiConfig::new(l, BSI_EPSILON, self.config.power_constant)?;
                self.telemetry.si_calls += 1;
                simultaneous_iteration(&s_x, &s_y, &cfg, &mut self.rng)?
            }
        };
        drop((s_x, s_y));
        self.telemetry.si_time += started.elapsed();

        let started = Instant::now();
        let m_x = self.sketch.m_x();
        let m_y = self.sketch.m_y();
        let old = std::mem::replace(&mut self.sketch, SketchPair::zeros(0, 0, 0));
        let (merged, _) = merge_shrink(old, c_x, c_y)?;
        debug_assert_eq!((merged.m_x(), merged.m_y()), (m_x, m_y));
        self.sketch = merged;
        self.telemetry.shrink_time += started.elapsed();
        self.telemetry.triggers += 1;
        Ok(())
    }
}

impl StreamingSketch for ScodSketcher {
    fn update(&mut self, x: SparseColumnView<'_>, y: SparseColumnView<'_>) -> Result<()> {
        check_dim("ScodSketcher::update (x rows)", self.sketch.m_x(), x.n_rows)?;
        check_dim("ScodSketcher::update (y rows)", self.sketch.m_y(), y.n_rows)?;
        self.buffer.append_pair(x, y)?;
        if self.buffer.is_full(self.config.l, self.m) {
            self.flush()?;
        }
        Ok(())
    }

    fn triggers(&self) -> usize {
        self.telemetry.triggers
    }

    fn finalize(mut self) -> Result<SketchPair> {
        if !self.buffer.is_empty() {
            self.flush()?;
        }
        Ok(std::mem::replace(&mut self.sketch, SketchPair::zeros(0, 0, 0)))
    }
}

impl ScodSketcher {
    /// Like [`StreamingSketch::finalize`], also returning the telemetry.
    pub fn finalize_with_telemetry(mut self) -> Result<(SketchPair, ScodTelemetry)> {
        if !self.buffer.is_empty() {
            self.flush()?;
        }
        let telemetry = self.telemetry.clone();
        let sketch = std::mem::replace(&mut self.sketch, SketchPair::zeros(0, 0, 0));
        Ok((sketch, telemetry))
    }
}

/// Runs SCOD over the column streams of `x` and `y`.
pub fn scod_sketch(x: &SparseMatrix, y: &SparseMatrix, config: ScodConfig) -> Result<SketchPair> {
    let sk = ScodSketcher::new(x.n_rows(), y.n_rows(), config)?;
    sketch_stream(sk, x, y)
}
