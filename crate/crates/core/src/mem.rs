//! Per-thread accounting of scalars held by matrix containers.
//!
//! Every [`DenseMatrix`](crate::DenseMatrix), [`SparseMatrix`](crate::SparseMatrix)
//! and [`ColumnBufferPair`](crate::ColumnBufferPair) reports the number of `f64`
//! values it owns when it is created, grown or dropped. [`PeakScope`] reads the
//! high-water mark relative to the live count at the moment the scope opened,
//! which is how the sketchers' auxiliary memory is measured.
//!
//! Index arrays are not counted; only stored real scalars are.

use std::cell::Cell;

thread_local! {
    static LIVE: Cell<isize> = const { Cell::new(0) };
    static PEAK: Cell<isize> = const { Cell::new(0) };
}

pub(crate) fn track_alloc(n: usize) {
    if n == 0 {
        return;
    }
    LIVE.with(|live| {
        let now = live.get() + n as isize;
        live.set(now);
        PEAK.with(|peak| {
            if now > peak.get() {
                peak.set(now);
            }
        });
    });
}

pub(crate) fn track_free(n: usize) {
    if n == 0 {
        return;
    }
    LIVE.with(|live| live.set(live.get() - n as isize));
}

/// Scalars currently held by tracked containers on this thread.
pub fn live_scalars() -> isize {
    LIVE.with(|l| l.get())
}

/// Measures the peak number of tracked scalars allocated on the current
/// thread since the scope was opened, net of what was live at that point.
///
/// Scopes nest: an inner scope folds its high-water mark back into the
/// enclosing one when dropped.
#[derive(Debug)]
pub struct PeakScope {
    base: isize,
    outer_peak: isize,
}

impl PeakScope {
    pub fn start() -> Self {
        let base = live_scalars();
        let outer_peak = PEAK.with(|p| p.replace(base));
        PeakScope { base, outer_peak }
    }

    /// Highest number of additional scalars held at any instant so far.
    pub fn peak(&self) -> usize {
        let peak = PEAK.with(|p| p.get());
        (peak - self.base).max(0) as usize
    }

    /// Additional scalars held right now.
    pub fn current(&self) -> isize {
        live_scalars() - self.base
    }
}

impl Drop for PeakScope {
    fn drop(&mut self) {
        PEAK.with(|p| p.set(p.get().max(self.outer_peak)));
    }
}
