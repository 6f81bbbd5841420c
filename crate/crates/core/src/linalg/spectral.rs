use crate::dense::norm2;

use super::rng::Rng;

pub const DEFAULT_POWER_TOL: f64 = 1e-6;
pub const DEFAULT_POWER_MAX_ITER: usize = 2000;

/// Result of [`spectral_norm_implicit`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralEstimate {
    pub value: f64,
    pub iterations: usize,
    /// `false` when `max_iter` ran out before the stopping rule fired; `value`
    /// is then the best iterate, which never overestimates the norm.
    pub converged: bool,
}

/// Largest singular value of an operator given only through `v ↦ A v`
/// (`cols → rows`) and `u ↦ Aᵀ u` (`rows → cols`).
///
/// Power iteration on `AᵀA` from a Gaussian start; stops once the estimate
/// `‖A v‖` changes by at most `tol` relative between iterations.
pub fn spectral_norm_implicit<F, G>(
    apply: F,
    apply_t: G,
    rows: usize,
    cols: usize,
    rng: &mut Rng,
    tol: f64,
    max_iter: usize,
) -> SpectralEstimate
where
    F: Fn(&[f64]) -> Vec<f64>,
    G: Fn(&[f64]) -> Vec<f64>,
{
    assert!(tol > 0.0, "tolerance must be positive");
    if rows == 0 || cols == 0 {
        return SpectralEstimate {
            value: 0.0,
            iterations: 0,
            converged: true,
        };
    }
    let mut v = rng.normal_vec(cols);
    let n0 = norm2(&v);
    v.iter_mut().for_each(|x| *x /= n0);

    let mut best = 0.0f64;
    let mut prev = f64::NAN;
    for it in 1..=max_iter.max(1) {
        let w = apply(&v);
        debug_assert_eq!(w.len(), rows);
        let sigma = norm2(&w);
        best = best.max(sigma);
        if sigma == 0.0 {
            return SpectralEstimate {
                value: best,
                iterations: it,
                converged: true,
            };
        }
        if (sigma - prev).abs() <= tol * sigma {
            return SpectralEstimate {
                value: best,
                iterations: it,
                converged: true,
            };
        }
        prev = sigma;
        let z = apply_t(&w);
        let zn = norm2(&z);
        if zn == 0.0 {
            return SpectralEstimate {
                value: best,
                iterations: it,
                converged: true,
            };
        }
        v = z.into_iter().map(|x| x / zn).collect();
    }
    SpectralEstimate {
        value: best,
        iterations: max_iter,
        converged: false,
    }
}
