use crate::dense::{norm2, DenseMatrix};
use crate::error::{check_dim, Error, Result};
use crate::linalg::Rng;
use crate::sparse::SparseMatrix;

use super::si::{simultaneous_iteration, SiConfig};

/// Accuracy used for every SI call made by boosted SI.
pub const BSI_EPSILON: f64 = 0.1;

/// Default bound on SI candidates per boosted invocation.
pub const DEFAULT_RETRY_CAP: usize = 64;

/// State carried across boosted-SI invocations: the invocation counter `j`
/// and the fixed configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct BsiState {
    invocations: u64,
    delta: f64,
    power_constant: f64,
    retry_cap: usize,
}

/// What one boosted-SI invocation produced.
#[derive(Debug, Clone)]
pub struct BsiOutcome {
    pub c_x: DenseMatrix,
    pub c_y: DenseMatrix,
    /// SI candidates drawn, including the accepted one.
    pub attempts: usize,
    /// Residual checks run (equals `attempts` unless Δ was zero).
    pub verify_calls: usize,
    /// Power `p` used by the residual check.
    pub power: u32,
    /// The normalizer Δ.
    pub delta_scale: f64,
}

impl BsiState {
    pub fn new(delta: f64, power_constant: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "failure probability must lie in (0, 1), got {delta}"
            )));
        }
        if !(power_constant > 0.0 && power_constant.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "power constant must be positive, got {power_constant}"
            )));
        }
        Ok(BsiState {
            invocations: 0,
            delta,
            power_constant,
            retry_cap: DEFAULT_RETRY_CAP,
        })
    }

    pub fn with_retry_cap(mut self, cap: usize) -> Self {
        self.retry_cap = cap.max(1);
        self
    }

    /// Invocations started so far.
    pub fn invocations(&self) -> u64 {
        self.invocations
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }
}

/// Power used by the residual check at invocation `j` (1-based):
/// `⌈ln(2 j² √(m_x e) / δ)⌉`.
pub fn verification_power(j: u64, m_x: usize, delta: f64) -> u32 {
    let j = j as f64;
    let arg = 2.0 * j * j * (m_x as f64 * std::f64::consts::E).sqrt() / delta;
    arg.ln().ceil().max(1.0) as u32
}

/// `Δ = 11 / (10ℓ) · Σ_i ‖S_X,i‖ ‖S_Y,i‖`.
pub fn residual_scale(s_x: &SparseMatrix, s_y: &SparseMatrix, l: usize) -> f64 {
    let sum: f64 = s_x
        .columns()
        .zip(s_y.columns())
        .map(|(x, y)| x.norm() * y.norm())
        .sum();
    11.0 / (10.0 * l as f64) * sum
}

/// Randomized check that `‖S_X S_Yᵀ - C_X C_Yᵀ‖` is at most Δ.
///
/// With `C = (S_X S_Yᵀ - C_X C_Yᵀ) / Δ`, draws a Gaussian `x` and accepts when
/// `‖(C Cᵀ)^p x‖ ≤ ‖x‖`. `C` is applied through matrix-vector products only.
/// Since `log ‖(C Cᵀ)^k x‖` is convex in `k`, the check rejects as soon as an
/// intermediate power exceeds `‖x‖`.
#[allow(clippy::too_many_arguments)]
pub fn verify_residual(
    s_x: &SparseMatrix,
    s_y: &SparseMatrix,
    c_x: &DenseMatrix,
    c_y: &DenseMatrix,
    delta_scale: f64,
    p: u32,
    rng: &mut Rng,
) -> Result<bool> {
    check_dim("verify_residual (S columns)", s_x.n_cols(), s_y.n_cols())?;
    check_dim("verify_residual (C widths)", c_x.n_cols(), c_y.n_cols())?;
    check_dim("verify_residual (C_X rows)", s_x.n_rows(), c_x.n_rows())?;
    check_dim("verify_residual (C_Y rows)", s_y.n_rows(), c_y.n_rows())?;
    if delta_scale.is_nan() || delta_scale <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "residual scale must be positive, got {delta_scale}"
        )));
    }
    let inv = 1.0 / delta_scale;
    let apply_ct = |u: &[f64]| -> Result<Vec<f64>> {
        let mut a = s_y.matvec(&s_x.matvec_t(u)?)?;
        let b = c_y.matvec(&c_x.matvec_t(u)?)?;
        for (ai, bi) in a.iter_mut().zip(&b) {
            *ai = (*ai - bi) * inv;
        }
        Ok(a)
    };
    let apply_c = |v: &[f64]| -> Result<Vec<f64>> {
        let mut a = s_x.matvec(&s_y.matvec_t(v)?)?;
        let b = c_x.matvec(&c_y.matvec_t(v)?)?;
        for (ai, bi) in a.iter_mut().zip(&b) {
            *ai = (*ai - bi) * inv;
        }
        Ok(a)
    };

    let x = rng.normal_vec(s_x.n_rows());
    let x_norm = norm2(&x);
    let mut z = x;
    for _ in 0..p {
        z = apply_c(&apply_ct(&z)?)?;
        if norm2(&z) > x_norm {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Boosted simultaneous iteration: draws SI candidates at ε = 1/10 until one
/// passes [`verify_residual`], so that the returned pair satisfies
/// `‖S_X S_Yᵀ - C_X C_Yᵀ‖ ≤ Δ` with high probability.
///
/// Fails with [`Error::RetryCapExceeded`] after the state's retry cap.
pub fn boosted_si(
    state: &mut BsiState,
    s_x: &SparseMatrix,
    s_y: &SparseMatrix,
    l: usize,
    rng: &mut Rng,
) -> Result<BsiOutcome> {
    check_dim("boosted_si (columns)", s_x.n_cols(), s_y.n_cols())?;
    state.invocations += 1;
    let j = state.invocations;
    let (m_x, m_y) = (s_x.n_rows(), s_y.n_rows());
    let power = verification_power(j, m_x, state.delta);
    let delta_scale = residual_scale(s_x, s_y, l);
    if delta_scale == 0.0 {
        return Ok(BsiOutcome {
            c_x: DenseMatrix::zeros(m_x, l),
            c_y: DenseMatrix::zeros(m_y, l),
            attempts: 0,
            verify_calls: 0,
            power,
            delta_scale,
        });
    }
    let cfg = SiConfig::new(l, BSI_EPSILON, state.power_constant)?;
    for attempt in 1..=state.retry_cap {
        let (c_x, c_y) = simultaneous_iteration(s_x, s_y, &cfg, rng)?;
        if verify_residual(s_x, s_y, &c_x, &c_y, delta_scale, power, rng)? {
            return Ok(BsiOutcome {
                c_x,
                c_y,
                attempts: attempt,
                verify_calls: attempt,
                power,
                delta_scale,
            });
        }
    }
    Err(Error::RetryCapExceeded {
        attempts: state.retry_cap,
        invocation: j,
    })
}
