//! Spectral-norm error metrics evaluated through implicit operators.

use scod_core::dense::DenseMatrix;
use scod_core::linalg::{
    spectral_norm_implicit, svd_small, thin_qr, Rng, SpectralEstimate, DEFAULT_POWER_MAX_ITER,
    DEFAULT_POWER_TOL,
};
use scod_core::{SketchPair, SparseMatrix};

use crate::error::{BenchError, Result};

/// Settings shared by the error metrics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsContext {
    /// Rank of the projection in [`projection_error`].
    pub k: usize,
    pub tol: f64,
    pub max_iter: usize,
    /// Seed of the power-iteration start vector.
    pub seed: u64,
}

impl Default for MetricsContext {
    fn default() -> Self {
        MetricsContext {
            k: 8,
            tol: DEFAULT_POWER_TOL,
            max_iter: DEFAULT_POWER_MAX_ITER,
            seed: 0x5eed,
        }
    }
}

impl MetricsContext {
    /// Copy with `k` capped at `ℓ/2` (at least one).
    pub fn for_width(&self, l: usize) -> Self {
        MetricsContext {
            k: self.k.min((l / 2).max(1)),
            ..*self
        }
    }
}

fn check_shapes(x: &SparseMatrix, y: &SparseMatrix, s: &SketchPair) -> Result<()> {
    if x.n_cols() != y.n_cols() || s.m_x() != x.n_rows() || s.m_y() != y.n_rows() {
        return Err(BenchError::Data(format!(
            "shape mismatch: X {}x{}, Y {}x{}, sketch {}x{} / {}x{}",
            x.n_rows(),
            x.n_cols(),
            y.n_rows(),
            y.n_cols(),
            s.m_x(),
            s.width(),
            s.m_y(),
            s.width()
        )));
    }
    Ok(())
}

fn sub_in_place(a: &mut [f64], b: &[f64]) {
    a.iter_mut().zip(b).for_each(|(x, y)| *x -= y);
}

/// `‖X Yᵀ - B_X B_Yᵀ‖` by power iteration on the difference operator.
pub fn approx_error(
    x: &SparseMatrix,
    y: &SparseMatrix,
    sketch: &SketchPair,
    ctx: &MetricsContext,
) -> Result<SpectralEstimate> {
    check_shapes(x, y, sketch)?;
    let apply = |v: &[f64]| {
        let mut a = x.matvec(&y.matvec_t(v).unwrap()).unwrap();
        sub_in_place(&mut a, &sketch.apply(v).unwrap());
        a
    };
    let apply_t = |u: &[f64]| {
        let mut a = y.matvec(&x.matvec_t(u).unwrap()).unwrap();
        sub_in_place(&mut a, &sketch.apply_t(u).unwrap());
        a
    };
    Ok(spectral_norm_implicit(
        apply,
        apply_t,
        x.n_rows(),
        y.n_rows(),
        &mut Rng::new(ctx.seed),
        ctx.tol,
        ctx.max_iter,
    ))
}

/// Top singular vectors `(Ū, V̄)` of `B_X B_Yᵀ`, at most `k` of them and only
/// those with a nonzero singular value.
pub fn top_singular_vectors(sketch: &SketchPair, k: usize) -> Result<(DenseMatrix, DenseMatrix)> {
    let qx = thin_qr(&sketch.b_x)?;
    let qy = thin_qr(&sketch.b_y)?;
    let core = qx.r.matmul_nt(&qy.r)?;
    let svd = svd_small(&core)?;
    let scale = svd.sigma.first().copied().unwrap_or(0.0);
    let rank = svd
        .sigma
        .iter()
        .take(k)
        .take_while(|&&s| s > 1e-14 * scale && s > 0.0)
        .count();
    let u = qx.q.matmul(&svd.u.columns(0..rank))?;
    let v = qy.q.matmul(&svd.v.columns(0..rank))?;
    Ok((u, v))
}

/// `‖X Yᵀ - π_Ū(X) π_V̄(Y)ᵀ‖` with `Ū, V̄` the top-`k` singular vectors of
/// the sketch product.
pub fn projection_error(
    x: &SparseMatrix,
    y: &SparseMatrix,
    sketch: &SketchPair,
    ctx: &MetricsContext,
) -> Result<SpectralEstimate> {
    check_shapes(x, y, sketch)?;
    if ctx.k == 0 || ctx.k > sketch.width() {
        return Err(BenchError::Config(format!(
            "projection rank {} must lie in 1..={}",
            ctx.k,
            sketch.width()
        )));
    }
    let (u, v) = top_singular_vectors(sketch, ctx.k)?;
    // Ū Ūᵀ X Yᵀ V̄ V̄ᵀ = Ū M V̄ᵀ with M = (XᵀŪ)ᵀ (YᵀV̄)
    let xu = x.mul_dense_t(&u)?;
    let yv = y.mul_dense_t(&v)?;
    let m = xu.matmul_tn(&yv)?;
    let apply = |w: &[f64]| {
        let mut a = x.matvec(&y.matvec_t(w).unwrap()).unwrap();
        let p = u.matvec(&m.matvec(&v.matvec_t(w).unwrap()).unwrap()).unwrap();
        sub_in_place(&mut a, &p);
        a
    };
    let apply_t = |z: &[f64]| {
        let mut a = y.matvec(&x.matvec_t(z).unwrap()).unwrap();
        let p = v.matvec(&m.matvec_t(&u.matvec_t(z).unwrap()).unwrap()).unwrap();
        sub_in_place(&mut a, &p);
        a
    };
    Ok(spectral_norm_implicit(
        apply,
        apply_t,
        x.n_rows(),
        y.n_rows(),
        &mut Rng::new(ctx.seed),
        ctx.tol,
        ctx.max_iter,
    ))
}

/// `‖a‖_F² / ‖a‖²`.
pub fn stable_rank(a: &SparseMatrix, ctx: &MetricsContext) -> Result<f64> {
    let fro = a.frobenius_norm();
    if fro == 0.0 {
        return Err(BenchError::Numerical("stable rank of a zero matrix".into()));
    }
    let est = spectral_norm_implicit(
        |v| a.matvec(v).unwrap(),
        |u| a.matvec_t(u).unwrap(),
        a.n_rows(),
        a.n_cols(),
        &mut Rng::new(ctx.seed),
        ctx.tol,
        ctx.max_iter,
    );
    Ok((fro / est.value).powi(2))
}
