use crate::dense::{dot, DenseMatrix};
use crate::error::{Error, Result};

use super::qr::orthonormalize;

/// Sweep cap for the one-sided Jacobi iteration.
pub const MAX_SWEEPS: usize = 60;

/// Pairs whose normalized inner product is below this are treated as orthogonal.
const REL_ORTHO_TOL: f64 = 1e-15;

/// Absolute off-diagonal floor, relative to `‖a‖_F`.
const ABS_OFFDIAG_TOL: f64 = 1e-12;

/// Thin SVD `a = u · diag(sigma) · vᵀ` with `sigma` non-increasing.
///
/// For an `m × n` input with `k = min(m, n)`: `u` is `m × k`, `sigma` has
/// length `k` and `v` is `n × k`.
#[derive(Debug, Clone)]
pub struct SvdResult {
    pub u: DenseMatrix,
    pub sigma: Vec<f64>,
    pub v: DenseMatrix,
}

impl SvdResult {
    /// `u · diag(sigma) · vᵀ`.
    pub fn reconstruct(&self) -> DenseMatrix {
        let mut us = self.u.clone();
        for (j, &s) in self.sigma.iter().enumerate() {
            us.scale_col(j, s);
        }
        us.matmul_nt(&self.v).expect("consistent factors")
    }
}

/// SVD by one-sided (Hestenes) Jacobi rotations with cyclic pair order.
///
/// Meant for the small cores the sketches produce; cost is cubic per sweep.
/// Fails with [`Error::NoConvergence`] if [`MAX_SWEEPS`] sweeps still rotate.
pub fn svd_small(a: &DenseMatrix) -> Result<SvdResult> {
    if !a.is_finite() {
        return Err(Error::NonFinite("svd_small"));
    }
    if a.n_rows() < a.n_cols() {
        let t = svd_small(&a.transpose())?;
        return Ok(SvdResult {
            u: t.v,
            sigma: t.sigma,
            v: t.u,
        });
    }
    let n = a.n_cols();
    let mut w = a.clone();
    let mut v = DenseMatrix::identity(n);
    let abs_floor = (ABS_OFFDIAG_TOL * a.frobenius_norm()).powi(2);

    let mut norms: Vec<f64> = (0..n).map(|j| dot(w.col(j), w.col(j))).collect();
    let mut converged = n < 2;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = norms[p];
                let beta = norms[q];
                let gamma = dot(w.col(p), w.col(q));
                if gamma == 0.0
                    || gamma.abs() <= REL_ORTHO_TOL * (alpha * beta).sqrt()
                    || gamma.abs() <= abs_floor
                {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut w, p, q, c, s);
                rotate(&mut v, p, q, c, s);
                norms[p] = alpha - t * gamma;
                norms[q] = beta + t * gamma;
            }
        }
        if !rotated {
            converged = true;
            break;
        }
        for (j, nj) in norms.iter_mut().enumerate() {
            *nj = dot(w.col(j), w.col(j));
        }
    }
    if !converged {
        return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
    }

    let raw: Vec<f64> = (0..n).map(|j| dot(w.col(j), w.col(j)).sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    // stable: equal values keep sweep order
    order.sort_by(|&i, &j| raw[j].partial_cmp(&raw[i]).expect("finite"));

    let m = w.n_rows();
    let mut u = DenseMatrix::zeros(m, n);
    let mut vs = DenseMatrix::zeros(n, n);
    let mut sigma = Vec::with_capacity(n);
    for (dst, &src) in order.iter().enumerate() {
        let s = raw[src];
        sigma.push(s);
        if s > 0.0 {
            let inv = 1.0 / s;
            for (o, &x) in u.col_mut(dst).iter_mut().zip(w.col(src)) {
                *o = x * inv;
            }
        }
        vs.col_mut(dst).copy_from_slice(v.col(src));
    }
    // zero columns get completed; tiny ones get re-orthogonalized
    let u = orthonormalize(&u)?;
    Ok(SvdResult { u, sigma, v: vs })
}

fn rotate(a: &mut DenseMatrix, p: usize, q: usize, c: f64, s: f64) {
    let (cp, cq) = a.col_pair_mut(p, q);
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let xp = *x;
        let xq = *y;
        *x = c * xp - s * xq;
        *y = s * xp + c * xq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_input() {
        let a = DenseMatrix::diag(&[3.0, 1.0]);
        let r = svd_small(&a).unwrap();
        assert_eq!(r.sigma, vec![3.0, 1.0]);
        assert!(r.u.max_abs_diff(&DenseMatrix::identity(2)) < 1e-15);
        assert!(r.v.max_abs_diff(&DenseMatrix::identity(2)) < 1e-15);
    }

    #[test]
    fn unsorted_diagonal_gets_sorted() {
        let a = DenseMatrix::diag(&[1.0, 4.0, 2.0]);
        let r = svd_small(&a).unwrap();
        assert_eq!(r.sigma, vec![4.0, 2.0, 1.0]);
        assert!(r.reconstruct().max_abs_diff(&a) < 1e-15);
    }

    #[test]
    fn zero_input() {
        let r = svd_small(&DenseMatrix::zeros(3, 3)).unwrap();
        assert_eq!(r.sigma, vec![0.0; 3]);
        assert!(r.u.matmul_tn(&r.u).unwrap().max_abs_diff(&DenseMatrix::identity(3)) < 1e-15);
        assert!(r.reconstruct().is_zero());
    }

    #[test]
    fn rectangular_both_ways() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.5]]).unwrap();
        for m in [a.clone(), a.transpose()] {
            let r = svd_small(&m).unwrap();
            assert_eq!(r.sigma.len(), 2);
            assert!(r.reconstruct().max_abs_diff(&m) < 1e-13);
        }
    }

    #[test]
    fn non_finite_is_rejected() {
        let mut a = DenseMatrix::zeros(2, 2);
        a[(1, 0)] = f64::NAN;
        assert!(svd_small(&a).is_err());
    }
}
