use crate::dense::{axpy, dot, norm2, DenseMatrix};
use crate::error::{Error, Result};

/// Thin QR factors: `q` is `m × n` with orthonormal columns, `r` is `n × n`
/// upper triangular with a non-negative diagonal.
#[derive(Debug, Clone)]
pub struct QrResult {
    pub q: DenseMatrix,
    pub r: DenseMatrix,
}

/// Householder thin QR of a tall matrix (`m ≥ n`), no pivoting.
///
/// Rank-deficient inputs are fine: the corresponding rows of `r` come out
/// (numerically) zero and `q` stays orthonormal.
pub fn thin_qr(a: &DenseMatrix) -> Result<QrResult> {
    let (m, n) = a.shape();
    if m < n {
        return Err(Error::InvalidParameter(format!(
            "thin_qr needs rows >= cols, got {m}x{n}"
        )));
    }
    if !a.is_finite() {
        return Err(Error::NonFinite("thin_qr"));
    }
    let mut work = a.clone();
    let mut taus = vec![0.0; n];
    let mut v = Vec::with_capacity(m);

    for (k, slot) in taus.iter_mut().enumerate() {
        let tau = householder(&mut work.col_mut(k)[k..]);
        *slot = tau;
        if tau == 0.0 {
            continue;
        }
        v.clear();
        v.push(1.0);
        v.extend_from_slice(&work.col(k)[k + 1..]);
        for j in k + 1..n {
            let cj = &mut work.col_mut(j)[k..];
            let w = tau * dot(&v, cj);
            axpy(-w, &v, cj);
        }
    }

    let mut r = DenseMatrix::zeros(n, n);
    for j in 0..n {
        r.col_mut(j)[..=j].copy_from_slice(&work.col(j)[..=j]);
    }

    // accumulate Q = H_0 H_1 ... H_{n-1} applied to the first n columns of I
    let mut q = DenseMatrix::zeros(m, n);
    for j in 0..n {
        q[(j, j)] = 1.0;
    }
    for k in (0..n).rev() {
        let tau = taus[k];
        if tau == 0.0 {
            continue;
        }
        v.clear();
        v.push(1.0);
        v.extend_from_slice(&work.col(k)[k + 1..]);
        for j in k..n {
            let cj = &mut q.col_mut(j)[k..];
            let w = tau * dot(&v, cj);
            axpy(-w, &v, cj);
        }
    }

    for k in 0..n {
        if r[(k, k)] < 0.0 {
            for j in k..n {
                r[(k, j)] = -r[(k, j)];
            }
            q.scale_col(k, -1.0);
        }
    }
    Ok(QrResult { q, r })
}

/// Turns `x` into `[beta, v_1..]` in place and returns `tau`, so that
/// `(I - tau v vᵀ) x = beta e_1` with `v = [1, v_1..]`.
fn householder(x: &mut [f64]) -> f64 {
    let alpha = x[0];
    let tail = norm2(&x[1..]);
    if tail == 0.0 {
        return 0.0;
    }
    let beta = -alpha.signum() * alpha.hypot(tail);
    let tau = (beta - alpha) / beta;
    let scale = 1.0 / (alpha - beta);
    for xi in &mut x[1..] {
        *xi *= scale;
    }
    x[0] = beta;
    tau
}

/// Relative residual below which a column counts as linearly dependent.
const DEPENDENT_TOL: f64 = 1e-10;

/// Orthonormal basis whose span contains the column span of `k`, with the
/// same number of columns.
///
/// Classical Gram-Schmidt with a second pass. A column whose residual falls
/// below `1e-10` of its original norm is replaced by the standard basis vector
/// with the largest component outside the accepted columns (lowest index on
/// ties), orthogonalized the same way.
pub fn orthonormalize(k: &DenseMatrix) -> Result<DenseMatrix> {
    let (m, n) = k.shape();
    if m < n {
        return Err(Error::InvalidParameter(format!(
            "orthonormalize needs rows >= cols, got {m}x{n}"
        )));
    }
    if !k.is_finite() {
        return Err(Error::NonFinite("orthonormalize"));
    }
    let mut q = DenseMatrix::zeros(m, n);
    let mut v = vec![0.0; m];
    for j in 0..n {
        v.copy_from_slice(k.col(j));
        let orig = norm2(&v);
        project_out(&q, j, &mut v);
        let mut nrm = norm2(&v);
        if nrm <= DEPENDENT_TOL * orig || nrm == 0.0 {
            let e = least_covered_axis(&q, j);
            v.iter_mut().for_each(|x| *x = 0.0);
            v[e] = 1.0;
            project_out(&q, j, &mut v);
            nrm = norm2(&v);
        }
        let inv = 1.0 / nrm;
        for (dst, &src) in q.col_mut(j).iter_mut().zip(&v) {
            *dst = src * inv;
        }
    }
    Ok(q)
}

/// Two Gram-Schmidt passes against the first `count` columns of `q`.
fn project_out(q: &DenseMatrix, count: usize, v: &mut [f64]) {
    for _ in 0..2 {
        for i in 0..count {
            let qi = q.col(i);
            let c = dot(qi, v);
            axpy(-c, qi, v);
        }
    }
}

fn least_covered_axis(q: &DenseMatrix, count: usize) -> usize {
    let m = q.n_rows();
    let mut covered = vec![0.0; m];
    for i in 0..count {
        for (c, &x) in covered.iter_mut().zip(q.col(i)) {
            *c += x * x;
        }
    }
    let mut best = 0;
    for i in 1..m {
        if covered[i] < covered[best] {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn orthonormality_error(q: &DenseMatrix) -> f64 {
        let g = q.matmul_tn(q).unwrap();
        g.max_abs_diff(&DenseMatrix::identity(q.n_cols()))
    }

    #[test]
    fn identity_factors_trivially() {
        let a = DenseMatrix::identity(4);
        let QrResult { q, r } = thin_qr(&a).unwrap();
        assert!(q.max_abs_diff(&a) < 1e-15);
        assert!(r.max_abs_diff(&a) < 1e-15);
    }

    #[test]
    fn single_column_normalizes() {
        let a = DenseMatrix::from_col_major(2, 1, vec![3.0, 4.0]).unwrap();
        let QrResult { q, r } = thin_qr(&a).unwrap();
        assert!((q[(0, 0)] - 0.6).abs() < 1e-15);
        assert!((q[(1, 0)] - 0.8).abs() < 1e-15);
        assert!((r[(0, 0)] - 5.0).abs() < 1e-14);
    }

    #[test]
    fn rank_deficient_gives_zero_rows() {
        let a = DenseMatrix::from_rows(&[
            vec![1.0, 2.0, 0.0],
            vec![2.0, 4.0, 1.0],
            vec![3.0, 6.0, 0.0],
            vec![4.0, 8.0, 0.0],
        ])
        .unwrap();
        let QrResult { q, r } = thin_qr(&a).unwrap();
        assert!(orthonormality_error(&q) < 1e-12);
        assert!(r[(1, 1)].abs() < 1e-12);
        assert!(q.matmul(&r).unwrap().max_abs_diff(&a) < 1e-12);
        for i in 0..3 {
            for j in 0..i {
                assert_eq!(r[(i, j)], 0.0);
            }
        }
    }

    #[test]
    fn qr_rejects_wide_and_non_finite() {
        assert!(thin_qr(&DenseMatrix::zeros(2, 3)).is_err());
        let mut a = DenseMatrix::zeros(3, 2);
        a[(0, 0)] = f64::INFINITY;
        assert_eq!(thin_qr(&a).unwrap_err(), Error::NonFinite("thin_qr"));
    }

    #[test]
    fn zero_matrix_qr() {
        let QrResult { q, r } = thin_qr(&DenseMatrix::zeros(5, 3)).unwrap();
        assert!(orthonormality_error(&q) < 1e-15);
        assert!(r.is_zero());
    }

    #[test]
    fn orthonormalize_identical_columns() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 1.0], vec![2.0, 2.0], vec![2.0, 2.0]]).unwrap();
        let q = orthonormalize(&a).unwrap();
        assert!(orthonormality_error(&q) < 1e-14);
        let expect = [1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0];
        for i in 0..3 {
            assert!((q[(i, 0)] - expect[i]).abs() < 1e-15);
        }
        // first axis has the least coverage (1/9) so e_0 is completed
        let e0 = [1.0 - 1.0 / 9.0, -2.0 / 9.0, -2.0 / 9.0];
        let nrm = norm2(&e0);
        for i in 0..3 {
            assert!((q[(i, 1)] - e0[i] / nrm).abs() < 1e-14);
        }
    }

    #[test]
    fn orthonormalize_zero_input_gives_axes() {
        let q = orthonormalize(&DenseMatrix::zeros(4, 2)).unwrap();
        assert_eq!(q.col(0), &[1.0, 0.0, 0.0, 0.0]);
        assert_eq!(q.col(1), &[0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn orthonormalize_keeps_orthonormal_input() {
        let a = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap();
        let q = orthonormalize(&a).unwrap();
        assert!(q.max_abs_diff(&a) < 1e-15);
    }
}
