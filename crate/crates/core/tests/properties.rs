mod common;

use common::*;
use proptest::prelude::*;
use scod_core::linalg::{svd_small, thin_qr};
use scod_core::mtx::{read_mtx, write_mtx};
use scod_core::sparse::buffer_full;
use scod_core::{cod_sketch, dense_shrink, ColumnBufferPair, DenseMatrix, SparseColumn, SparseMatrix};

fn dense(rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> impl Strategy<Value = DenseMatrix> {
    (rows, cols).prop_flat_map(|(r, c)| {
        prop::collection::vec(-10.0f64..10.0, r * c)
            .prop_map(move |v| DenseMatrix::from_col_major(r, c, v).unwrap())
    })
}

fn sparse(max_rows: usize, max_cols: usize) -> impl Strategy<Value = SparseMatrix> {
    (1..max_rows, 1..max_cols).prop_flat_map(|(r, c)| {
        prop::collection::vec((0..r, 0..c, -5.0f64..5.0), 0..(r * c).min(60))
            .prop_map(move |t| SparseMatrix::from_triplets(r, c, &t).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn csc_invariants_hold(a in sparse(30, 30)) {
        let off = a.col_offsets();
        prop_assert_eq!(off[0], 0);
        prop_assert_eq!(off[a.n_cols()], a.nnz());
        prop_assert!(off.windows(2).all(|w| w[0] <= w[1]));
        for c in a.columns() {
            prop_assert!(c.row_indices.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(c.row_indices.iter().all(|&i| i < a.n_rows()));
            prop_assert!(c.values.iter().all(|&v| v != 0.0));
        }
    }

    #[test]
    fn columns_round_trip(a in sparse(30, 30)) {
        let cols: Vec<SparseColumn> = a.columns().map(|c| c.to_owned()).collect();
        let b = SparseMatrix::from_columns(a.n_rows(), cols.iter().map(|c| c.view())).unwrap();
        prop_assert_eq!(&a, &b);
        for (c, d) in cols.iter().zip(b.columns()) {
            prop_assert_eq!(c.view(), d);
        }
    }

    #[test]
    fn matvec_matches_dense(a in sparse(40, 40), seed in any::<u64>()) {
        let mut rng = scod_core::Rng::new(seed);
        let v = rng.normal_vec(a.n_cols());
        let got = a.matvec(&v).unwrap();
        let want = na_sparse(&a) * nalgebra::DVector::from_vec(v);
        let scale = want.norm().max(1e-300);
        for (g, w) in got.iter().zip(want.iter()) {
            prop_assert!((g - w).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn transpose_is_involution(a in sparse(30, 30)) {
        prop_assert_eq!(a.transpose().transpose(), a.clone());
        prop_assert_eq!(a.transpose().to_dense(), a.to_dense().transpose());
    }

    #[test]
    fn mtx_round_trip(a in sparse(30, 30)) {
        let mut buf = Vec::new();
        write_mtx(&a, &mut buf).unwrap();
        prop_assert_eq!(read_mtx(buf.as_slice()).unwrap(), a);
    }

    #[test]
    fn buffer_full_is_monotone(
        l in 1usize..6,
        m in 1usize..12,
        nnz in prop::collection::vec((0usize..12, 0usize..12), 1..30),
    ) {
        let mut buf = ColumnBufferPair::new(12, 12);
        let mut full = false;
        for (a, b) in nnz {
            let x = SparseColumn::new(12, (0..a).collect(), vec![1.0; a]).unwrap();
            let y = SparseColumn::new(12, (0..b).collect(), vec![1.0; b]).unwrap();
            buf.append_pair(x.view(), y.view()).unwrap();
            let now = buf.is_full(l, m);
            prop_assert!(!full || now);
            prop_assert_eq!(now, buffer_full(buf.nnz_x(), buf.nnz_y(), buf.n_cols(), l, m));
            full = now;
        }
    }

    #[test]
    fn shrinkage_identity(
        half in 1usize..5,
        extra_x in 0usize..10,
        extra_y in 0usize..10,
        seed in any::<u64>(),
    ) {
        let w = 2 * half;
        let mut rng = scod_core::Rng::new(seed);
        let b_x = random_dense(w + extra_x, w, &mut rng);
        let b_y = random_dense(w + extra_y, w, &mut rng);
        let before = singular_values(&(na(&b_x) * na(&b_y).transpose()));
        let (out, rep) = dense_shrink(&b_x, &b_y).unwrap();
        let after = singular_values(&sketch_product(&out));
        let gamma = before[half - 1];
        let scale = before[0];
        prop_assert!((rep.gamma - gamma).abs() <= 1e-10 * scale);
        for i in 0..w {
            prop_assert!((after[i] - (before[i] - gamma).max(0.0)).abs() <= 1e-8 * scale);
        }
        prop_assert!(rep.nuclear_after <= rep.nuclear_before - half as f64 * rep.gamma + 1e-8 * scale);
    }

    #[test]
    fn cod_exact_for_short_streams(x in sparse(20, 8), seed in any::<u64>()) {
        let mut rng = scod_core::Rng::new(seed);
        let y = random_sparse(16, x.n_cols(), 0.4, &mut rng);
        let l = 8;
        prop_assume!(x.n_rows() >= l);
        let s = cod_sketch(&x, &y, l).unwrap();
        let exact = product(&x, &y);
        let diff = (sketch_product(&s) - &exact).norm();
        prop_assert!(diff <= 1e-10 * exact.norm().max(1e-300));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn qr_reconstructs(a in dense(1..200, 1..64).prop_filter("tall", |a| a.n_rows() >= a.n_cols())) {
        let qr = thin_qr(&a).unwrap();
        let scale = a.frobenius_norm().max(1.0);
        prop_assert!(qr.q.matmul(&qr.r).unwrap().max_abs_diff(&a) <= 1e-12 * scale);
        let g = qr.q.matmul_tn(&qr.q).unwrap();
        prop_assert!(g.max_abs_diff(&DenseMatrix::identity(a.n_cols())) <= 1e-12);
        for j in 0..a.n_cols() {
            prop_assert!(qr.r[(j, j)] >= 0.0);
            for i in j + 1..a.n_cols() {
                prop_assert_eq!(qr.r[(i, j)], 0.0);
            }
        }
    }

    #[test]
    fn svd_reconstructs_and_sorts(a in dense(1..64, 1..64)) {
        let s = svd_small(&a).unwrap();
        let scale = a.frobenius_norm().max(1.0);
        prop_assert!(s.reconstruct().max_abs_diff(&a) <= 1e-11 * scale);
        prop_assert!(s.sigma.windows(2).all(|w| w[0] >= w[1]));
        let k = s.sigma.len();
        prop_assert!(s.u.matmul_tn(&s.u).unwrap().max_abs_diff(&DenseMatrix::identity(k)) <= 1e-11);
        prop_assert!(s.v.matmul_tn(&s.v).unwrap().max_abs_diff(&DenseMatrix::identity(k)) <= 1e-11);
    }
}
