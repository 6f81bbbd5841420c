//! Acceptance suite. Every test writes one `PASS`/`FAIL` line to stdout
//! (bypassing libtest capture) before asserting.

use std::io::Write;

use nalgebra::DMatrix;
use scod_bench::runner::{aggregate, run_grid, CellSettings};
use scod_bench::{random_sparse, sketch_with, Aggregate, Algorithm, MetricsContext, SyntheticSpec};
use scod_core::baselines::{cs_sketch, fd_sketch, rp_sketch};
use scod_core::scod::{boosted_si, residual_scale, simultaneous_iteration, BsiState, SiConfig};
use scod_core::{
    cod_sketch, dense_shrink, scod_sketch, DenseMatrix, PeakScope, Rng, ScodConfig, ScodMode, ScodSketcher,
    SketchPair, SparseMatrix, StreamingSketch,
};

fn report(id: &str, pass: bool, detail: String) {
    let line = format!("{} criterion {id}: {detail}\n", if pass { "PASS" } else { "FAIL" });
    let mut out = std::io::stdout();
    out.write_all(line.as_bytes()).unwrap();
    out.flush().unwrap();
    assert!(pass, "criterion {id}: {detail}");
}

fn na(a: &DenseMatrix) -> DMatrix<f64> {
    DMatrix::from_column_slice(a.n_rows(), a.n_cols(), a.as_slice())
}

fn na_sparse(a: &SparseMatrix) -> DMatrix<f64> {
    na(&a.to_dense())
}

fn singular_values(a: &DMatrix<f64>) -> Vec<f64> {
    let mut s: Vec<f64> = a.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|x, y| y.partial_cmp(x).unwrap());
    s
}

fn spectral(a: &DMatrix<f64>) -> f64 {
    singular_values(a)[0]
}

fn product(x: &SparseMatrix, y: &SparseMatrix) -> DMatrix<f64> {
    na_sparse(x) * na_sparse(y).transpose()
}

fn sketch_product(s: &SketchPair) -> DMatrix<f64> {
    na(&s.b_x) * na(&s.b_y).transpose()
}

fn sketch_error(x: &SparseMatrix, y: &SparseMatrix, s: &SketchPair) -> f64 {
    spectral(&(product(x, y) - sketch_product(s)))
}

fn rel_frobenius(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

fn fro(a: &SparseMatrix) -> f64 {
    na_sparse(a).norm()
}

/// Sparse pair whose product has rank at most `r`, built from sparse atoms.
fn low_rank_pair(m_x: usize, m_y: usize, d: usize, r: usize, rng: &mut Rng) -> (SparseMatrix, SparseMatrix) {
    let ax = na_sparse(&random_sparse(m_x, r, 0.3, rng));
    let ay = na_sparse(&random_sparse(m_y, r, 0.3, rng));
    let c = na_sparse(&random_sparse(r, d, 0.3, rng));
    let to_sparse = |a: DMatrix<f64>| {
        SparseMatrix::from_dense(&DenseMatrix::from_col_major(a.nrows(), a.ncols(), a.as_slice().to_vec()).unwrap())
    };
    (to_sparse(ax * &c), to_sparse(ay * &c))
}

#[test]
fn criterion_01_cod_bound() {
    let mut rng = Rng::new(1);
    let mut ok = 0;
    let mut total = 0;
    let mut worst: f64 = 0.0;
    for _ in 0..30 {
        let x = random_sparse(40, 1500, 0.05, &mut rng);
        let y = random_sparse(50, 1500, 0.05, &mut rng);
        let bound_num = 2.0 * fro(&x) * fro(&y);
        for l in [8, 16, 32] {
            let err = sketch_error(&x, &y, &cod_sketch(&x, &y, l).unwrap());
            let ratio = err / (bound_num / l as f64);
            worst = worst.max(ratio);
            total += 1;
            if ratio <= 1.0 {
                ok += 1;
            }
        }
    }
    report("1", ok == total, format!("COD within 2|X|_F|Y|_F/l on {ok}/{total} (instance, l) pairs, worst ratio {worst:.3}"));
}

#[test]
fn criterion_02_scod_bound() {
    let l = 10;
    let mut lines = Vec::new();
    let mut pass = true;
    for mode in [ScodMode::Verified, ScodMode::Practical] {
        let mut ok = 0;
        for seed in 0..50u64 {
            let mut rng = Rng::new(1000 + seed);
            let x = random_sparse(50, 3000, 0.03, &mut rng);
            let y = random_sparse(60, 3000, 0.03, &mut rng);
            let s = scod_sketch(&x, &y, ScodConfig::new(l).mode(mode).seed(seed).delta(0.1)).unwrap();
            if sketch_error(&x, &y, &s) <= 16.0 * fro(&x) * fro(&y) / (5.0 * l as f64) {
                ok += 1;
            }
        }
        pass &= ok >= 45;
        lines.push(format!("{mode:?} {ok}/50"));
    }
    report("2", pass, format!("SCOD within 16|X|_F|Y|_F/(5l): {}", lines.join(", ")));
}

#[test]
fn criterion_03_si_guarantee() {
    let l = 8;
    let cfg = SiConfig::new(l, 0.1, 1.0).unwrap();
    let mut ok = 0;
    for seed in 0..100u64 {
        let mut rng = Rng::new(3000 + seed);
        // rank-24 product with a spread spectrum, so sigma_9 is well away from zero
        let (s_x, s_y) = low_rank_pair(60, 70, 300, 24, &mut rng);
        let (c_x, c_y) = simultaneous_iteration(&s_x, &s_y, &cfg, &mut rng).unwrap();
        let a = product(&s_x, &s_y);
        let sigma = singular_values(&a);
        let resid = spectral(&(&a - na(&c_x) * na(&c_y).transpose()));
        if resid <= 1.1 * sigma[l] {
            ok += 1;
        }
    }
    report("3", ok >= 95, format!("SI residual <= 1.1 sigma_9 in {ok}/100 trials"));
}

#[test]
fn criterion_04_bsi_residual() {
    let l = 8;
    let mut accepted_ok = 0;
    let mut attempts = 0;
    for seed in 0..100u64 {
        let mut rng = Rng::new(4000 + seed);
        let s_x = random_sparse(40, 200, 0.1, &mut rng);
        let s_y = random_sparse(50, 200, 0.1, &mut rng);
        let mut st = BsiState::new(0.1, 1.0).unwrap();
        let out = boosted_si(&mut st, &s_x, &s_y, l, &mut rng).unwrap();
        attempts += out.attempts;
        let delta = residual_scale(&s_x, &s_y, l);
        assert!((out.delta_scale - delta).abs() <= 1e-12 * delta);
        let resid = spectral(&(product(&s_x, &s_y) - na(&out.c_x) * na(&out.c_y).transpose()));
        if resid <= 2.0 * delta {
            accepted_ok += 1;
        }
    }
    let mean = attempts as f64 / 100.0;
    report(
        "4",
        accepted_ok == 100 && mean <= 1.2,
        format!("accepted outputs within 2 Delta: {accepted_ok}/100; mean SI calls {mean:.2}"),
    );
}

#[test]
fn criterion_05_gaussian_tail() {
    let m = 100;
    let draws = 20_000;
    let mut rng = Rng::new(5);
    let mut parts = Vec::new();
    let mut pass = true;
    for delta in [0.05, 0.2] {
        let thresh = delta / (m as f64 * std::f64::consts::E).sqrt();
        let hits = (0..draws)
            .filter(|_| {
                let x = rng.normal_vec(m);
                let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                x[0].abs() <= thresh * norm
            })
            .count();
        let freq = hits as f64 / draws as f64;
        let limit = delta + 3.0 * (delta * (1.0 - delta) / draws as f64).sqrt();
        pass &= freq <= limit;
        parts.push(format!("delta {delta}: {freq:.4} <= {limit:.4}"));
    }
    report("5", pass, format!("tail frequency {}", parts.join("; ")));
}

#[test]
fn criterion_06_shrinkage_identity() {
    let mut rng = Rng::new(6);
    let mut ok = 0;
    let mut worst: f64 = 0.0;
    for call in 0..200 {
        let width = 2 * (1 + call % 6);
        let m_x = width + call % 7;
        let m_y = width + (call / 7) % 5;
        let mut b_x = DenseMatrix::from_fn(m_x, width, |_, _| rng.normal());
        let b_y = DenseMatrix::from_fn(m_y, width, |_, _| rng.normal());
        if call % 5 == 0 && width > 2 {
            // rank-deficient left factor
            let first = b_x.col(0).to_vec();
            b_x.col_mut(1).copy_from_slice(&first);
        }
        let sigma = singular_values(&(na(&b_x) * na(&b_y).transpose()));
        let gamma = sigma[width / 2 - 1];
        let (out, _) = dense_shrink(&b_x, &b_y).unwrap();
        let got = singular_values(&sketch_product(&out));
        let mut dev: f64 = 0.0;
        for i in 0..width {
            let want = (sigma[i] - gamma).max(0.0);
            dev = dev.max((got[i] - want).abs());
        }
        let rel = dev / sigma[0];
        worst = worst.max(rel);
        let nuc_before: f64 = sigma.iter().sum();
        let nuc_after: f64 = got.iter().sum();
        let accounting = nuc_before - nuc_after >= (width / 2) as f64 * gamma * (1.0 - 1e-10);
        if rel <= 1e-8 && accounting {
            ok += 1;
        }
    }
    report("6", ok == 200, format!("shrinkage identity and nuclear accounting on {ok}/200 calls, worst rel dev {worst:.1e}"));
}

#[test]
fn criterion_07_fd_bound() {
    let mut rng = Rng::new(7);
    let mut ok = 0;
    for i in 0..30 {
        let l = [8, 16, 32][i % 3];
        let x = random_sparse(40, 1500, 0.05, &mut rng);
        let y = random_sparse(50, 1500, 0.05, &mut rng);
        let err = sketch_error(&x, &y, &fd_sketch(&x, &y, l).unwrap());
        if err <= (fro(&x).powi(2) + fro(&y).powi(2)) / l as f64 {
            ok += 1;
        }
    }
    report("7", ok == 30, format!("FD within (|X|_F^2+|Y|_F^2)/l on {ok}/30 instances"));
}

/// Entries of the Monte-Carlo mean that sit more than 3 standard errors from the truth.
fn unbiasedness_violations(
    x: &SparseMatrix,
    y: &SparseMatrix,
    seeds: u64,
    sketch: impl Fn(u64) -> SketchPair,
) -> (usize, usize) {
    let truth = product(x, y);
    let (r, c) = truth.shape();
    let mut sum = DMatrix::<f64>::zeros(r, c);
    let mut sum_sq = DMatrix::<f64>::zeros(r, c);
    for seed in 0..seeds {
        let p = sketch_product(&sketch(seed));
        sum_sq += p.component_mul(&p);
        sum += p;
    }
    let n = seeds as f64;
    let mut bad = 0;
    for j in 0..c {
        for i in 0..r {
            let mean = sum[(i, j)] / n;
            let var = ((sum_sq[(i, j)] / n - mean * mean) * n / (n - 1.0)).max(0.0);
            let se = (var / n).sqrt();
            let dev = (mean - truth[(i, j)]).abs();
            if dev > 3.0 * se && dev > 1e-12 * (1.0 + truth[(i, j)].abs()) {
                bad += 1;
            }
        }
    }
    (bad, r * c)
}

#[test]
fn criterion_08_unbiasedness() {
    let mut rng = Rng::new(8);
    let x = random_sparse(10, 50, 0.5, &mut rng);
    let y = random_sparse(10, 50, 0.5, &mut rng);
    let l = 5;
    let (cs_bad, entries) = unbiasedness_violations(&x, &y, 2000, |s| cs_sketch(&x, &y, l, s).unwrap());
    let (rp_bad, _) = unbiasedness_violations(&x, &y, 2000, |s| rp_sketch(&x, &y, l, s).unwrap());
    report(
        "8",
        cs_bad == 0 && rp_bad == 0,
        format!("entries outside 3 SE over 2000 seeds: CS {cs_bad}/{entries}, RP {rp_bad}/{entries}"),
    );
}

#[test]
fn criterion_09_exactness() {
    let mut rng = Rng::new(9);
    let mut det_ok = 0;
    let mut det_total = 0;
    let mut worst: f64 = 0.0;
    for l in [2, 4, 8] {
        for n in 1..=l {
            let x = random_sparse(12, n, 0.6, &mut rng);
            let y = random_sparse(10, n, 0.6, &mut rng);
            let truth = product(&x, &y);
            for s in [cod_sketch(&x, &y, l).unwrap(), fd_sketch(&x, &y, l).unwrap()] {
                let rel = rel_frobenius(&sketch_product(&s), &truth);
                worst = worst.max(rel);
                det_total += 1;
                if rel <= 1e-10 {
                    det_ok += 1;
                }
            }
        }
    }
    let mut scod_ok = 0;
    for seed in 0..100u64 {
        let mut rng = Rng::new(9000 + seed);
        // rank 4 < l = 5 and n = 20 < m = 30: a single buffer
        let (x, y) = low_rank_pair(30, 25, 20, 4, &mut rng);
        let s = scod_sketch(&x, &y, ScodConfig::new(5).seed(seed)).unwrap();
        if rel_frobenius(&sketch_product(&s), &product(&x, &y)) <= 1e-7 {
            scod_ok += 1;
        }
    }
    report(
        "9",
        det_ok == det_total && scod_ok >= 95,
        format!("COD/FD exact for n <= l on {det_ok}/{det_total} (worst {worst:.1e}); SCOD exact on {scod_ok}/100"),
    );
}

#[test]
fn criterion_10_space_budget() {
    let grid = [
        (40, 50, 2000, 0.05, 8),
        (60, 30, 3000, 0.2, 4),
        (50, 60, 3000, 0.03, 10),
        (50, 50, 1000, 0.01, 10),
        (200, 400, 2000, 0.05, 32),
        (300, 500, 4000, 0.02, 64),
    ];
    let mut rng = Rng::new(10);
    let mut pass = true;
    let mut worst_space: f64 = 0.0;
    let mut worst_trig: f64 = 0.0;
    for (m_x, m_y, n, density, l) in grid {
        let x = random_sparse(m_x, n, density, &mut rng);
        let y = random_sparse(m_y, n, density, &mut rng);
        let m = m_x.max(m_y);
        for mode in [ScodMode::Verified, ScodMode::Practical] {
            let scope = PeakScope::start();
            let mut sk = ScodSketcher::new(m_x, m_y, ScodConfig::new(l).mode(mode)).unwrap();
            for (cx, cy) in x.columns().zip(y.columns()) {
                sk.update(cx, cy).unwrap();
            }
            let (_, tel) = sk.finalize_with_telemetry().unwrap();
            let space = scope.peak() as f64 / (12 * m * l) as f64;
            let bound = (x.nnz() + y.nnz()) as f64 / (m * l) as f64 + n as f64 / m as f64 + 1.0;
            let trig = tel.triggers as f64 / bound;
            worst_space = worst_space.max(space);
            worst_trig = worst_trig.max(trig);
            pass &= space <= 1.0 && trig <= 1.0;
        }
    }
    report(
        "10",
        pass,
        format!("peak/12ml worst {worst_space:.3}; triggers/(trigger bound + 1) worst {worst_trig:.3}"),
    );
}

#[test]
fn criterion_11_runtime() {
    let spec = SyntheticSpec {
        m_x: 1000,
        m_y: 2000,
        n: 50_000,
        density: 0.01,
        singular_profile: SyntheticSpec::linear_profile(400),
        noise_density: 0.0,
        seed: 11,
    };
    let (x, y) = spec.generate().unwrap();
    let best = |algo: Algorithm, l: usize| {
        (0..2)
            .map(|rep| sketch_with(algo, &x, &y, l, rep, 0.1, ScodMode::Verified).unwrap().wall_time)
            .fold(f64::INFINITY, f64::min)
    };
    let mut ratios = Vec::new();
    let mut detail = Vec::new();
    let mut faster_at_64 = false;
    for l in [16, 32, 64] {
        let (s, c) = (best(Algorithm::Scod, l), best(Algorithm::Cod, l));
        ratios.push(s / c);
        detail.push(format!("l={l} scod {s:.2}s cod {c:.2}s ratio {:.3}", s / c));
        if l == 64 {
            faster_at_64 = s < c;
        }
    }
    let non_increasing = ratios.windows(2).all(|w| w[1] <= w[0]);
    report(
        "11",
        faster_at_64 && non_increasing,
        format!(
            "SCOD faster than COD at l=64: {faster_at_64}; SCOD/COD ratio non-increasing: {non_increasing} ({})",
            detail.join(", ")
        ),
    );
}

fn desk_suite(name: &str, spec: SyntheticSpec) -> (bool, String) {
    let grid = [8, 16, 32, 64];
    let (x, y) = spec.generate().unwrap();
    let settings = CellSettings {
        delta: 0.1,
        mode: ScodMode::Verified,
        metrics: MetricsContext::default(),
    };
    let reports = run_grid(&x, &y, &Algorithm::ALL, &grid, 50, 12, &settings);
    let failed = reports.iter().filter(|r| !r.is_ok()).count();
    let aggs = aggregate(&reports);
    let find = |a: Algorithm, l: usize| -> &Aggregate { aggs.iter().find(|g| g.algorithm == a && g.l == l).unwrap() };

    // (a) mean approximation error non-increasing in l, up to one standard deviation
    let mut monotone = Vec::new();
    for a in Algorithm::ALL {
        let bad = grid.windows(2).any(|w| {
            let (p, q) = (find(a, w[0]), find(a, w[1]));
            q.mean_approx() > p.mean_approx() + p.std_approx().max(q.std_approx())
        });
        if bad {
            monotone.push(a.name());
        }
    }
    // (b) SCOD within 5% of COD, (c) CS and RP strictly worse than both
    let mut worst_b: f64 = 0.0;
    let mut order_ok = true;
    for &l in &grid {
        let scod = find(Algorithm::Scod, l).mean_approx();
        let cod = find(Algorithm::Cod, l).mean_approx();
        worst_b = worst_b.max(scod / cod);
        for a in [Algorithm::Cs, Algorithm::Rp] {
            order_ok &= find(a, l).mean_approx() > scod.max(cod);
        }
    }
    let pass = failed == 0 && monotone.is_empty() && worst_b <= 1.05 && order_ok;
    let detail = format!(
        "{name}: failed cells {failed}; non-monotone {monotone:?}; max SCOD/COD {worst_b:.3}; CS,RP worse {order_ok}"
    );
    (pass, detail)
}

#[test]
fn criterion_12_desk_suites() {
    let (a, da) = desk_suite("low-rank", SyntheticSpec::lowrank_preset());
    let (b, db) = desk_suite("noisy", SyntheticSpec::noisy_preset());
    report("12", a && b, format!("{da} | {db}"));
}
