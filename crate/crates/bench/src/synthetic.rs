//! Sparse low-rank test matrices with a known spectrum.

use rand::seq::SliceRandom;
use scod_core::linalg::{gaussian_matrix, orthonormalize, Rng};
use scod_core::SparseMatrix;

use crate::error::{BenchError, Result};

/// Parameters of a synthetic `(X, Y)` pair with `n` columns each.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub m_x: usize,
    pub m_y: usize,
    pub n: usize,
    pub density: f64,
    /// Nonzero singular values of each of X and Y, non-increasing.
    pub singular_profile: Vec<f64>,
    /// Density of the additive uniform(0, 1) noise; zero disables it.
    pub noise_density: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    /// `[top, top - 1, ..., 1]`.
    pub fn linear_profile(top: usize) -> Vec<f64> {
        (1..=top).rev().map(|v| v as f64).collect()
    }

    /// Desk-scale low-rank suite.
    pub fn lowrank_preset() -> Self {
        SyntheticSpec {
            m_x: 200,
            m_y: 400,
            n: 2000,
            density: 0.05,
            singular_profile: Self::linear_profile(80),
            noise_density: 0.0,
            seed: 1,
        }
    }

    /// The low-rank suite plus sparse uniform noise at the same density.
    pub fn noisy_preset() -> Self {
        SyntheticSpec {
            noise_density: 0.05,
            seed: 2,
            ..Self::lowrank_preset()
        }
    }

    /// Number of diagonal blocks used to reach the target density.
    fn blocks(&self) -> usize {
        ((1.0 / self.density).round() as usize).max(1)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(BenchError::Config(msg));
        if self.m_x == 0 || self.m_y == 0 || self.n == 0 {
            return bad("synthetic dimensions must be positive".into());
        }
        if !(self.density > 0.0 && self.density <= 1.0) {
            return bad(format!("density must lie in (0, 1], got {}", self.density));
        }
        if !(self.noise_density >= 0.0 && self.noise_density <= 1.0) {
            return bad(format!("noise density must lie in [0, 1], got {}", self.noise_density));
        }
        let r = &self.singular_profile;
        if r.is_empty() || r.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
            return bad("singular profile must be non-empty and positive".into());
        }
        if r.windows(2).any(|w| w[1] > w[0]) {
            return bad("singular profile must be non-increasing".into());
        }
        let b = self.blocks();
        if b > self.m_x.min(self.m_y).min(self.n) {
            return bad(format!(
                "density {} needs {b} blocks, more than min(m_x, m_y, n)",
                self.density
            ));
        }
        if r.len() < b {
            return bad(format!(
                "a profile of length {} cannot fill {b} blocks at density {}",
                r.len(),
                self.density
            ));
        }
        let per_block = r.len().div_ceil(b);
        let smallest = (self.m_x / b).min(self.m_y / b).min(self.n / b);
        if per_block > smallest {
            return bad(format!(
                "rank {} does not fit in {b} blocks of at most {smallest} rows or columns",
                r.len()
            ));
        }
        Ok(())
    }

    pub fn generate(&self) -> Result<(SparseMatrix, SparseMatrix)> {
        generate_lowrank(self, &mut Rng::new(self.seed))
    }
}

/// Splits a random permutation of `0..n` into `b` near-equal groups.
fn partition(n: usize, b: usize, rng: &mut Rng) -> Vec<Vec<usize>> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    (0..b)
        .map(|k| {
            let mut g = idx[k * n / b..(k + 1) * n / b].to_vec();
            g.sort_unstable();
            g
        })
        .collect()
}

/// Appends the entries of `U diag(s) Vᵀ` placed on `rows × cols`.
fn push_block(
    triplets: &mut Vec<(usize, usize, f64)>,
    rows: &[usize],
    cols: &[usize],
    s: &[f64],
    rng: &mut Rng,
) -> Result<()> {
    let k = s.len();
    let u = orthonormalize(&gaussian_matrix(rng, rows.len(), k))?;
    let v = orthonormalize(&gaussian_matrix(rng, cols.len(), k))?;
    for (jj, &j) in cols.iter().enumerate() {
        for (ii, &i) in rows.iter().enumerate() {
            let val: f64 = (0..k).map(|t| u[(ii, t)] * s[t] * v[(jj, t)]).sum();
            if val != 0.0 {
                triplets.push((i, j, val));
            }
        }
    }
    Ok(())
}

/// Builds `X = Σ r_i u_i v_iᵀ` and `Y = Σ r_i u'_i v'_iᵀ` from unit factor
/// vectors confined to diagonal blocks.
///
/// Rows of X, rows of Y and the shared column index are each split into
/// `round(1/density)` random groups; singular values are dealt to the blocks
/// round-robin and the factors of each block are orthonormalized. Blocks have
/// disjoint supports, so the nonzero singular values of X and Y are exactly
/// the profile and the density is close to the target. X and Y share the
/// column blocks, which makes `X Yᵀ` nontrivial.
pub fn generate_lowrank(spec: &SyntheticSpec, rng: &mut Rng) -> Result<(SparseMatrix, SparseMatrix)> {
    spec.validate()?;
    let b = spec.blocks();
    let rows_x = partition(spec.m_x, b, rng);
    let rows_y = partition(spec.m_y, b, rng);
    let cols = partition(spec.n, b, rng);
    let mut tx = Vec::new();
    let mut ty = Vec::new();
    for blk in 0..b {
        let s: Vec<f64> = spec.singular_profile.iter().copied().skip(blk).step_by(b).collect();
        if s.is_empty() {
            continue;
        }
        push_block(&mut tx, &rows_x[blk], &cols[blk], &s, rng)?;
        push_block(&mut ty, &rows_y[blk], &cols[blk], &s, rng)?;
    }
    if spec.noise_density > 0.0 {
        add_noise(&mut tx, spec.m_x, spec.n, spec.noise_density, rng);
        add_noise(&mut ty, spec.m_y, spec.n, spec.noise_density, rng);
    }
    let x = SparseMatrix::from_triplets(spec.m_x, spec.n, &tx)?;
    let y = SparseMatrix::from_triplets(spec.m_y, spec.n, &ty)?;
    Ok((x, y))
}

fn add_noise(t: &mut Vec<(usize, usize, f64)>, rows: usize, cols: usize, density: f64, rng: &mut Rng) {
    for_each_sampled(rows * cols, density, rng, |lin, rng| {
        t.push((lin % rows, lin / rows, rng.uniform_open0()));
    });
}

/// Calls `f` on each index of `0..len` kept by independent Bernoulli(p)
/// trials, jumping over rejected runs with geometric gaps.
fn for_each_sampled(len: usize, p: f64, rng: &mut Rng, mut f: impl FnMut(usize, &mut Rng)) {
    if p <= 0.0 {
        return;
    }
    if p >= 1.0 {
        (0..len).for_each(|i| f(i, rng));
        return;
    }
    let log_q = (1.0 - p).ln();
    let mut pos = 0usize;
    loop {
        let gap = (rng.uniform_open0().ln() / log_q).floor();
        if gap >= (len - pos) as f64 {
            return;
        }
        pos += gap as usize;
        f(pos, rng);
        pos += 1;
        if pos >= len {
            return;
        }
    }
}

/// Random sparse matrix with Bernoulli(`density`) support and standard
/// normal values.
pub fn random_sparse(rows: usize, cols: usize, density: f64, rng: &mut Rng) -> SparseMatrix {
    let mut t = Vec::new();
    for_each_sampled(rows * cols, density, rng, |lin, rng| {
        t.push((lin % rows, lin / rows, rng.normal()));
    });
    SparseMatrix::from_triplets(rows, cols, &t).expect("indices in range")
}
