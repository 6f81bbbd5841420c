//! Flat `key = value` experiment configuration.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use scod_core::linalg::derive_seed;
use scod_core::{ScodMode, SparseMatrix};

use crate::data::{load_and_split, Split};
use crate::error::{BenchError, Result};
use crate::synthetic::SyntheticSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Scod,
    Cod,
    Fd,
    Cs,
    Rp,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Scod,
        Algorithm::Cod,
        Algorithm::Fd,
        Algorithm::Cs,
        Algorithm::Rp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Scod => "scod",
            Algorithm::Cod => "cod",
            Algorithm::Fd => "fd",
            Algorithm::Cs => "cs",
            Algorithm::Rp => "rp",
        }
    }

    /// Whether two runs with different seeds can differ.
    pub fn is_randomized(self) -> bool {
        matches!(self, Algorithm::Scod | Algorithm::Cs | Algorithm::Rp)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| BenchError::Config(format!("unknown algorithm '{s}'")))
    }
}

pub fn parse_mode(s: &str) -> Result<ScodMode> {
    match s.trim().to_ascii_lowercase().as_str() {
        "verified" => Ok(ScodMode::Verified),
        "practical" => Ok(ScodMode::Practical),
        other => Err(BenchError::Config(format!("unknown mode '{other}'"))),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Dataset {
    Lowrank,
    Noisy,
    /// A matrix market file split into front and back column halves.
    File(PathBuf),
}

/// Everything needed to run a grid of (algorithm, ℓ, trial) cells.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub dataset: Dataset,
    pub m_x: usize,
    pub m_y: usize,
    pub n: usize,
    pub density: f64,
    pub profile_max: usize,
    pub noise_density: f64,
    pub algorithms: Vec<Algorithm>,
    pub l_grid: Vec<usize>,
    pub seeds: usize,
    pub k: usize,
    pub delta: f64,
    pub mode: ScodMode,
    pub master_seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let p = SyntheticSpec::lowrank_preset();
        RunConfig {
            dataset: Dataset::Lowrank,
            m_x: p.m_x,
            m_y: p.m_y,
            n: p.n,
            density: p.density,
            profile_max: p.singular_profile.len(),
            noise_density: SyntheticSpec::noisy_preset().noise_density,
            algorithms: Algorithm::ALL.to_vec(),
            l_grid: vec![8, 16, 32, 64],
            seeds: 50,
            k: 8,
            delta: 0.1,
            mode: ScodMode::Verified,
            master_seed: 0,
        }
    }
}

fn value<T: FromStr>(key: &str, raw: &str, line: usize) -> Result<T> {
    raw.parse()
        .map_err(|_| BenchError::Config(format!("line {line}: bad value '{raw}' for {key}")))
}

fn list<T: FromStr>(key: &str, raw: &str, line: usize) -> Result<Vec<T>> {
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| value(key, s, line))
        .collect()
}

impl RunConfig {
    /// Parses `key = value` lines; `#` starts a comment. Unset keys keep
    /// their defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, val) = content
                .split_once('=')
                .ok_or_else(|| BenchError::Config(format!("line {line}: expected key = value")))?;
            let (key, val) = (key.trim(), val.trim());
            match key {
                "dataset" => {
                    cfg.dataset = match val {
                        "lowrank" => Dataset::Lowrank,
                        "noisy" => Dataset::Noisy,
                        path => Dataset::File(PathBuf::from(path)),
                    }
                }
                "m_x" => cfg.m_x = value(key, val, line)?,
                "m_y" => cfg.m_y = value(key, val, line)?,
                "n" => cfg.n = value(key, val, line)?,
                "density" => cfg.density = value(key, val, line)?,
                "profile_max" => cfg.profile_max = value(key, val, line)?,
                "noise_density" => cfg.noise_density = value(key, val, line)?,
                "algorithms" => cfg.algorithms = list(key, val, line)?,
                "l_grid" => cfg.l_grid = list(key, val, line)?,
                "seeds" => cfg.seeds = value(key, val, line)?,
                "k" => cfg.k = value(key, val, line)?,
                "delta" => cfg.delta = value(key, val, line)?,
                "mode" => cfg.mode = parse_mode(val)?,
                "master_seed" => cfg.master_seed = value(key, val, line)?,
                other => {
                    return Err(BenchError::Config(format!("line {line}: unknown key '{other}'")))
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| BenchError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(BenchError::Config(msg.to_string()));
        if self.algorithms.is_empty() {
            return bad("no algorithms selected");
        }
        if self.l_grid.is_empty() || self.l_grid.contains(&0) {
            return bad("l_grid must list positive sketch sizes");
        }
        if self.seeds == 0 {
            return bad("seeds must be positive");
        }
        if self.k == 0 {
            return bad("k must be positive");
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return bad("delta must lie in (0, 1)");
        }
        if let Some(spec) = self.synthetic_spec() {
            spec.validate()?;
        }
        Ok(())
    }

    /// The generator parameters, for synthetic datasets.
    pub fn synthetic_spec(&self) -> Option<SyntheticSpec> {
        let noise = match self.dataset {
            Dataset::Lowrank => 0.0,
            Dataset::Noisy => self.noise_density,
            Dataset::File(_) => return None,
        };
        Some(SyntheticSpec {
            m_x: self.m_x,
            m_y: self.m_y,
            n: self.n,
            density: self.density,
            singular_profile: SyntheticSpec::linear_profile(self.profile_max),
            noise_density: noise,
            seed: derive_seed(&[self.master_seed, 0xDA7A]),
        })
    }

    pub fn load_data(&self) -> Result<(SparseMatrix, SparseMatrix)> {
        match &self.dataset {
            Dataset::File(path) => load_and_split(path, Split::FrontHalf),
            _ => self.synthetic_spec().expect("synthetic dataset").generate(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_and_comments() {
        let cfg = RunConfig::parse(
            "# grid\ndataset = noisy\nalgorithms = scod, cod\nl_grid = 8,16 # small\nseeds = 3\nmode = practical\n",
        )
        .unwrap();
        assert_eq!(cfg.dataset, Dataset::Noisy);
        assert_eq!(cfg.algorithms, vec![Algorithm::Scod, Algorithm::Cod]);
        assert_eq!(cfg.l_grid, vec![8, 16]);
        assert_eq!(cfg.seeds, 3);
        assert_eq!(cfg.mode, ScodMode::Practical);
    }

    #[test]
    fn rejects_unknown_keys_and_values() {
        assert!(RunConfig::parse("colour = red\n").is_err());
        assert!(RunConfig::parse("seeds = many\n").is_err());
        assert!(RunConfig::parse("algorithms = svd\n").is_err());
        assert!(RunConfig::parse("just words\n").is_err());
        assert!(RunConfig::parse("delta = 1.5\n").is_err());
    }
}
