//! Surrogate panels.
//!
//! A synchronous shuffle applies one random permutation of the time axis
//! to every column, so equal-time cross-correlations survive while serial
//! dependence is destroyed. Marginal Gaussianization keeps the time order
//! of each column but replaces its values by Gaussian quantiles of their
//! ranks, removing the shape of the marginal distribution.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use sha2::{Digest, Sha256};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::panel::ReturnPanel;
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurrogateKind {
    SynchronousShuffle,
    MarginalGaussianize,
}

impl fmt::Display for SurrogateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SurrogateKind::SynchronousShuffle => "synchronous_shuffle",
            SurrogateKind::MarginalGaussianize => "marginal_gaussianize",
        })
    }
}

impl FromStr for SurrogateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "synchronous_shuffle" | "shuffle" | "shuffled" => Ok(SurrogateKind::SynchronousShuffle),
            "marginal_gaussianize" | "gaussianize" | "gaussianized" => {
                Ok(SurrogateKind::MarginalGaussianize)
            }
            other => Err(Error::Config(format!("unknown surrogate kind {:?}", other))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurrogateSpec {
    pub kind: SurrogateKind,
    pub seed: u64,
    /// Output row `t` holds input row `permutation[t]`.
    pub permutation: Option<Vec<usize>>,
}

impl SurrogateSpec {
    /// Hex SHA-256 of the permutation as little-endian u64 indices.
    pub fn permutation_digest(&self) -> Option<String> {
        self.permutation.as_ref().map(|p| {
            let mut h = Sha256::new();
            for &i in p {
                h.update((i as u64).to_le_bytes());
            }
            format!("{:x}", h.finalize())
        })
    }

    /// Sidecar metadata in `key=value` lines.
    pub fn to_metadata(&self) -> String {
        let mut out = format!("kind={}\nseed={}\n", self.kind, self.seed);
        if let Some(d) = self.permutation_digest() {
            out.push_str(&format!("permutation_sha256={}\n", d));
        }
        out
    }
}

/// Seeded Fisher–Yates permutation of `0..len`.
pub fn draw_permutation(len: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm: Vec<usize> = (0..len).collect();
    perm.shuffle(&mut rng);
    perm
}

/// Reorders the rows of every column by `permutation`. Dates stay put.
pub fn apply_permutation(panel: &ReturnPanel, permutation: &[usize]) -> Result<ReturnPanel> {
    let t = panel.n_obs();
    if permutation.len() != t {
        return Err(Error::Config(format!(
            "permutation of length {} for {} rows",
            permutation.len(),
            t
        )));
    }
    let mut seen = vec![false; t];
    for &i in permutation {
        if i >= t || std::mem::replace(&mut seen[i], true) {
            return Err(Error::Config("permutation is not a bijection".into()));
        }
    }
    let returns = panel
        .returns
        .par_iter()
        .map(|col| permutation.iter().map(|&i| col[i]).collect())
        .collect();
    Ok(ReturnPanel {
        dates: panel.dates.clone(),
        tickers: panel.tickers.clone(),
        returns,
        column_means_removed: panel.column_means_removed.clone(),
    })
}

pub fn synchronous_shuffle(panel: &ReturnPanel, seed: u64) -> Result<(ReturnPanel, SurrogateSpec)> {
    if panel.n_obs() < 2 {
        return Err(Error::Estimation("shuffle needs at least 2 rows".into()));
    }
    let permutation = draw_permutation(panel.n_obs(), seed);
    let out = apply_permutation(panel, &permutation)?;
    Ok((
        out,
        SurrogateSpec {
            kind: SurrogateKind::SynchronousShuffle,
            seed,
            permutation: Some(permutation),
        },
    ))
}

/// Minimum rows for [`marginal_gaussianize`].
pub const MIN_GAUSSIANIZE_ROWS: usize = 10;

/// Replaces each value by `Φ⁻¹((rank − 0.5)/T)`; ties are ordered by a
/// random key from the column's own stream.
pub fn marginal_gaussianize(panel: &ReturnPanel, seed: u64) -> Result<ReturnPanel> {
    let t = panel.n_obs();
    if t < MIN_GAUSSIANIZE_ROWS {
        return Err(Error::Estimation(format!(
            "gaussianization needs at least {} rows, got {}",
            MIN_GAUSSIANIZE_ROWS, t
        )));
    }
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    let quantiles: Vec<f64> = (0..t)
        .map(|r| normal.inverse_cdf((r as f64 + 0.5) / t as f64))
        .collect();

    let returns = panel
        .tickers
        .par_iter()
        .zip(panel.returns.par_iter())
        .enumerate()
        .map(|(c, (ticker, col))| {
            if col.iter().all(|v| *v == col[0]) {
                return Err(Error::UndefinedRank(format!("constant return column {}", ticker)));
            }
            let mut rng = seed::stream(seed, c as u64);
            let keys: Vec<u64> = (0..t).map(|_| rng.gen()).collect();
            let mut order: Vec<usize> = (0..t).collect();
            order.sort_by(|&a, &b| {
                (col[a] + 0.0)
                    .total_cmp(&(col[b] + 0.0))
                    .then(keys[a].cmp(&keys[b]))
                    .then(a.cmp(&b))
            });
            let mut out = vec![0.0; t];
            for (rank, &i) in order.iter().enumerate() {
                out[i] = quantiles[rank];
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(ReturnPanel {
        dates: panel.dates.clone(),
        tickers: panel.tickers.clone(),
        returns,
        column_means_removed: panel.column_means_removed.clone(),
    })
}
