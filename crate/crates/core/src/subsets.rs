//! Selection of strongly diagonally dominant elimination blocks.
//!
//! A set `F` is alpha-strongly diagonally dominant when every row of
//! `M_FF` satisfies `sum_{j != i} |M_ij| <= M_ii / (1 + alpha)`. The Las
//! Vegas routine samples a uniform subset of size `ceil(n / 4(1+alpha))`
//! and keeps the rows that pass the test; with probability at least 1/2
//! per round the survivors number at least `n / 8(1+alpha)`, so the
//! expected number of rounds is at most 2.
//!
//! The low-degree variant first discards columns denser than twice the
//! average, which caps the fill of any operator later materialized over
//! `F` (the U^T D U path needs this).

use crate::error::{Error, Result};
use crate::matrix::SddmMatrix;
use crate::rng::stream_rng;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SubsetParams {
    /// Dominance parameter, `alpha >= 0`.
    pub alpha: f64,
    pub seed: u64,
    /// Cap on Las Vegas rounds.
    pub max_retries: usize,
}

impl SubsetParams {
    pub fn new(alpha: f64, seed: u64) -> Self {
        SubsetParams {
            alpha,
            seed,
            max_retries: 64,
        }
    }
}

/// What actually happened during a subset search.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubsetOutcome {
    pub indices: Vec<usize>,
    pub rounds: usize,
}

/// Uniform-random alpha-strongly diagonally dominant subset (Las Vegas).
pub fn sdd_subset(m: &SddmMatrix, p: &SubsetParams) -> Result<Vec<usize>> {
    sdd_subset_outcome(m, p).map(|o| o.indices)
}

pub fn sdd_subset_outcome(m: &SddmMatrix, p: &SubsetParams) -> Result<SubsetOutcome> {
    if p.alpha < 0.0 {
        return Err(Error::InvalidParameter("alpha must be >= 0".into()));
    }
    if p.max_retries == 0 {
        return Err(Error::InvalidParameter("max_retries must be >= 1".into()));
    }
    let n = m.n();
    if n < 2 {
        return Err(Error::MatrixTooSmall(
            "need n >= 2 so both F and C are nonempty".into(),
        ));
    }
    let threshold = 8.0 * (1.0 + p.alpha);
    if (n as f64) < threshold {
        // Too small for the sampling argument: fall back to the single
        // most dominant row, which is vacuously alpha-dominant as a
        // one-element block. This is the chain's stopping regime.
        let best = (0..n)
            .max_by(|&a, &b| {
                let ra = dominance_ratio(m, a);
                let rb = dominance_ratio(m, b);
                ra.partial_cmp(&rb).unwrap()
            })
            .expect("n >= 2");
        return Ok(SubsetOutcome {
            indices: vec![best],
            rounds: 0,
        });
    }

    let sample_size = ((n as f64) / (4.0 * (1.0 + p.alpha))).ceil() as usize;
    let sample_size = sample_size.clamp(1, n - 1);
    let goal = (n as f64) / threshold;

    let mut all: Vec<usize> = (0..n).collect();
    for round in 1..=p.max_retries {
        let mut rng = stream_rng(p.seed, "sdd-subset", round as u64);
        all.shuffle(&mut rng);
        let mut fprime: Vec<usize> = all[..sample_size].to_vec();
        fprime.sort_unstable();
        let in_sample = positions(n, &fprime);

        let mut f = Vec::with_capacity(fprime.len());
        for &i in &fprime {
            let (cols, vals) = m.row(i);
            let mut within = 0.0;
            for (&j, &v) in cols.iter().zip(vals) {
                if j != i && in_sample[j] {
                    within += v.abs();
                }
            }
            if within <= m.diag(i).abs() / (1.0 + p.alpha) {
                f.push(i);
            }
        }
        if (f.len() as f64) >= goal {
            return Ok(SubsetOutcome {
                indices: f,
                rounds: round,
            });
        }
    }
    Err(Error::SubsetRetriesExhausted {
        rounds: p.max_retries,
    })
}

/// Dominant subset restricted to columns with at most twice the average
/// number of nonzeros. Everything returned satisfies both the degree cap
/// and the alpha-dominance condition.
pub fn low_degree_subset(m: &SddmMatrix, p: &SubsetParams) -> Result<Vec<usize>> {
    let n = m.n();
    if n < 2 {
        return Err(Error::MatrixTooSmall(
            "need n >= 2 so both F and C are nonempty".into(),
        ));
    }
    let cap = 2.0 * (m.nnz() as f64) / (n as f64);
    let kept: Vec<usize> = (0..n).filter(|&i| (m.row_nnz(i) as f64) <= cap).collect();
    if kept.len() < 2 {
        return Err(Error::MatrixTooSmall(
            "degree filter left fewer than 2 columns".into(),
        ));
    }
    let minor = m.submatrix(&kept);
    let inner = sdd_subset(&minor, p)?;
    Ok(inner.into_iter().map(|k| kept[k]).collect())
}

fn dominance_ratio(m: &SddmMatrix, i: usize) -> f64 {
    let off = m.offdiag_abs_sum(i);
    if off == 0.0 {
        f64::INFINITY
    } else {
        m.diag(i) / off
    }
}

fn positions(n: usize, sorted: &[usize]) -> Vec<bool> {
    let mut mask = vec![false; n];
    for &i in sorted {
        mask[i] = true;
    }
    mask
}

/// Verify by direct scan that `M_FF` is alpha-strongly diagonally
/// dominant; returns the measured alpha of the block.
pub fn verify_dominance(m: &SddmMatrix, f: &[usize]) -> f64 {
    m.submatrix(f).dominance_alpha()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_matrix_keeps_whole_sample() {
        let m = SddmMatrix::diagonal(&vec![1.0; 100]);
        let p = SubsetParams::new(4.0, 3);
        let out = sdd_subset_outcome(&m, &p).unwrap();
        // Every sampled row vacuously qualifies.
        let expected = (100.0f64 / 20.0).ceil() as usize;
        assert_eq!(out.indices.len(), expected);
        assert_eq!(out.rounds, 1);
    }

    #[test]
    fn path_graph_subset_verifies() {
        // P100 Laplacian plus unit diagonal, alpha = 4, seed = 7.
        let edges: Vec<_> = (0..99).map(|i| (i, i + 1, 1.0)).collect();
        let m = SddmMatrix::from_excess_and_edges(100, &vec![1.0; 100], &edges).unwrap();
        let p = SubsetParams::new(4.0, 7);
        let f = sdd_subset(&m, &p).unwrap();
        assert!(f.len() as f64 >= 100.0 / 40.0);
        // Independent re-check of the row condition.
        let alpha = verify_dominance(&m, &f);
        assert!(alpha >= 4.0, "measured alpha {alpha}");
    }

    #[test]
    fn star_center_never_selected() {
        // K_{1,99} + I: the center has 100 nonzeros, more than twice the
        // average, so the degree filter removes it.
        let edges: Vec<_> = (1..100).map(|i| (0, i, 1.0)).collect();
        let m = SddmMatrix::from_excess_and_edges(100, &vec![1.0; 100], &edges).unwrap();
        for seed in 0..10 {
            let p = SubsetParams::new(4.0, seed);
            let f = low_degree_subset(&m, &p).unwrap();
            assert!(!f.contains(&0));
        }
    }

    #[test]
    fn tiny_matrix_singleton_fallback() {
        let m = SddmMatrix::from_excess_and_edges(3, &[0.5, 3.0, 0.5], &[(0, 1, 0.2), (1, 2, 0.2)])
            .unwrap();
        let p = SubsetParams::new(4.0, 1);
        let out = sdd_subset_outcome(&m, &p).unwrap();
        assert_eq!(out.indices.len(), 1);
        assert_eq!(out.rounds, 0);
    }
}
