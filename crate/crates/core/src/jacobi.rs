//! Truncated power-series inverses of strongly dominant blocks.
//!
//! With `M_FF = X + L` (`X` positive diagonal, `L` Laplacian) and `L ⪯
//! beta X`, the series `Z^(k) = sum_{i<=k} X^-1 (-L X^-1)^i` approximates
//! `M_FF^-1`. For odd `k` it satisfies the one-sided sandwich
//!
//! ```text
//!   X + L  ⪯  (Z^(k))^-1  ⪯  X + (1 + delta) L,
//!   delta = beta^k (1 + beta) / (1 - beta^(k+1)),
//! ```
//!
//! which is exactly the Jacobi iteration truncated after `k` steps. The
//! operator is applied with `k` Horner-style sparse matvecs and is never
//! materialized except on explicit request (with an nnz budget).
//!
//! The last-step operator `Z^(last) = X^-1/2 ( I/2 + (I - Lx)^2/2 ) X^-1/2`
//! (written out: `X^-1/2 ... = 0.5 X^-1 + 0.5 X^-1 (X - L) X^-1 (X - L)
//! X^-1`) handles the highly dominant block left at the end of the
//! vertex-sparsifier recursion; it satisfies `M_FF ⪯ (Z^(last))^-1 ⪯
//! M_FF + (2/alpha) L_FF` for `alpha >= 4`.

use crate::error::{Error, Result};
use crate::matrix::SddmMatrix;
use std::collections::BTreeMap;

/// `Z^(k)` over a block: positive diagonal `X`, Laplacian `L`, odd `k`.
#[derive(Debug, Clone)]
pub struct JacobiOperator {
    x: Vec<f64>,
    l: SddmMatrix,
    k: usize,
}

/// Smallest odd integer `>= log_{alpha/2}(2/eps)`, clamped to `>= 1`.
pub fn series_order(alpha: f64, eps: f64) -> usize {
    let base = alpha / 2.0;
    let needed = (2.0 / eps).ln() / base.ln();
    let mut k = needed.ceil().max(1.0) as usize;
    if k % 2 == 0 {
        k += 1;
    }
    k
}

impl JacobiOperator {
    /// Build `Z^(k)` for the block `M_FF`, with `k` chosen from
    /// `(alpha, eps)`. Requires `alpha >= 4` (the substitution lemma needs
    /// it) and `eps` in `(0, 1/2]`.
    pub fn build(m: &SddmMatrix, f: &[usize], alpha: f64, eps: f64) -> Result<Self> {
        if alpha < 4.0 {
            return Err(Error::AlphaTooSmall { alpha, min: 4.0 });
        }
        if !(eps > 0.0 && eps <= 0.5) {
            return Err(Error::InvalidParameter(format!(
                "eps must lie in (0, 1/2], got {eps}"
            )));
        }
        let ff = m.submatrix(f);
        Self::from_block(&ff, series_order(alpha, eps))
    }

    /// Build directly from an already-extracted `M_FF` block and odd `k`.
    pub fn from_block(ff: &SddmMatrix, k: usize) -> Result<Self> {
        if k % 2 == 0 {
            return Err(Error::InvalidParameter("k must be odd".into()));
        }
        let xl = ff.xl_decompose();
        for (i, &xi) in xl.x.iter().enumerate() {
            if xi <= 0.0 {
                return Err(Error::SingularBlock(format!(
                    "X_FF has nonpositive entry {xi} at row {i}; block is not strongly dominant"
                )));
            }
        }
        Ok(JacobiOperator {
            x: xl.x,
            l: xl.laplacian,
            k,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn laplacian_block(&self) -> &SddmMatrix {
        &self.l
    }

    /// `Z^(k) b` via Horner: `t <- b - L X^-1 t` repeated `k` times, then
    /// one diagonal solve. Never materializes `Z`.
    pub fn apply(&self, b: &[f64]) -> Result<Vec<f64>> {
        if b.len() != self.x.len() {
            return Err(Error::DimensionMismatch {
                expected: self.x.len(),
                got: b.len(),
            });
        }
        let mut t = b.to_vec();
        for _ in 0..self.k {
            let xi_t: Vec<f64> = t.iter().zip(&self.x).map(|(v, x)| v / x).collect();
            let lt = self.l.matvec(&xi_t)?;
            for i in 0..t.len() {
                t[i] = b[i] - lt[i];
            }
        }
        for i in 0..t.len() {
            t[i] /= self.x[i];
        }
        Ok(t)
    }

    /// Sparse-vector apply: same series on a sparse right-hand side,
    /// touching only the `k`-ball of the support in the block graph.
    pub fn apply_sparse(&self, b: &[(usize, f64)]) -> Vec<(usize, f64)> {
        let mut t: BTreeMap<usize, f64> = b.iter().copied().collect();
        for _ in 0..self.k {
            let mut next: BTreeMap<usize, f64> = b.iter().copied().collect();
            for (&i, &v) in &t {
                let scaled = v / self.x[i];
                let (cols, vals) = self.l.row(i);
                for (&j, &lv) in cols.iter().zip(vals) {
                    *next.entry(j).or_insert(0.0) -= lv * scaled;
                }
            }
            t = next;
        }
        t.into_iter()
            .map(|(i, v)| (i, v / self.x[i]))
            .filter(|&(_, v)| v != 0.0)
            .collect()
    }

    /// Explicit sparse `Z^(k)`, row by row, with a hard nonzero budget.
    /// Row supports are `k`-balls in the block graph, so this is only
    /// sensible after a low-degree subset selection.
    pub fn materialize(&self, nnz_budget: usize) -> Result<Vec<Vec<(usize, f64)>>> {
        let n = self.dim();
        let mut rows = Vec::with_capacity(n);
        let mut total = 0usize;
        for i in 0..n {
            let row = self.apply_sparse(&[(i, 1.0)]);
            total += row.len();
            if total > nnz_budget {
                return Err(Error::NnzBudgetExceeded {
                    level: 0,
                    row: i,
                    nnz: total,
                    budget: nnz_budget,
                });
            }
            rows.push(row);
        }
        Ok(rows)
    }
}

/// The last-step operator `Z^(last)` over a block.
#[derive(Debug, Clone)]
pub struct LastStepOperator {
    x: Vec<f64>,
    l: SddmMatrix,
}

impl LastStepOperator {
    pub fn build(ff: &SddmMatrix) -> Result<Self> {
        let xl = ff.xl_decompose();
        for (i, &xi) in xl.x.iter().enumerate() {
            if xi <= 0.0 {
                return Err(Error::SingularBlock(format!(
                    "X_FF has nonpositive entry {xi} at row {i}"
                )));
            }
        }
        Ok(LastStepOperator {
            x: xl.x,
            l: xl.laplacian,
        })
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn laplacian_block(&self) -> &SddmMatrix {
        &self.l
    }

    /// `0.5 X^-1 b + 0.5 X^-1 (X - L) X^-1 (X - L) X^-1 b`: three diagonal
    /// solves and two matvecs.
    pub fn apply(&self, b: &[f64]) -> Result<Vec<f64>> {
        if b.len() != self.x.len() {
            return Err(Error::DimensionMismatch {
                expected: self.x.len(),
                got: b.len(),
            });
        }
        let n = b.len();
        let y0: Vec<f64> = (0..n).map(|i| b[i] / self.x[i]).collect();
        let y1 = self.apply_x_minus_l(&y0)?;
        let y1: Vec<f64> = (0..n).map(|i| y1[i] / self.x[i]).collect();
        let y2 = self.apply_x_minus_l(&y1)?;
        Ok((0..n).map(|i| 0.5 * (b[i] / self.x[i]) + 0.5 * y2[i] / self.x[i]).collect())
    }

    fn apply_x_minus_l(&self, v: &[f64]) -> Result<Vec<f64>> {
        let lv = self.l.matvec(v)?;
        Ok((0..v.len()).map(|i| self.x[i] * v[i] - lv[i]).collect())
    }
}

/// Convenience wrappers mirroring the free-function surface.
pub fn build_jacobi(m: &SddmMatrix, f: &[usize], alpha: f64, eps: f64) -> Result<JacobiOperator> {
    JacobiOperator::build(m, f, alpha, eps)
}

pub fn apply_jacobi(z: &JacobiOperator, b: &[f64]) -> Result<Vec<f64>> {
    z.apply(b)
}

pub fn materialize_jacobi(
    z: &JacobiOperator,
    nnz_budget: usize,
) -> Result<Vec<Vec<(usize, f64)>>> {
    z.materialize(nnz_budget)
}

pub fn build_last_step_operator(m_ff: &SddmMatrix) -> Result<LastStepOperator> {
    LastStepOperator::build(m_ff)
}

pub fn apply_last_step(op: &LastStepOperator, b: &[f64]) -> Result<Vec<f64>> {
    op.apply(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_order_examples() {
        // alpha = 4, eps = 1/2: log_2(4) = 2, smallest odd >= 2 is 3.
        assert_eq!(series_order(4.0, 0.5), 3);
        // alpha = 4, eps = 1/18: log_2(36) ~ 5.17 -> 7.
        assert_eq!(series_order(4.0, 1.0 / 18.0), 7);
        assert_eq!(series_order(16.0, 0.5), 1);
    }

    #[test]
    fn diagonal_block_is_entrywise_division() {
        let ff = SddmMatrix::diagonal(&[2.0, 4.0, 8.0]);
        let z = JacobiOperator::from_block(&ff, 3).unwrap();
        let y = z.apply(&[2.0, 4.0, 8.0]).unwrap();
        assert_eq!(y, vec![1.0, 1.0, 1.0]);

        let op = LastStepOperator::build(&ff).unwrap();
        let y = op.apply(&[2.0, 4.0, 8.0]).unwrap();
        assert_eq!(y, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn materialize_k1_diag() {
        let ff = SddmMatrix::diagonal(&[2.0, 4.0]);
        let z = JacobiOperator::from_block(&ff, 1).unwrap();
        let rows = z.materialize(16).unwrap();
        assert_eq!(rows[0], vec![(0, 0.5)]);
        assert_eq!(rows[1], vec![(1, 0.25)]);
    }

    #[test]
    fn apply_sparse_matches_dense_apply() {
        // alpha-dominant block on a path.
        let edges: Vec<_> = (0..9).map(|i| (i, i + 1, 0.1)).collect();
        let excess: Vec<f64> = vec![1.0; 10];
        let ff = SddmMatrix::from_excess_and_edges(10, &excess, &edges).unwrap();
        let z = JacobiOperator::from_block(&ff, 3).unwrap();
        let dense = z.apply(&[0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let sparse = z.apply_sparse(&[(2, 1.0)]);
        for (i, v) in sparse {
            assert!((dense[i] - v).abs() < 1e-15);
        }
    }

    #[test]
    fn budget_enforced() {
        let edges: Vec<_> = (0..9).map(|i| (i, i + 1, 0.1)).collect();
        let ff = SddmMatrix::from_excess_and_edges(10, &vec![1.0; 10], &edges).unwrap();
        let z = JacobiOperator::from_block(&ff, 3).unwrap();
        assert!(matches!(
            z.materialize(5),
            Err(Error::NnzBudgetExceeded { .. })
        ));
    }

    #[test]
    fn alpha_below_four_rejected() {
        let ff = SddmMatrix::diagonal(&[1.0, 1.0]);
        assert!(matches!(
            JacobiOperator::build(&ff, &[0, 1], 3.0, 0.5),
            Err(Error::AlphaTooSmall { .. })
        ));
    }
}
