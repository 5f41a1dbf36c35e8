//! Exact Schur complements: `Schur(M, F) = M_CC - M_CF M_FF^-1 M_FC`.
//!
//! This is the ground truth every approximate vertex sparsifier is
//! measured against, so exactness beats speed here. Small `F` blocks go
//! through dense elimination of the full matrix; larger ones factor
//! `M_FF` once and run per-column solves against the (sparse) columns of
//! `M_FC`.

use crate::error::{Error, Result};
use crate::matrix::{validate_sddm, IndexPartition, MatrixKind, SddmMatrix, STRUCTURAL_ZERO_REL};
use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

/// Below this `|F|` the whole matrix is eliminated densely.
pub const DENSE_ELIMINATION_THRESHOLD: usize = 64;

/// Exact Schur complement of `F` in `m`. The output is again an
/// SDDM/Laplacian matrix and passes validation.
pub fn exact_schur(m: &SddmMatrix, part: &IndexPartition) -> Result<SddmMatrix> {
    if part.f.len() + part.c.len() != m.n() {
        return Err(Error::InvalidParameter(
            "partition does not cover the matrix".into(),
        ));
    }
    if part.c.is_empty() {
        return Err(Error::InvalidParameter(
            "Schur complement onto an empty C set".into(),
        ));
    }
    if part.f.is_empty() {
        return Ok(m.clone());
    }

    let blocks = m.restrict(part);
    let nf = part.f.len();
    let nc = part.c.len();

    let mut schur = if nf <= DENSE_ELIMINATION_THRESHOLD {
        dense_block_schur(&blocks.ff, &blocks.cc, &blocks.fc, nf, nc)?
    } else {
        percolumn_schur(&blocks.ff, &blocks.cc, &blocks.fc, nf, nc)?
    };

    // Symmetrize and drop rounding noise.
    schur = (&schur + schur.transpose()).scale(0.5);
    let scale = schur.amax().max(1e-300);
    let tol = STRUCTURAL_ZERO_REL * scale;
    let mut triplets = Vec::new();
    for i in 0..nc {
        for j in 0..nc {
            let v = schur[(i, j)];
            if i == j || v.abs() > tol {
                triplets.push((i, j, v));
            }
        }
    }
    let mut out = SddmMatrix::from_triplets(nc, &triplets)?;
    // Schur complements preserve the class: a Laplacian stays a Laplacian
    // as long as F does not swallow a grounded component.
    if m.kind() == MatrixKind::Laplacian && out.kind() == MatrixKind::Sddm {
        let max_sum = (0..nc).map(|i| out.row_sum(i).abs()).fold(0.0, f64::max);
        if max_sum <= 1e-8 * scale {
            out = out.with_kind(MatrixKind::Laplacian);
        }
    }
    validate_sddm(&out)?;
    Ok(out)
}

fn factor_ff(ff: &SddmMatrix) -> Result<Cholesky<f64, Dyn>> {
    ff.to_dense().cholesky().ok_or_else(|| {
        Error::SingularBlock(
            "M_FF is singular (a Laplacian component lies entirely inside F)".into(),
        )
    })
}

fn dense_block_schur(
    ff: &SddmMatrix,
    cc: &SddmMatrix,
    fc: &crate::matrix::RectBlock,
    nf: usize,
    nc: usize,
) -> Result<DMatrix<f64>> {
    let chol = factor_ff(ff)?;
    let mut fc_dense = DMatrix::zeros(nf, nc);
    for (i, row) in fc.rows.iter().enumerate() {
        for &(j, v) in row {
            fc_dense[(i, j)] = v;
        }
    }
    let y = chol.solve(&fc_dense); // M_FF^-1 M_FC
    Ok(cc.to_dense() - fc_dense.transpose() * y)
}

fn percolumn_schur(
    ff: &SddmMatrix,
    cc: &SddmMatrix,
    fc: &crate::matrix::RectBlock,
    nf: usize,
    nc: usize,
) -> Result<DMatrix<f64>> {
    let chol = factor_ff(ff)?;
    // Column c of M_FC, solved one at a time; columns without entries
    // contribute nothing.
    let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); nc];
    for (i, row) in fc.rows.iter().enumerate() {
        for &(j, v) in row {
            cols[j].push((i, v));
        }
    }
    let mut schur = cc.to_dense();
    for (j, col) in cols.iter().enumerate() {
        if col.is_empty() {
            continue;
        }
        let mut b = DVector::zeros(nf);
        for &(i, v) in col {
            b[i] = v;
        }
        let y = chol.solve(&b); // M_FF^-1 M_FC e_j
        // Subtract M_CF y from column j: (M_CF y)_c = sum_i fc[i][c] * y[i].
        for (i, row) in fc.rows.iter().enumerate() {
            let yi = y[i];
            if yi == 0.0 {
                continue;
            }
            for &(c, v) in row {
                schur[(c, j)] -= v * yi;
            }
        }
    }
    Ok(schur)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::IndexPartition;

    #[test]
    fn block_diagonal_returns_cc() {
        // No F-C coupling: Schur = M_CC unchanged.
        let m = SddmMatrix::from_excess_and_edges(
            4,
            &[1.0, 1.0, 0.5, 0.5],
            &[(0, 1, 1.0), (2, 3, 2.0)],
        )
        .unwrap();
        let part = IndexPartition::from_f(4, &[0, 1]).unwrap();
        let s = exact_schur(&m, &part).unwrap();
        let cc = m.submatrix(&[2, 3]);
        assert_eq!(s.to_dense(), cc.to_dense());
    }

    #[test]
    fn p3_middle_elimination() {
        // M = [[2,-1,0],[-1,2,-1],[0,-1,2]], F = {1}
        // Schur = [[1.5,-0.5],[-0.5,1.5]]
        let m = SddmMatrix::from_excess_and_edges(
            3,
            &[1.0, 0.0, 1.0],
            &[(0, 1, 1.0), (1, 2, 1.0)],
        )
        .unwrap();
        let part = IndexPartition::from_f(3, &[1]).unwrap();
        let s = exact_schur(&m, &part).unwrap();
        assert!((s.entry(0, 0) - 1.5).abs() < 1e-14);
        assert!((s.entry(0, 1) + 0.5).abs() < 1e-14);
        assert!((s.entry(1, 1) - 1.5).abs() < 1e-14);
    }

    #[test]
    fn laplacian_component_inside_f_is_singular() {
        let m = SddmMatrix::laplacian_from_edges(4, &[(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        let part = IndexPartition::from_f(4, &[0, 1]).unwrap();
        assert!(matches!(
            exact_schur(&m, &part),
            Err(Error::SingularBlock(_))
        ));
    }

    #[test]
    fn empty_f_returns_input() {
        let m = SddmMatrix::identity(3);
        let part = IndexPartition::from_f(3, &[]).unwrap();
        let s = exact_schur(&m, &part).unwrap();
        assert_eq!(s, m);
    }

    #[test]
    fn laplacian_kind_preserved() {
        let m = SddmMatrix::laplacian_from_edges(
            4,
            &[(0, 1, 1.0), (1, 2, 2.0), (2, 3, 1.0), (0, 3, 0.5)],
        )
        .unwrap();
        let part = IndexPartition::from_f(4, &[1]).unwrap();
        let s = exact_schur(&m, &part).unwrap();
        assert_eq!(s.kind(), MatrixKind::Laplacian);
    }
}
